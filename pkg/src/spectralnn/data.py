"""Dataset ingestion: MNIST IDX files, AT&T PGM faces, splits, batching,
and the pyramidal spectrum pipeline (whole image plus four zero-padded
quadrants).

Loaded datasets are immutable arrays scaled to [0, 1]; batch iterators are
independent per-run objects, so datasets can be shared freely.
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .fourier import dft2, zero_pad
from .spectral import SpectralTensor

_IDX_IMAGES_MAGIC = 0x00000803
_IDX_LABELS_MAGIC = 0x00000801


@dataclass
class LabeledImageSet:
    images: np.ndarray  # (N, H, W) float64 in [0, 1]
    labels: np.ndarray  # (N,) int64
    class_count: int

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise DataError(
                f"image/label count mismatch: {len(self.images)} vs {len(self.labels)}"
            )

    def __len__(self):
        return len(self.images)

    def subset(self, indices):
        return LabeledImageSet(self.images[indices], self.labels[indices], self.class_count)


def _unpack(fmt, blob, offset, path, what):
    size = struct.calcsize(fmt)
    if offset + size > len(blob):
        raise DataError(
            f"{path}: truncated while reading {what} at byte offset {offset}"
        )
    return struct.unpack_from(fmt, blob, offset), offset + size


def load_mnist(images_path, labels_path):
    """Parse the big-endian IDX pair into a labeled image set.

    Pixels are scaled by 1/255 with no mean subtraction; the networks' own
    normalization layers handle centering.
    """
    blob = Path(images_path).read_bytes()
    (magic, count, height, width), offset = _unpack(">IIII", blob, 0, images_path, "header")
    if magic != _IDX_IMAGES_MAGIC:
        raise DataError(
            f"{images_path}: bad magic 0x{magic:08x} at byte offset 0, "
            f"expected 0x{_IDX_IMAGES_MAGIC:08x}"
        )
    expected = count * height * width
    if len(blob) - offset < expected:
        raise DataError(
            f"{images_path}: expected {expected} pixel bytes, file ends at byte "
            f"offset {len(blob)} (needed {offset + expected})"
        )
    pixels = np.frombuffer(blob, dtype=np.uint8, count=expected, offset=offset)
    images = pixels.reshape(count, height, width).astype(np.float64) / 255.0

    blob = Path(labels_path).read_bytes()
    (magic, label_count), offset = _unpack(">II", blob, 0, labels_path, "header")
    if magic != _IDX_LABELS_MAGIC:
        raise DataError(
            f"{labels_path}: bad magic 0x{magic:08x} at byte offset 0, "
            f"expected 0x{_IDX_LABELS_MAGIC:08x}"
        )
    if len(blob) - offset < label_count:
        raise DataError(
            f"{labels_path}: truncated label payload at byte offset {len(blob)}"
        )
    labels = np.frombuffer(blob, dtype=np.uint8, count=label_count, offset=offset)
    if label_count != count:
        raise DataError(
            f"count mismatch: {images_path} holds {count} images but "
            f"{labels_path} holds {label_count} labels"
        )
    return LabeledImageSet(images, labels.astype(np.int64), class_count=10)


def read_pgm(path):
    """Parse a binary (P5) PGM file with maxval 255 into a [0, 1] grid."""
    blob = Path(path).read_bytes()
    if blob[:2] != b"P5":
        raise DataError(f"{path}: not a binary PGM (magic {blob[:2]!r} at byte offset 0)")
    offset = 2
    fields = []
    while len(fields) < 3:
        if offset >= len(blob):
            raise DataError(f"{path}: truncated header at byte offset {offset}")
        ch = blob[offset:offset + 1]
        if ch.isspace():
            offset += 1
        elif ch == b"#":
            while offset < len(blob) and blob[offset:offset + 1] != b"\n":
                offset += 1
        else:
            start = offset
            while offset < len(blob) and not blob[offset:offset + 1].isspace():
                offset += 1
            token = blob[start:offset]
            if not token.isdigit():
                raise DataError(
                    f"{path}: bad header token {token!r} at byte offset {start}"
                )
            fields.append(int(token))
    offset += 1  # single whitespace after maxval
    width, height, maxval = fields
    if maxval != 255:
        raise DataError(f"{path}: unsupported maxval {maxval}, expected 255")
    expected = width * height
    if len(blob) - offset < expected:
        raise DataError(
            f"{path}: pixel payload ends at byte offset {len(blob)}, "
            f"needed {offset + expected}"
        )
    pixels = np.frombuffer(blob, dtype=np.uint8, count=expected, offset=offset)
    return pixels.reshape(height, width).astype(np.float64) / 255.0


def load_att(root_dir):
    """Load a directory of per-subject subfolders of PGM images.

    Subfolders sorted by name define the class ids; the classic layout is 40
    subjects x 10 images of 92x112.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise DataError(f"{root}: not a directory")
    subjects = sorted(p for p in root.iterdir() if p.is_dir())
    if not subjects:
        raise DataError(f"{root}: no subject subdirectories found")
    images, labels = [], []
    for cls, subject in enumerate(subjects):
        files = sorted(subject.glob("*.pgm"))
        if not files:
            raise DataError(f"{subject}: no .pgm files")
        for f in files:
            images.append(read_pgm(f))
            labels.append(cls)
    shapes = {img.shape for img in images}
    if len(shapes) != 1:
        raise DataError(f"{root}: inconsistent image shapes {sorted(shapes)}")
    return LabeledImageSet(
        np.stack(images), np.array(labels, dtype=np.int64), class_count=len(subjects)
    )


def att_split(dataset, per_class_train=5, seed=0):
    """Deterministic stratified split: per_class_train images per subject."""
    per_class = {}
    for idx, label in enumerate(dataset.labels):
        per_class.setdefault(int(label), []).append(idx)
    counts = {len(v) for v in per_class.values()}
    if per_class_train >= min(counts):
        raise ValueError(
            f"per_class_train={per_class_train} needs more images than some class has"
        )
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for label in sorted(per_class):
        perm = rng.permutation(per_class[label])
        train_idx.extend(perm[:per_class_train])
        test_idx.extend(perm[per_class_train:])
    return dataset.subset(np.array(train_idx)), dataset.subset(np.array(test_idx))


def resize_bilinear(img, out_height, out_width):
    """Bilinear resample with endpoint-aligned sample positions.

    Resizing to the source size is the identity; a size-1 output axis samples
    the center of the source axis.
    """
    img = np.asarray(img, dtype=np.float64)
    in_h, in_w = img.shape

    def positions(out_n, in_n):
        if out_n == 1:
            return np.full(1, (in_n - 1) / 2.0)
        return np.arange(out_n) * (in_n - 1) / (out_n - 1)

    ys = positions(out_height, in_h)
    xs = positions(out_width, in_w)
    y0 = np.clip(np.floor(ys).astype(int), 0, in_h - 1)
    x0 = np.clip(np.floor(xs).astype(int), 0, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    top = img[np.ix_(y0, x0)] * (1 - wx) + img[np.ix_(y0, x1)] * wx
    bottom = img[np.ix_(y1, x0)] * (1 - wx) + img[np.ix_(y1, x1)] * wx
    return top * (1 - wy) + bottom * wy


def quadrants(img):
    """Row-major quadrants: top-left, top-right, bottom-left, bottom-right."""
    h, w = img.shape
    if h % 2 or w % 2:
        raise ValueError(f"quadrant split needs even dims, got {h}x{w}")
    hh, hw = h // 2, w // 2
    return [
        img[:hh, :hw], img[:hh, hw:],
        img[hh:, :hw], img[hh:, hw:],
    ]


def pyramidal_spectra(img):
    """Five spectra per image: whole image, then each zero-padded quadrant.

    Every quadrant is padded back to the full image size before the
    transform, so all branches share one spatial shape.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    branches = [dft2(img)]
    for quad in quadrants(img):
        branches.append(dft2(zero_pad(quad, h, w)))
    return branches


def pyramidal_spectra_batch(images):
    """Batched pyramid: list of five (B, 1, H, W) spectral tensors."""
    images = np.asarray(images, dtype=np.float64)
    b, h, w = images.shape
    stacks = [images]
    hh, hw = h // 2, w // 2
    for r0, c0 in ((0, 0), (0, hw), (hh, 0), (hh, hw)):
        padded = np.zeros_like(images)
        padded[:, :hh, :hw] = images[:, r0:r0 + hh, c0:c0 + hw]
        stacks.append(padded)
    out = []
    for stack in stacks:
        spec = np.fft.fftshift(np.fft.fft2(stack), axes=(-2, -1))
        out.append(SpectralTensor.from_complex(spec[:, None]))
    return out


def whole_spectrum_batch(images):
    """Single-branch ingestion: (B, 1, H, W) spectra of the raw images."""
    images = np.asarray(images, dtype=np.float64)
    spec = np.fft.fftshift(np.fft.fft2(images), axes=(-2, -1))
    return SpectralTensor.from_complex(spec[:, None])


class BatchIterator:
    """Endless shuffled batches; incomplete trailing batches are dropped."""

    def __init__(self, dataset, batch_size, seed=0):
        if len(dataset) < 2:
            raise ValueError("need at least 2 samples to train")
        self.dataset = dataset
        self.batch_size = min(batch_size, len(dataset))
        self._rng = np.random.default_rng(seed)
        self._order = None
        self._cursor = 0

    def __iter__(self):
        return self

    def __next__(self):
        n = len(self.dataset)
        if self._order is None or self._cursor + self.batch_size > n:
            self._order = self._rng.permutation(n)
            self._cursor = 0
        idx = self._order[self._cursor:self._cursor + self.batch_size]
        self._cursor += self.batch_size
        return self.dataset.images[idx], self.dataset.labels[idx]
