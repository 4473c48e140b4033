import struct
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


def write_idx_images(path, images):
    """Serialize a (N, H, W) uint8 array in the big-endian IDX image format."""
    images = np.asarray(images, dtype=np.uint8)
    n, h, w = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, n, h, w))
        f.write(images.tobytes())


def write_idx_labels(path, labels):
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, labels.size))
        f.write(labels.tobytes())


def write_pgm(path, pixels, maxval=255):
    """Serialize a (H, W) uint8 array as a binary P5 PGM file."""
    pixels = np.asarray(pixels, dtype=np.uint8)
    h, w = pixels.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
        f.write(pixels.tobytes())


@pytest.fixture
def synthetic_mnist(tmp_path):
    """A tiny but learnable IDX dataset: class = brightest image quadrant."""
    rng = np.random.default_rng(99)
    n = 64
    images = np.zeros((n, 28, 28), dtype=np.uint8)
    labels = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        cls = int(rng.integers(0, 4))
        labels[i] = cls
        img = rng.integers(0, 60, size=(28, 28))
        r0 = 0 if cls in (0, 1) else 14
        c0 = 0 if cls in (0, 2) else 14
        img[r0:r0 + 14, c0:c0 + 14] += 150
        images[i] = np.clip(img, 0, 255)
    paths = {
        "train_images": tmp_path / "train-images-idx3-ubyte",
        "train_labels": tmp_path / "train-labels-idx1-ubyte",
        "test_images": tmp_path / "t10k-images-idx3-ubyte",
        "test_labels": tmp_path / "t10k-labels-idx1-ubyte",
    }
    write_idx_images(paths["train_images"], images[:48])
    write_idx_labels(paths["train_labels"], labels[:48])
    write_idx_images(paths["test_images"], images[48:])
    write_idx_labels(paths["test_labels"], labels[48:])
    return tmp_path, paths
