"""Flat binary checkpoint format.

Layout (all integers little-endian):

    magic   4 bytes  b"SPNN"
    version u32      currently 1
    count   u32      number of records
    then per record:
        name_len u16, name bytes (utf-8)
        rank     u8
        dims     u32 * rank
        data     float64 * prod(dims), little-endian

Round-trips are bit-exact.
"""

import struct

import numpy as np

MAGIC = b"SPNN"
VERSION = 1


def save_state(path, state):
    """Write an ordered mapping of name -> float64 ndarray."""
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", VERSION, len(state)))
        for name, arr in state.items():
            arr = np.asarray(arr, dtype="<f8")
            encoded = name.encode("utf-8")
            f.write(struct.pack("<H", len(encoded)))
            f.write(encoded)
            f.write(struct.pack("<B", arr.ndim))
            for dim in arr.shape:
                f.write(struct.pack("<I", dim))
            f.write(arr.tobytes())


def load_state(path):
    """Read a checkpoint back into a dict of name -> ndarray."""
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:4] != MAGIC:
        raise ValueError(f"bad checkpoint magic {blob[:4]!r}, expected {MAGIC!r}")
    version, count = struct.unpack_from("<II", blob, 4)
    if version != VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    offset = 12
    state = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        name = blob[offset:offset + name_len].decode("utf-8")
        offset += name_len
        (rank,) = struct.unpack_from("<B", blob, offset)
        offset += 1
        dims = struct.unpack_from(f"<{rank}I", blob, offset)
        offset += 4 * rank
        size = int(np.prod(dims, dtype=np.int64)) if rank else 1
        arr = np.frombuffer(blob, dtype="<f8", count=size, offset=offset).reshape(dims)
        offset += 8 * size
        state[name] = arr.astype(np.float64)
    if offset != len(blob):
        raise ValueError(f"trailing bytes in checkpoint after offset {offset}")
    return state
