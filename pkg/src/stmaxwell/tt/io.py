"""Binary dump of TT cores.

Layout, all integers little-endian::

    4 bytes    magic b"TT4D"
    uint32     format version (1)
    uint32     d, number of modes
    d x uint64 mode sizes n_1..n_d
    (d+1) x uint64 ranks r_0..r_d (r_0 = r_d = 1)
    cores      float64 little-endian, core 1 first, each core in C order
               over (r_{k-1}, n_k, r_k)
"""
from __future__ import annotations

import os
import struct

import numpy as np

from .core import TTTensor

__all__ = ["MAGIC", "VERSION", "save_tt", "load_tt"]

MAGIC = b"TT4D"
VERSION = 1


def save_tt(path: str | os.PathLike, x: TTTensor) -> None:
    ranks = [1, *x.ranks, 1]
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, x.d))
        fh.write(struct.pack(f"<{x.d}Q", *x.mode_sizes))
        fh.write(struct.pack(f"<{x.d + 1}Q", *ranks))
        for c in x.cores:
            fh.write(np.ascontiguousarray(c, dtype="<f8").tobytes())


def load_tt(path: str | os.PathLike) -> TTTensor:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: not a TT dump (bad magic)")
    version, d = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    off = 12
    sizes = struct.unpack_from(f"<{d}Q", data, off)
    off += 8 * d
    ranks = struct.unpack_from(f"<{d + 1}Q", data, off)
    off += 8 * (d + 1)
    cores = []
    for k in range(d):
        shape = (ranks[k], sizes[k], ranks[k + 1])
        count = int(np.prod(shape))
        if off + 8 * count > len(data):
            raise ValueError(f"{path}: truncated core {k}")
        cores.append(np.frombuffer(data, dtype="<f8", count=count, offset=off).reshape(shape).astype(float))
        off += 8 * count
    if off != len(data):
        raise ValueError(f"{path}: {len(data) - off} trailing bytes")
    return TTTensor(tuple(cores))
