"""Named-tensor checkpoint file: magic "SYMT", little-endian throughout.

Layout: magic (4 bytes), version u32, tensor count u32; then per tensor a
name (u16 length + UTF-8 bytes), rank u8, dims as u32 each, and the raw
float32 payload in row-major order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

__all__ = ["save_tensors", "load_tensors", "CheckpointError"]

_MAGIC = b"SYMT"
_VERSION = 1


class CheckpointError(ValueError):
    pass


def save_tensors(path: str | Path, named: dict[str, np.ndarray]) -> None:
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", _VERSION, len(named)))
        for name, arr in named.items():
            a = np.ascontiguousarray(arr, dtype="<f4")
            nb = name.encode("utf-8")
            f.write(struct.pack("<H", len(nb)))
            f.write(nb)
            f.write(struct.pack("<B", a.ndim))
            f.write(struct.pack(f"<{a.ndim}I", *a.shape))
            f.write(a.tobytes())


def load_tensors(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise CheckpointError(f"{path}: bad magic")
        version, count = struct.unpack("<II", f.read(8))
        if version != _VERSION:
            raise CheckpointError(f"{path}: unsupported version {version}")
        out: dict[str, np.ndarray] = {}
        for _ in range(count):
            (nlen,) = struct.unpack("<H", f.read(2))
            name = f.read(nlen).decode("utf-8")
            (rank,) = struct.unpack("<B", f.read(1))
            dims = struct.unpack(f"<{rank}I", f.read(4 * rank)) if rank else ()
            n = int(np.prod(dims)) if dims else 1
            payload = f.read(4 * n)
            if len(payload) != 4 * n:
                raise CheckpointError(f"{path}: truncated payload for {name!r}")
            out[name] = np.frombuffer(payload, dtype="<f4").reshape(dims).copy()
    return out
