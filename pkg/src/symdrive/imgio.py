"""Binary image formats used by every stage.

RGB images are written as binary PPM (P6, 8-bit, gamma 1.0).  Depth maps and
masks are written as grayscale PFM with scale -1.0 (little-endian) and rows
stored in scanline order, top row first; readers in this package expect the
same orientation.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["write_ppm", "read_ppm", "write_pfm", "read_pfm"]


def write_ppm(path: str | Path, image: np.ndarray) -> None:
    """Write an HxWx3 float image in [0,1]; values are clamped on write-out."""
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"expected HxWx3 image, got {image.shape}")
    q = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    q = (q * 255.0 + 0.5).astype(np.uint8)
    h, w = q.shape[:2]
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode())
        f.write(q.tobytes())


def read_ppm(path: str | Path) -> np.ndarray:
    with open(path, "rb") as f:
        data = f.read()
    fields: list[bytes] = []
    pos = 0
    # header = magic, width, height, maxval; '#' starts a comment
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P6":
        raise ValueError(f"not a binary PPM: magic {fields[0]!r}")
    w, h, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    pos += 1
    pix = np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=pos)
    return pix.reshape(h, w, 3).astype(np.float32) / 255.0


def write_pfm(path: str | Path, values: np.ndarray) -> None:
    """Write an HxW float32 map, top row first, little-endian (scale -1.0)."""
    if values.ndim != 2:
        raise ValueError(f"expected HxW map, got {values.shape}")
    v = np.ascontiguousarray(values, dtype="<f4")
    h, w = v.shape
    with open(path, "wb") as f:
        f.write(f"Pf\n{w} {h}\n-1.0\n".encode())
        f.write(v.tobytes())


def read_pfm(path: str | Path) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.readline().strip()
        if magic != b"Pf":
            raise ValueError(f"not a grayscale PFM: magic {magic!r}")
        w, h = (int(t) for t in f.readline().split())
        scale = float(f.readline())
        dtype = "<f4" if scale < 0 else ">f4"
        v = np.frombuffer(f.read(w * h * 4), dtype=dtype)
    return v.reshape(h, w).astype(np.float32)
