"""Numba kernels behind conv2d: patch extraction and its scatter-add inverse.

Kernels are single-threaded so results are bit-reproducible; the surrounding
GEMM calls carry the arithmetic load.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["im2col", "col2im"]


@njit(cache=True)
def _im2col_nb(xp, col, oh, ow, k, stride):
    b_n, c_n = xp.shape[0], xp.shape[1]
    for b in range(b_n):
        for i in range(oh):
            for j in range(ow):
                row = (b * oh + i) * ow + j
                i0 = i * stride
                j0 = j * stride
                idx = 0
                for c in range(c_n):
                    for di in range(k):
                        for dj in range(k):
                            col[row, idx] = xp[b, c, i0 + di, j0 + dj]
                            idx += 1


@njit(cache=True)
def _col2im_nb(col, xp, oh, ow, k, stride):
    b_n, c_n = xp.shape[0], xp.shape[1]
    for b in range(b_n):
        for i in range(oh):
            for j in range(ow):
                row = (b * oh + i) * ow + j
                i0 = i * stride
                j0 = j * stride
                idx = 0
                for c in range(c_n):
                    for di in range(k):
                        for dj in range(k):
                            xp[b, c, i0 + di, j0 + dj] += col[row, idx]
                            idx += 1


def im2col(xp: np.ndarray, oh: int, ow: int, k: int, stride: int) -> np.ndarray:
    """Padded NCHW input -> (B*OH*OW, C*K*K) patch matrix."""
    b, c = xp.shape[0], xp.shape[1]
    col = np.empty((b * oh * ow, c * k * k), dtype=np.float32)
    _im2col_nb(xp, col, oh, ow, k, stride)
    return col


def col2im(col: np.ndarray, xp_shape: tuple, oh: int, ow: int, k: int, stride: int) -> np.ndarray:
    """Scatter-add patch-matrix gradients back onto the padded input grid."""
    xp = np.zeros(xp_shape, dtype=np.float32)
    _col2im_nb(col, xp, oh, ow, k, stride)
    return xp
