"""Dense float32 tensors with tape-based reverse-mode differentiation.

The graph is rebuilt from scratch on every forward pass: each op returns a new
Tensor holding a closure that scatters incoming gradients to its parents.
``backward()`` runs a topological sweep from the loss.  Only first-order
gradients are supported, storage is float32 throughout, and full reductions
(mse, mean) accumulate in float64 before casting back.

Shape rules are strict: elementwise ops require identical dims, with Python
scalars as the only broadcast; anything richer is the caller's job.
"""

from __future__ import annotations

import math
import os
from typing import Callable, Iterable

import numpy as np
from scipy import ndimage

from . import _kernels

__all__ = [
    "Tensor",
    "ShapeError",
    "ConfigError",
    "matmul",
    "conv2d",
    "elementwise",
    "mse",
    "mean",
    "blur2d",
    "crop2d",
    "upsample2x",
    "concat_rows",
]


class ShapeError(ValueError):
    """Operand dimensions are inconsistent with the op's contract."""


class ConfigError(ValueError):
    """Op configuration (kernel size, step counts, ...) is invalid."""


_CHECK_FINITE = os.environ.get("SYMDRIVE_CHECK_FINITE", "") == "1"


def _f32(data) -> np.ndarray:
    arr = np.ascontiguousarray(data, dtype=np.float32)
    if _CHECK_FINITE and not np.all(np.isfinite(arr)):
        raise FloatingPointError("non-finite values in tensor data")
    return arr


class Tensor:
    """A float32 array plus optional gradient and tape linkage."""

    __slots__ = ("data", "requires_grad", "grad", "_parents", "_grad_fn", "_f64val")

    def __init__(
        self,
        data,
        requires_grad: bool = False,
        _parents: tuple["Tensor", ...] = (),
        _grad_fn: Callable[[np.ndarray], None] | None = None,
    ):
        self.data = _f32(data)
        self.requires_grad = bool(requires_grad) or any(p.requires_grad for p in _parents)
        self.grad: np.ndarray | None = None
        self._parents = _parents if self.requires_grad else ()
        self._grad_fn = _grad_fn if self.requires_grad else None
        self._f64val: float | None = None  # reductions stash their f64 accumulator

    @property
    def dims(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self._f64val is not None:
            return self._f64val
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate_grad(self, g: np.ndarray) -> None:
        if g.shape != self.data.shape:
            raise ShapeError(f"gradient shape {g.shape} != tensor shape {self.data.shape}")
        if self.grad is None:
            self.grad = g.astype(np.float32, copy=True)
        else:
            self.grad += g

    def backward(self, seed: np.ndarray | None = None) -> None:
        """Reverse sweep from this node; gradients land in ``.grad``."""
        if not self.requires_grad:
            raise RuntimeError("backward() on a tensor that requires no grad")
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in visited:
                    stack.append((p, False))
        if seed is None:
            seed = np.ones_like(self.data)
        self.accumulate_grad(np.asarray(seed, dtype=np.float32))
        for node in reversed(topo):
            if node._grad_fn is not None and node.grad is not None:
                node._grad_fn(node.grad)

    def __repr__(self) -> str:
        return f"Tensor(dims={self.dims}, requires_grad={self.requires_grad})"

    # operator sugar; scalars are the only permitted broadcast
    def __add__(self, other):
        return elementwise("add", self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return elementwise("mul", self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return elementwise("mul", self, -1.0)

    def __sub__(self, other):
        return elementwise("add", self, -other if isinstance(other, Tensor) else -float(other))

    def __rsub__(self, other):
        return elementwise("add", -self, other)

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            return _div(self, other)
        return elementwise("mul", self, 1.0 / float(other))


def _same_dims(a: Tensor, b: Tensor, op: str) -> None:
    if a.dims != b.dims:
        raise ShapeError(f"{op}: dims {a.dims} vs {b.dims}")


def elementwise(op_id: str, a: Tensor, b=None) -> Tensor:
    """Pointwise op; ``b`` may be a same-dims Tensor or a Python scalar."""
    if op_id == "add":
        if isinstance(b, Tensor):
            _same_dims(a, b, "add")
            out = Tensor(a.data + b.data, _parents=(a, b))
            if out.requires_grad:
                def back(g, a=a, b=b):
                    if a.requires_grad:
                        a.accumulate_grad(g)
                    if b.requires_grad:
                        b.accumulate_grad(g)
                out._grad_fn = back
            return out
        s = float(b)
        out = Tensor(a.data + np.float32(s), _parents=(a,))
        if out.requires_grad:
            out._grad_fn = lambda g, a=a: a.accumulate_grad(g)
        return out

    if op_id == "mul":
        if isinstance(b, Tensor):
            _same_dims(a, b, "mul")
            out = Tensor(a.data * b.data, _parents=(a, b))
            if out.requires_grad:
                def back(g, a=a, b=b):
                    if a.requires_grad:
                        a.accumulate_grad(g * b.data)
                    if b.requires_grad:
                        b.accumulate_grad(g * a.data)
                out._grad_fn = back
            return out
        s = np.float32(float(b))
        out = Tensor(a.data * s, _parents=(a,))
        if out.requires_grad:
            out._grad_fn = lambda g, a=a, s=s: a.accumulate_grad(g * s)
        return out

    if b is not None:
        raise ConfigError(f"{op_id} is unary")

    if op_id == "sigmoid":
        y = 1.0 / (1.0 + np.exp(-a.data))
        out = Tensor(y, _parents=(a,))
        if out.requires_grad:
            out._grad_fn = lambda g, a=a, y=y: a.accumulate_grad(g * (y * (1.0 - y)))
        return out

    if op_id == "silu":
        sig = 1.0 / (1.0 + np.exp(-a.data))
        out = Tensor(a.data * sig, _parents=(a,))
        if out.requires_grad:
            def back(g, a=a, sig=sig):
                a.accumulate_grad(g * (sig * (1.0 + a.data * (1.0 - sig))))
            out._grad_fn = back
        return out

    if op_id == "exp":
        y = np.exp(a.data)
        out = Tensor(y, _parents=(a,))
        if out.requires_grad:
            out._grad_fn = lambda g, a=a, y=y: a.accumulate_grad(g * y)
        return out

    if op_id == "abs":
        out = Tensor(np.abs(a.data), _parents=(a,))
        if out.requires_grad:
            out._grad_fn = lambda g, a=a: a.accumulate_grad(g * np.sign(a.data))
        return out

    raise ConfigError(f"unknown elementwise op {op_id!r}")


def _div(a: Tensor, b: Tensor) -> Tensor:
    _same_dims(a, b, "div")
    inv = 1.0 / b.data
    out = Tensor(a.data * inv, _parents=(a, b))
    if out.requires_grad:
        def back(g, a=a, b=b, inv=inv):
            if a.requires_grad:
                a.accumulate_grad(g * inv)
            if b.requires_grad:
                b.accumulate_grad(-g * a.data * inv * inv)
        out._grad_fn = back
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """2-D matrix product; backward is g @ b.T and a.T @ g."""
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError(f"matmul expects 2-D operands, got {a.dims} and {b.dims}")
    if a.dims[1] != b.dims[0]:
        raise ShapeError(f"matmul inner dims: {a.dims} x {b.dims}")
    out = Tensor(a.data @ b.data, _parents=(a, b))
    if out.requires_grad:
        def back(g, a=a, b=b):
            if a.requires_grad:
                a.accumulate_grad(g @ b.data.T)
            if b.requires_grad:
                b.accumulate_grad(a.data.T @ g)
        out._grad_fn = back
    return out


def conv2d(x: Tensor, kernel: Tensor, bias: Tensor | None = None, stride: int = 1, padding: int = 0) -> Tensor:
    """Cross-correlation of NCHW input with OIKK kernel, zero padding.

    Differentiable w.r.t. input, kernel, and bias.  Kernel must be square with
    odd side.  Implemented as im2col + sgemm; the patch matrix is retained for
    the backward pass.
    """
    if x.data.ndim != 4 or kernel.data.ndim != 4:
        raise ShapeError(f"conv2d expects NCHW and OIKK, got {x.dims} and {kernel.dims}")
    o_ch, i_ch, kh, kw = kernel.dims
    if kh != kw:
        raise ConfigError(f"kernel must be square, got {kh}x{kw}")
    if kh % 2 == 0:
        raise ConfigError(f"kernel side must be odd, got {kh}")
    if x.dims[1] != i_ch:
        raise ShapeError(f"channel mismatch: input {x.dims[1]} vs kernel {i_ch}")
    if bias is not None and bias.dims != (o_ch,):
        raise ShapeError(f"bias dims {bias.dims} != ({o_ch},)")
    b_n, _, h, w = x.dims
    oh = (h + 2 * padding - kh) // stride + 1
    ow = (w + 2 * padding - kw) // stride + 1
    if oh <= 0 or ow <= 0:
        raise ShapeError(f"empty conv output for input {x.dims}, kernel {kh}, stride {stride}")
    if padding:
        xp = np.pad(x.data, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    else:
        xp = x.data
    col = _kernels.im2col(xp, oh, ow, kh, stride)
    kmat = kernel.data.reshape(o_ch, i_ch * kh * kw)
    y = col @ kmat.T
    if bias is not None:
        y += bias.data
    y = np.ascontiguousarray(y.reshape(b_n, oh, ow, o_ch).transpose(0, 3, 1, 2))
    parents = (x, kernel) if bias is None else (x, kernel, bias)
    out = Tensor(y, _parents=parents)
    if out.requires_grad:
        xp_shape = xp.shape

        def back(g, x=x, kernel=kernel, bias=bias, col=col, kmat=kmat):
            gcol = np.ascontiguousarray(g.transpose(0, 2, 3, 1)).reshape(-1, o_ch)
            if kernel.requires_grad:
                kernel.accumulate_grad((gcol.T @ col).reshape(kernel.dims))
            if bias is not None and bias.requires_grad:
                bias.accumulate_grad(gcol.sum(axis=0, dtype=np.float64).astype(np.float32))
            if x.requires_grad:
                dcol = gcol @ kmat
                dxp = _kernels.col2im(dcol, xp_shape, oh, ow, kh, stride)
                if padding:
                    dxp = dxp[:, :, padding:-padding, padding:-padding]
                x.accumulate_grad(dxp)

        out._grad_fn = back
    return out


def mse(pred: Tensor, target: Tensor) -> Tensor:
    """Mean squared difference as a scalar tensor; accumulates in float64."""
    _same_dims(pred, target, "mse")
    diff = pred.data.astype(np.float64) - target.data.astype(np.float64)
    acc = float(np.mean(diff * diff))
    out = Tensor(np.array(acc, dtype=np.float32), _parents=(pred, target))
    out._f64val = acc
    if out.requires_grad:
        n = pred.data.size

        def back(g, pred=pred, target=target, diff=diff):
            scale = 2.0 * float(g.reshape(-1)[0]) / n
            d = (diff * scale).astype(np.float32)
            if pred.requires_grad:
                pred.accumulate_grad(d)
            if target.requires_grad:
                target.accumulate_grad(-d)

        out._grad_fn = back
    return out


def mean(x: Tensor) -> Tensor:
    """Full reduction to a scalar tensor; accumulates in float64."""
    acc = float(np.mean(x.data, dtype=np.float64))
    out = Tensor(np.array(acc, dtype=np.float32), _parents=(x,))
    out._f64val = acc
    if out.requires_grad:
        n = x.data.size
        out._grad_fn = lambda g, x=x: x.accumulate_grad(
            np.full(x.dims, float(g.reshape(-1)[0]) / n, dtype=np.float32)
        )
    return out


def blur2d(x: Tensor, kernel1d: np.ndarray) -> Tensor:
    """Separable correlation along the last two axes with a symmetric 1-D kernel.

    Zero padding; because the kernel is symmetric the backward pass is the
    same blur applied to the incoming gradient.
    """
    k = np.asarray(kernel1d, dtype=np.float32)
    if k.ndim != 1 or len(k) % 2 == 0:
        raise ConfigError("blur kernel must be 1-D with odd length")
    if not np.allclose(k, k[::-1]):
        raise ConfigError("blur kernel must be symmetric")

    def apply(arr: np.ndarray) -> np.ndarray:
        y = ndimage.correlate1d(arr, k, axis=-1, mode="constant")
        return ndimage.correlate1d(y, k, axis=-2, mode="constant")

    out = Tensor(apply(x.data), _parents=(x,))
    if out.requires_grad:
        out._grad_fn = lambda g, x=x: x.accumulate_grad(apply(g))
    return out


def crop2d(x: Tensor, margin: int) -> Tensor:
    """Drop ``margin`` pixels from each side of the last two axes."""
    if margin == 0:
        return x
    h, w = x.dims[-2], x.dims[-1]
    if 2 * margin >= h or 2 * margin >= w:
        raise ShapeError(f"margin {margin} too large for dims {x.dims}")
    sl = (Ellipsis, slice(margin, h - margin), slice(margin, w - margin))
    out = Tensor(np.ascontiguousarray(x.data[sl]), _parents=(x,))
    if out.requires_grad:
        def back(g, x=x):
            full = np.zeros(x.dims, dtype=np.float32)
            full[sl] = g
            x.accumulate_grad(full)
        out._grad_fn = back
    return out


def upsample2x(x: Tensor) -> Tensor:
    """Nearest-neighbour 2x upsampling of NCHW; backward sums 2x2 blocks."""
    if x.data.ndim != 4:
        raise ShapeError(f"upsample2x expects NCHW, got {x.dims}")
    y = x.data.repeat(2, axis=2).repeat(2, axis=3)
    out = Tensor(y, _parents=(x,))
    if out.requires_grad:
        b, c, h, w = x.dims

        def back(g, x=x):
            x.accumulate_grad(g.reshape(b, c, h, 2, w, 2).sum(axis=(3, 5)))

        out._grad_fn = back
    return out


def concat_rows(tensors: Iterable[Tensor]) -> Tensor:
    """Concatenate along axis 0; backward splits the gradient back."""
    ts = list(tensors)
    if not ts:
        raise ShapeError("concat_rows of nothing")
    trail = ts[0].dims[1:]
    for t in ts:
        if t.dims[1:] != trail:
            raise ShapeError(f"trailing dims differ: {t.dims} vs {ts[0].dims}")
    out = Tensor(np.concatenate([t.data for t in ts], axis=0), _parents=tuple(ts))
    if out.requires_grad:
        offsets = np.cumsum([0] + [t.dims[0] for t in ts])

        def back(g, ts=ts, offsets=offsets):
            for t, lo, hi in zip(ts, offsets[:-1], offsets[1:]):
                if t.requires_grad:
                    t.accumulate_grad(np.ascontiguousarray(g[lo:hi]))

        out._grad_fn = back
    return out
