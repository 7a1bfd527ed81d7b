"""Bias-corrected Adam over lists of parameter tensors."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import Tensor

__all__ = ["AdamState", "OptimizerError", "adam_step"]


class OptimizerError(RuntimeError):
    """Raised on non-finite gradients; optimizer state is left untouched."""


@dataclass
class AdamState:
    """First/second moment buffers plus step counter for one parameter group."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step_count: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    def _ensure(self, params: list[Tensor]) -> None:
        if not self.m:
            self.m = [np.zeros(p.dims, dtype=np.float32) for p in params]
            self.v = [np.zeros(p.dims, dtype=np.float32) for p in params]
        if len(self.m) != len(params):
            raise OptimizerError(f"state holds {len(self.m)} moments for {len(params)} params")
        for mom, p in zip(self.m, params):
            if mom.shape != p.dims:
                raise OptimizerError(f"moment shape {mom.shape} != param {p.dims}")


def adam_step(params: list[Tensor], grads: list[np.ndarray], state: AdamState) -> list[Tensor]:
    """One in-place Adam update; validates gradients before mutating anything."""
    if len(params) != len(grads):
        raise OptimizerError(f"{len(params)} params vs {len(grads)} grads")
    state._ensure(params)
    gs = []
    for p, g in zip(params, grads):
        g = np.asarray(g, dtype=np.float32)
        if g.shape != p.dims:
            raise OptimizerError(f"grad shape {g.shape} != param {p.dims}")
        if not np.all(np.isfinite(g)):
            raise OptimizerError("non-finite gradient")
        gs.append(g)
    state.step_count += 1
    t = state.step_count
    c1 = 1.0 - state.beta1**t
    c2 = 1.0 - state.beta2**t
    for p, g, m, v in zip(params, gs, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p.data -= (state.lr / c1) * m / (np.sqrt(v / c2) + state.eps)
    return params
