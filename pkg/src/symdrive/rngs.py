"""Deterministic random streams.

Every stochastic choice in the pipeline draws from a Philox counter-based
generator keyed by (global seed, purpose string, index...).  Streams for
distinct keys are independent, and the same key always reproduces the same
sequence regardless of call order elsewhere in the program.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["stream"]


def _key64(parts: tuple) -> tuple[int, int]:
    h = hashlib.blake2b(digest_size=16)
    for p in parts:
        h.update(repr(p).encode())
        h.update(b"\x1f")
    d = h.digest()
    return int.from_bytes(d[:8], "little"), int.from_bytes(d[8:], "little")


def stream(seed: int, *key_parts) -> np.random.Generator:
    """Generator keyed by (seed, *key_parts); same key -> same sequence."""
    k0, k1 = _key64((int(seed),) + tuple(key_parts))
    return np.random.Generator(np.random.Philox(key=(np.uint64(k0), np.uint64(k1))))
