"""Counter-based random streams (Philox 4x32-10).

Every draw is a pure function of (seed, purpose, stream index, draw number),
so a worker can produce any draw without shared state: two runs with the same
seed are bit-identical no matter how iterations are scheduled. Purpose 0 feeds
the per-example score initialization, purpose 1 feeds the per-iteration
sampling; iteration t always reads the stream indexed by t.
"""
from __future__ import annotations

import numpy as np
from numba import njit

PURPOSE_INIT = 0
PURPOSE_ITERATION = 1

# Round multipliers and Weyl key increments of the Philox 4x32 cipher.
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_SHIFT11 = np.uint64(11)

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True)
def _philox4x32(c0, c1, c2, c3, k0, k1):
    """One 10-round Philox 4x32 block. All args/results are uint64-held u32."""
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0 = p0 >> _SHIFT32
        lo0 = p0 & _MASK32
        hi1 = p1 >> _SHIFT32
        lo1 = p1 & _MASK32
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


@njit(cache=True)
def _uniform53(seed, purpose, index, n):
    """Draw n of stream (seed, purpose, index) as a double in [0, 1).

    Counter layout: (n, purpose, index_lo, index_hi); key is the split seed.
    53 bits of one block feed the mantissa, so 0 is possible and 1 is not.
    """
    s = np.uint64(seed)
    k0 = s & _MASK32
    k1 = (s >> _SHIFT32) & _MASK32
    idx = np.uint64(index)
    w0, w1, _, _ = _philox4x32(
        np.uint64(n) & _MASK32,
        np.uint64(purpose) & _MASK32,
        idx & _MASK32,
        (idx >> _SHIFT32) & _MASK32,
        k0,
        k1,
    )
    bits = (w0 << _SHIFT32) | w1
    return np.float64(bits >> _SHIFT11) * _INV_2_53


@njit(cache=True)
def _fill_init_scores(seed, out):
    """Per-example U[0,1) initialization; example i reads its own stream."""
    for i in range(out.shape[0]):
        out[i] = _uniform53(seed, PURPOSE_INIT, i, 0)


def init_scores(n_examples: int, seed: int) -> np.ndarray:
    """Random score initialization vector (one U[0,1) draw per example)."""
    out = np.empty(n_examples, dtype=np.float64)
    _fill_init_scores(np.uint64(seed), out)
    return out


class CounterStream:
    """Sequential cursor over one (seed, purpose, index) stream."""

    __slots__ = ("seed", "purpose", "index", "n")

    def __init__(self, seed: int, purpose: int, index: int):
        # held as uint64 so the full unsigned seed range crosses into the jit
        self.seed = np.uint64(seed)
        self.purpose = purpose
        self.index = index
        self.n = 0

    def next_uniform(self) -> float:
        u = float(_uniform53(self.seed, self.purpose, self.index, self.n))
        self.n += 1
        return u


def iteration_stream(seed: int, t: int) -> CounterStream:
    """The stream consumed by sample-and-score iteration t."""
    return CounterStream(seed, PURPOSE_ITERATION, t)
