"""Random probe points over the embedding space.

A probe is drawn coordinate-wise on a random m-dimension subset: triangular
(apex at the per-dimension median) by default, Gaussian or uniform for
ablations. Coordinates are independent, so only the m selected dimensions are
ever sampled. The fixed per-iteration draw order is: subset indices first,
then the m coordinates in subset order — the serial reference path and the
parallel engine therefore consume identical stream values.
"""
from __future__ import annotations

import enum
import math

import numpy as np
from numba import njit

from .errors import ConfigError, DomainError
from .rng import PURPOSE_ITERATION, CounterStream, _uniform53


class DistributionKind(enum.IntEnum):
    TRIANGULAR = 0
    GAUSSIAN = 1
    UNIFORM = 2

    @classmethod
    def parse(cls, name: str) -> "DistributionKind":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ConfigError(f"unknown distribution kind: {name!r} "
                              f"(expected triangular, gaussian, or uniform)") from None

    @property
    def cli_name(self) -> str:
        return self.name.lower()


@njit(cache=True)
def _tri_icdf(u, lo, mode, hi):
    # Inverse CDF of the triangular density with apex at `mode`. The clamp
    # keeps rounding at the support edges from escaping [lo, hi].
    span = hi - lo
    if span <= 0.0:
        return lo
    cut = (mode - lo) / span
    if u <= cut:
        x = lo + np.sqrt(u * span * (mode - lo))
    else:
        x = hi - np.sqrt((1.0 - u) * span * (hi - mode))
    return min(max(x, lo), hi)


# Rational approximation of the standard normal quantile (Acklam's
# coefficients, abs error < 1.2e-9 — far inside what the sampler needs).
_NQ_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
         1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_NQ_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
         6.680131188771972e+01, -1.328068155288572e+01)
_NQ_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
         -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_NQ_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
         3.754408661907416e+00)
_NQ_PLOW = 0.02425
_U_TINY = 1.1102230246251565e-16  # 2**-53


_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@njit(cache=True)
def _normal_quantile_lower(u):
    # u in (0, 0.5]; x <= 0, so the erfc argument is non-negative and the
    # Newton residual is cancellation-free.
    if u < _NQ_PLOW:
        q = np.sqrt(-2.0 * np.log(u))
        x = (((((_NQ_C[0] * q + _NQ_C[1]) * q + _NQ_C[2]) * q + _NQ_C[3]) * q
              + _NQ_C[4]) * q + _NQ_C[5]) / \
            ((((_NQ_D[0] * q + _NQ_D[1]) * q + _NQ_D[2]) * q + _NQ_D[3]) * q + 1.0)
    else:
        q = u - 0.5
        r = q * q
        x = (((((_NQ_A[0] * r + _NQ_A[1]) * r + _NQ_A[2]) * r + _NQ_A[3]) * r
              + _NQ_A[4]) * r + _NQ_A[5]) * q / \
            (((((_NQ_B[0] * r + _NQ_B[1]) * r + _NQ_B[2]) * r + _NQ_B[3]) * r
              + _NQ_B[4]) * r + 1.0)
    # One Newton step takes the 1e-9 approximation to machine precision.
    err = 0.5 * math.erfc(-x / _SQRT2) - u
    x -= err / (np.exp(-0.5 * x * x) * _INV_SQRT_2PI)
    return x


@njit(cache=True)
def _normal_quantile(u):
    if u < _U_TINY:
        u = _U_TINY
    elif u > 1.0 - _U_TINY:
        u = 1.0 - _U_TINY
    if u > 0.5:
        return -_normal_quantile_lower(1.0 - u)
    return _normal_quantile_lower(u)


@njit(cache=True)
def _coord_from_uniform(kind, u, lo, med, hi, mean, std):
    if kind == 0:  # triangular
        return _tri_icdf(u, lo, med, hi)
    if kind == 1:  # gaussian; zero spread degenerates to the mean
        if std <= 0.0:
            return mean
        return mean + std * _normal_quantile(u)
    # uniform; lo == hi degenerates to lo, clamp guards edge rounding
    return min(max(lo + u * (hi - lo), lo), hi)


@njit(cache=True)
def _fill_subset_and_probe(seed, t, n_dims, m, kind, mins, meds, maxs, means,
                           stds, subset, probe):
    """Consume iteration t's stream: subset by rejection, then coordinates.

    Returns the number of uniforms consumed so callers can keep drawing from
    the same stream.
    """
    n = 0
    for j in range(m):
        while True:
            u = _uniform53(seed, PURPOSE_ITERATION, t, n)
            n += 1
            idx = int(u * n_dims)
            if idx >= n_dims:  # guard the u -> index rounding edge
                idx = n_dims - 1
            taken = False
            for jj in range(j):
                if subset[jj] == idx:
                    taken = True
                    break
            if not taken:
                subset[j] = idx
                break
    for j in range(m):
        d = subset[j]
        u = _uniform53(seed, PURPOSE_ITERATION, t, n)
        n += 1
        probe[j] = _coord_from_uniform(kind, u, mins[d], meds[d], maxs[d],
                                       means[d], stds[d])
    return n


@njit(cache=True)
def _fill_coordinate_samples(seed, kind, lo, med, hi, mean, std, out):
    """Independent single-dimension draws; sample i reads stream index i."""
    for i in range(out.shape[0]):
        u = _uniform53(seed, PURPOSE_ITERATION, i, 0)
        out[i] = _coord_from_uniform(kind, u, lo, med, hi, mean, std)


def triangular_inverse_cdf(u: float, lo: float, mode: float, hi: float) -> float:
    """Map u in [0,1] through the triangular inverse CDF on [lo, hi]."""
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"u must lie in [0, 1], got {u}")
    if not lo <= mode <= hi:
        raise DomainError(f"need lo <= mode <= hi, got ({lo}, {mode}, {hi})")
    return float(_tri_icdf(u, lo, mode, hi))


def sample_triangular(lo: float, mode: float, hi: float, n: int, seed: int) -> np.ndarray:
    """n independent triangular draws, vectorized for diagnostics and tests."""
    if not lo <= mode <= hi:
        raise DomainError(f"need lo <= mode <= hi, got ({lo}, {mode}, {hi})")
    out = np.empty(n, dtype=np.float64)
    _fill_coordinate_samples(np.uint64(seed), int(DistributionKind.TRIANGULAR),
                             lo, mode, hi, 0.0, 0.0, out)
    return out


def draw_dim_subset(n_dims: int, m: int, rng: CounterStream) -> np.ndarray:
    """m distinct dimension indices in [0, n_dims), uniform over subsets."""
    if not 1 <= m <= n_dims:
        raise ConfigError(f"need 1 <= m <= M, got m={m} with M={n_dims}")
    subset = np.empty(m, dtype=np.int64)
    for j in range(m):
        while True:
            idx = int(rng.next_uniform() * n_dims)
            if idx >= n_dims:
                idx = n_dims - 1
            if idx not in subset[:j]:
                subset[j] = idx
                break
    return subset


def draw_probe(stats, subset: np.ndarray, kind: DistributionKind,
               rng: CounterStream) -> np.ndarray:
    """One probe point: coordinate j follows `kind` on dimension subset[j]."""
    probe = np.empty(len(subset), dtype=np.float64)
    for j, d in enumerate(subset):
        u = rng.next_uniform()
        probe[j] = _coord_from_uniform(int(kind), u, stats.mins[d],
                                       stats.medians[d], stats.maxs[d],
                                       stats.means[d], stats.stds[d])
    return probe
