"""Sampling-distribution diagnostics: KS statistics and check-dist data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding_store import DimStats, compute_dim_stats
from .errors import DomainError
from .sampling import DistributionKind, _fill_coordinate_samples


def triangular_cdf(x, lo: float, mode: float, hi: float):
    """Analytic CDF of the triangular density with apex at `mode`."""
    x = np.asarray(x, dtype=np.float64)
    span = hi - lo
    if span <= 0:
        return (x >= lo).astype(np.float64)
    out = np.zeros_like(x)
    left = (x > lo) & (x < mode)
    out[left] = (x[left] - lo) ** 2 / (span * (mode - lo)) if mode > lo else 0.0
    right = (x >= mode) & (x < hi)
    out[right] = 1.0 - (hi - x[right]) ** 2 / (span * (hi - mode)) if hi > mode \
        else 1.0
    out[x >= hi] = 1.0
    return out


def ks_statistic(samples: np.ndarray, cdf) -> float:
    """One-sample Kolmogorov-Smirnov statistic against an analytic CDF."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = x.shape[0]
    f = np.asarray(cdf(x), dtype=np.float64)
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - f), np.max(f - (grid - 1.0 / n))))


def ks_statistic_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample KS statistic (max gap between empirical CDFs)."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.shape[0]
    fb = np.searchsorted(b, grid, side="right") / b.shape[0]
    return float(np.max(np.abs(fa - fb)))


def sample_dimension(stats: DimStats, dim: int, kind: DistributionKind,
                     n_samples: int, seed: int) -> np.ndarray:
    """Independent draws of one embedding dimension under `kind`."""
    if not 0 <= dim < stats.n_dims:
        raise DomainError(f"dimension {dim} out of range for M={stats.n_dims}")
    out = np.empty(n_samples, dtype=np.float64)
    _fill_coordinate_samples(np.uint64(seed), int(kind), stats.mins[dim],
                             stats.medians[dim], stats.maxs[dim],
                             stats.means[dim], stats.stds[dim], out)
    return out


@dataclass
class DistCheck:
    dim: int
    kind: DistributionKind
    data: np.ndarray
    samples: np.ndarray
    ks: float
    frac_below_median: float


def check_distribution(matrix: np.ndarray, dim: int, kind: DistributionKind,
                       n_samples: int, seed: int) -> DistCheck:
    """Compare one real embedding dimension with draws from the sampler."""
    stats = compute_dim_stats(matrix)
    if not 0 <= dim < stats.n_dims:
        raise DomainError(f"dimension {dim} out of range for M={stats.n_dims}")
    data = matrix[:, dim].astype(np.float64)
    samples = sample_dimension(stats, dim, kind, n_samples, seed)
    ks = ks_statistic_two_sample(data, samples) if n_samples > 0 else float("nan")
    frac = float(np.mean(samples < stats.medians[dim])) if n_samples > 0 \
        else float("nan")
    return DistCheck(dim=dim, kind=kind, data=data, samples=samples, ks=ks,
                     frac_below_median=frac)
