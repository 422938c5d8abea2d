"""Importance scoring: coverage rewards and redundancy penalties.

Each of T independent iterations draws a probe point in a random m-dimension
slice, credits +1 coverage to the closest example (projected L1), and
subtracts a unit of penalty mass spread over that example's alpha nearest
neighbors in the same slice, weighted by distance**(-beta) and L1-normalized.
Scores accumulate in double precision on top of an optional per-example
U[0,1) initialization.

Parallel determinism: iterations are grouped into fixed-size blocks
(`BLOCK_ITERS`, a constant of the output contract). Workers compute per-block
partial vectors in any order; the final reduction folds blocks in ascending
block index, so results are bit-identical for any worker count.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange

from .embedding_store import DimStats, compute_dim_stats, validate_matrix
from .errors import ConfigError, ValidationError
from .rng import CounterStream, init_scores
from .sampling import (DistributionKind, _fill_subset_and_probe,
                       draw_dim_subset, draw_probe)

#: Iterations per reduction block. Changing this reassociates the float
#: accumulation and breaks bit-reproducibility of existing score files.
BLOCK_ITERS = 4096


def _default_workers() -> int:
    return os.cpu_count() or 1


@dataclass
class ScoreConfig:
    """All scoring tunables; defaults reproduce the standard configuration."""

    iterations: int = 1_000_000
    sample_dims: int = 2
    neighbors: int = 1_000
    distance_exponent: float = 4.0
    kind: DistributionKind = DistributionKind.TRIANGULAR
    seed: int = 0
    workers: int = field(default_factory=_default_workers)
    enable_redundancy: bool = True
    enable_random_init: bool = True
    distance_epsilon: float = 1e-12

    def validate(self, n_dims: int | None = None) -> None:
        if self.iterations < 0:
            raise ConfigError(f"iterations must be >= 0, got {self.iterations}")
        if self.sample_dims < 1:
            raise ConfigError(f"sample_dims must be >= 1, got {self.sample_dims}")
        if self.neighbors < 0:
            raise ConfigError(f"neighbors must be >= 0, got {self.neighbors}")
        if not self.distance_exponent > 0:
            raise ConfigError(
                f"distance_exponent must be > 0, got {self.distance_exponent}")
        if not self.distance_epsilon > 0:
            raise ConfigError(
                f"distance_epsilon must be > 0, got {self.distance_epsilon}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if not isinstance(self.kind, DistributionKind):
            raise ConfigError(f"kind must be a DistributionKind, got {self.kind!r}")
        if n_dims is not None and self.sample_dims > n_dims:
            raise ConfigError(
                f"sample_dims={self.sample_dims} exceeds embedding dims M={n_dims}")


@dataclass
class IterationDelta:
    """Sparse score update of one iteration: +1 coverage, -1 penalty mass."""

    coverage_index: int
    redundancy_indices: np.ndarray
    redundancy_penalties: np.ndarray


def nearest_example(probe: np.ndarray, matrix: np.ndarray,
                    subset: np.ndarray) -> int:
    """Index of the example closest to the probe in projected L1 distance.

    Ties resolve to the lowest index.
    """
    dist = np.zeros(matrix.shape[0], dtype=np.float64)
    for j, d in enumerate(subset):
        dist += np.abs(matrix[:, d].astype(np.float64) - probe[j])
    return int(np.argmin(dist))


def k_nearest_neighbors(k: int, matrix: np.ndarray, subset: np.ndarray,
                        alpha: int):
    """The min(alpha, N-1) nearest examples to example k in the slice.

    Returns (indices, distances) sorted by (distance, index) ascending;
    example k itself is excluded.
    """
    n = matrix.shape[0]
    cap = min(alpha, n - 1)
    if cap <= 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    dist = np.zeros(n, dtype=np.float64)
    for j, d in enumerate(subset):
        col = matrix[:, d].astype(np.float64)
        dist += np.abs(col - col[k])
    order = np.lexsort((np.arange(n), dist))
    order = order[order != k][:cap]
    return order.astype(np.int64), dist[order]


def redundancy_scores(indices: np.ndarray, distances: np.ndarray, beta: float,
                      epsilon: float):
    """L1-normalized distance**(-beta) penalties over a neighbor list.

    Distances are clamped to epsilon before exponentiation so exact
    duplicates soak up the penalty mass instead of overflowing, and each
    raw weight is scaled by the clamped minimum distance (which cancels
    under normalization) to keep intermediates bounded for any beta.
    """
    if len(indices) == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    clamped = np.maximum(np.asarray(distances, dtype=np.float64), epsilon)
    raw = np.power(clamped / clamped.min(), -beta)
    penalties = raw * (1.0 / raw.sum())
    return np.asarray(indices, dtype=np.int64), penalties


def run_iteration(matrix: np.ndarray, stats: DimStats, config: ScoreConfig,
                  rng: CounterStream) -> IterationDelta:
    """One sample-and-score iteration, materialized as a sparse delta."""
    subset = draw_dim_subset(matrix.shape[1], config.sample_dims, rng)
    probe = draw_probe(stats, subset, config.kind, rng)
    k = nearest_example(probe, matrix, subset)
    if config.enable_redundancy and config.neighbors > 0:
        idx, dist = k_nearest_neighbors(k, matrix, subset, config.neighbors)
        idx, pen = redundancy_scores(idx, dist, config.distance_exponent,
                                     config.distance_epsilon)
    else:
        idx = np.empty(0, dtype=np.int64)
        pen = np.empty(0, dtype=np.float64)
    return IterationDelta(coverage_index=k, redundancy_indices=idx,
                          redundancy_penalties=pen)


# ---------------------------------------------------------------------------
# Optimized engine: numba kernel over a column-contiguous transposed matrix.
# ---------------------------------------------------------------------------

@njit(cache=True)
def _select_smallest(ds, ix, size, cap):
    """Partition parallel arrays so slots [0, cap) hold the cap smallest
    (distance, index) pairs under lexicographic order (unordered within).

    Pairs are distinct (indices are), so strict-compare Hoare partitioning
    terminates; the selected set is exact regardless of partition order.
    """
    lo = 0
    hi = size - 1
    while lo < hi:
        mid = (lo + hi) >> 1
        # Median-of-3 pivot, moved to mid.
        if ds[mid] < ds[lo] or (ds[mid] == ds[lo] and ix[mid] < ix[lo]):
            ds[lo], ds[mid] = ds[mid], ds[lo]
            ix[lo], ix[mid] = ix[mid], ix[lo]
        if ds[hi] < ds[lo] or (ds[hi] == ds[lo] and ix[hi] < ix[lo]):
            ds[lo], ds[hi] = ds[hi], ds[lo]
            ix[lo], ix[hi] = ix[hi], ix[lo]
        if ds[hi] < ds[mid] or (ds[hi] == ds[mid] and ix[hi] < ix[mid]):
            ds[mid], ds[hi] = ds[hi], ds[mid]
            ix[mid], ix[hi] = ix[hi], ix[mid]
        pd = ds[mid]
        pi = ix[mid]
        i = lo
        j = hi
        while i <= j:
            while ds[i] < pd or (ds[i] == pd and ix[i] < pi):
                i += 1
            while pd < ds[j] or (pd == ds[j] and pi < ix[j]):
                j -= 1
            if i <= j:
                ds[i], ds[j] = ds[j], ds[i]
                ix[i], ix[j] = ix[j], ix[i]
                i += 1
                j -= 1
        if cap - 1 <= j:
            hi = j
        elif cap - 1 >= i:
            lo = i
        else:
            break


@njit(cache=True)
def _inv_power(r, beta):
    # r >= 1; returns r ** (-beta) with a cheap path for small integer beta.
    ib = int(beta)
    if beta == ib and 1 <= ib <= 8:
        acc = r
        for _ in range(ib - 1):
            acc *= r
        return 1.0 / acc
    return r ** (-beta)


#: Scan chunk length: the distance buffer (8 B each) stays L1-resident.
_SCAN_CHUNK = 2048


@njit(cache=True)
def _dist_chunk(zt, subset, probe, m, c0, c1, dbuf):
    # Projected L1 distances for examples [c0, c1): identical j-order f64
    # arithmetic to the plain numpy path, but branch-free so it vectorizes.
    if m == 1:
        col0 = zt[subset[0]]
        p0 = probe[0]
        for ii in range(c1 - c0):
            dbuf[ii] = abs(np.float64(col0[c0 + ii]) - p0)
    elif m == 2:
        col0 = zt[subset[0]]
        col1 = zt[subset[1]]
        p0 = probe[0]
        p1 = probe[1]
        for ii in range(c1 - c0):
            dbuf[ii] = abs(np.float64(col0[c0 + ii]) - p0) + \
                abs(np.float64(col1[c0 + ii]) - p1)
    else:
        for ii in range(c1 - c0):
            dbuf[ii] = 0.0
        for j in range(m):
            col = zt[subset[j]]
            pj = probe[j]
            for ii in range(c1 - c0):
                dbuf[ii] += abs(np.float64(col[c0 + ii]) - pj)


@njit(cache=True)
def _chunk_min(dbuf, n):
    # Branchless 4-lane min reduction (min of floats is order-insensitive).
    m0 = np.inf
    m1 = np.inf
    m2 = np.inf
    m3 = np.inf
    ii = 0
    while ii + 4 <= n:
        m0 = min(m0, dbuf[ii])
        m1 = min(m1, dbuf[ii + 1])
        m2 = min(m2, dbuf[ii + 2])
        m3 = min(m3, dbuf[ii + 3])
        ii += 4
    while ii < n:
        m0 = min(m0, dbuf[ii])
        ii += 1
    return min(min(m0, m1), min(m2, m3))


@njit(cache=True, parallel=True)
def _score_blocks(zt, mins, meds, maxs, means, stds, kind, m, alpha, beta,
                  eps, use_redundancy, seed, first_block, n_blocks,
                  total_iters, partials):
    n_dims = zt.shape[0]
    n_examples = zt.shape[1]
    for bi in prange(n_blocks):
        acc = partials[bi]
        acc[:] = 0.0
        block = first_block + bi
        subset = np.empty(m, np.int64)
        probe = np.empty(m, np.float64)
        point = np.empty(m, np.float64)
        dbuf = np.empty(_SCAN_CHUNK, np.float64)
        cap = alpha
        if cap > n_examples - 1:
            cap = n_examples - 1
        pool = min(2 * cap, n_examples - 1) if cap > 0 else 1
        cand_d = np.empty(pool, np.float64)
        cand_i = np.empty(pool, np.int64)
        raw = np.empty(pool, np.float64)
        t_lo = block * BLOCK_ITERS
        t_hi = min(total_iters, t_lo + BLOCK_ITERS)
        for t in range(t_lo, t_hi):
            _fill_subset_and_probe(seed, t, n_dims, m, kind, mins, meds, maxs,
                                   means, stds, subset, probe)
            # Coverage argmin: chunk minima first, then locate the first index
            # inside an improving chunk — same result as a strict-< scan.
            best = np.inf
            k = 0
            for c0 in range(0, n_examples, _SCAN_CHUNK):
                c1 = min(c0 + _SCAN_CHUNK, n_examples)
                _dist_chunk(zt, subset, probe, m, c0, c1, dbuf)
                mn = _chunk_min(dbuf, c1 - c0)
                if mn < best:
                    best = mn
                    for ii in range(c1 - c0):
                        if dbuf[ii] == mn:
                            k = c0 + ii
                            break
            acc[k] += 1.0
            if not use_redundancy or cap <= 0:
                continue
            # Redundancy: the cap lexicographically smallest (distance, index)
            # pairs around k, via threshold filter + quickselect compaction.
            # Candidates not beating the current cap-th boundary can never be
            # selected, so the final set is exact; order within it is free
            # because penalties go to distinct indices.
            for j in range(m):
                point[j] = np.float64(zt[subset[j], k])
            size = 0
            td = np.inf  # boundary pair (td, ti): worst kept so far
            ti = np.int64(n_examples)
            for c0 in range(0, n_examples, _SCAN_CHUNK):
                c1 = min(c0 + _SCAN_CHUNK, n_examples)
                _dist_chunk(zt, subset, point, m, c0, c1, dbuf)
                for ii in range(c1 - c0):
                    i = c0 + ii
                    if i == k:
                        continue
                    dist = dbuf[ii]
                    if dist < td or (dist == td and i < ti):
                        if size == pool:
                            _select_smallest(cand_d, cand_i, size, cap)
                            size = cap
                            td = cand_d[0]
                            ti = cand_i[0]
                            for l in range(1, cap):
                                if cand_d[l] > td or (cand_d[l] == td and
                                                      cand_i[l] > ti):
                                    td = cand_d[l]
                                    ti = cand_i[l]
                        cand_d[size] = dist
                        cand_i[size] = i
                        size += 1
            if size > cap:
                _select_smallest(cand_d, cand_i, size, cap)
                size = cap
            dmin = np.inf
            for l in range(size):
                dmin = min(dmin, cand_d[l])
            if dmin < eps:
                dmin = eps
            total = 0.0
            for l in range(size):
                dl = cand_d[l] if cand_d[l] > eps else eps
                w = _inv_power(dl / dmin, beta)
                raw[l] = w
                total += w
            inv_total = 1.0 / total
            for l in range(size):
                acc[cand_i[l]] -= raw[l] * inv_total


def _resolve_workers(requested: int) -> int:
    return max(1, min(requested, numba.config.NUMBA_NUM_THREADS))


def score_dataset(matrix: np.ndarray, config: ScoreConfig,
                  progress=None) -> np.ndarray:
    """Accumulated importance scores for every example of the matrix.

    Bit-identical for identical (matrix, config) regardless of the worker
    count; matches the serial reference implementation to ~1e-12 (float
    reassociation across reduction blocks only).
    """
    matrix = np.ascontiguousarray(matrix, dtype=np.float32)
    validate_matrix(matrix)
    n_examples, n_dims = matrix.shape
    config.validate(n_dims=n_dims)

    if config.enable_random_init:
        scores = init_scores(n_examples, config.seed)
    else:
        scores = np.zeros(n_examples, dtype=np.float64)
    total_iters = config.iterations
    if total_iters == 0:
        return scores

    stats = compute_dim_stats(matrix)
    zt = np.ascontiguousarray(matrix.T)
    workers = _resolve_workers(config.workers)
    numba.set_num_threads(workers)

    n_blocks = math.ceil(total_iters / BLOCK_ITERS)
    # Blocks per kernel call: roughly a progress-report interval of T/100,
    # but never fewer blocks than workers. Grouping does not affect results;
    # the fold below is always in ascending block order.
    group = min(n_blocks, max(workers, math.ceil(total_iters / (100 * BLOCK_ITERS))))
    partials = np.empty((group, n_examples), dtype=np.float64)

    block = 0
    while block < n_blocks:
        g = min(group, n_blocks - block)
        _score_blocks(zt, stats.mins, stats.medians, stats.maxs, stats.means,
                      stats.stds, int(config.kind), config.sample_dims,
                      config.neighbors, float(config.distance_exponent),
                      float(config.distance_epsilon), config.enable_redundancy,
                      np.uint64(config.seed), block, g, total_iters, partials)
        for r in range(g):
            scores += partials[r]
        block += g
        if progress is not None:
            progress(min(block * BLOCK_ITERS, total_iters), total_iters)
    if not np.isfinite(scores).all():
        raise ValidationError("score accumulation produced non-finite values")
    return scores
