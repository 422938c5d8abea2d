"""Ground truth for tests and verification runs.

The oracle scorer executes iterations serially with full sorts and no
caching, composed from the plain numpy operations, but consumes the exact
random streams of the optimized engine: iteration t reads stream
(seed, iteration, t). Any disagreement beyond float reassociation noise is
an engine bug.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .embedding_store import compute_dim_stats, validate_matrix
from .errors import ValidationError
from .rng import init_scores, iteration_stream
from .scoring import ScoreConfig, run_iteration


@dataclass(frozen=True)
class ClusterSpec:
    center: tuple
    spread: float
    count: int
    duplicates: int = 0


@dataclass(frozen=True)
class SyntheticSpec:
    """Clustered synthetic embeddings with optional exact-duplicate rows."""

    clusters: tuple
    seed: int

    @property
    def total_count(self) -> int:
        return sum(c.count for c in self.clusters)


def load_synthetic_spec(path) -> SyntheticSpec:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        clusters = tuple(
            ClusterSpec(center=tuple(float(v) for v in c["center"]),
                        spread=float(c["spread"]),
                        count=int(c["count"]),
                        duplicates=int(c.get("duplicates", 0)))
            for c in data["clusters"])
        spec = SyntheticSpec(clusters=clusters, seed=int(data["seed"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: malformed synthetic spec: {exc}") from None
    _validate_spec(spec)
    return spec


def _validate_spec(spec: SyntheticSpec) -> None:
    if not spec.clusters:
        raise ValidationError("synthetic spec needs at least one cluster")
    dims = {len(c.center) for c in spec.clusters}
    if len(dims) != 1:
        raise ValidationError(f"cluster centers disagree on dimension: {sorted(dims)}")
    for c in spec.clusters:
        if c.count < 1:
            raise ValidationError(f"cluster count must be >= 1, got {c.count}")
        if not 0 <= c.duplicates <= c.count:
            raise ValidationError(
                f"duplicates must lie in [0, count], got {c.duplicates} of {c.count}")
        if not c.spread > 0:
            raise ValidationError(f"cluster spread must be > 0, got {c.spread}")


def gen_synthetic(spec: SyntheticSpec) -> np.ndarray:
    """Isotropic Gaussian clusters plus exact copies of each cluster's first point."""
    _validate_spec(spec)
    rng = np.random.default_rng(spec.seed)
    n_dims = len(spec.clusters[0].center)
    rows = []
    for c in spec.clusters:
        center = np.asarray(c.center, dtype=np.float64)
        base = c.count - c.duplicates
        points = center + c.spread * rng.standard_normal((base, n_dims))
        if c.duplicates:
            # The template must exist even when every row is a duplicate.
            template = points[0] if base else \
                center + c.spread * rng.standard_normal(n_dims)
            points = np.vstack([points, np.tile(template, (c.duplicates, 1))])
        rows.append(points)
    return validate_matrix(np.vstack(rows).astype(np.float32))


def duplicate_rows(spec: SyntheticSpec) -> np.ndarray:
    """Row indices occupied by the duplicate copies, in matrix order."""
    out = []
    offset = 0
    for c in spec.clusters:
        out.extend(range(offset + c.count - c.duplicates, offset + c.count))
        offset += c.count
    return np.asarray(out, dtype=np.int64)


def oracle_score(matrix: np.ndarray, config: ScoreConfig) -> np.ndarray:
    """Serial reference scorer; same contract as the optimized engine."""
    matrix = np.ascontiguousarray(matrix, dtype=np.float32)
    validate_matrix(matrix)
    config.validate(n_dims=matrix.shape[1])
    n = matrix.shape[0]
    if config.enable_random_init:
        scores = init_scores(n, config.seed)
    else:
        scores = np.zeros(n, dtype=np.float64)
    if config.iterations == 0:
        return scores
    stats = compute_dim_stats(matrix)
    for t in range(config.iterations):
        delta = run_iteration(matrix, stats, config, iteration_stream(config.seed, t))
        scores[delta.coverage_index] += 1.0
        scores[delta.redundancy_indices] -= delta.redundancy_penalties
    return scores


@dataclass
class ScoreComparison:
    max_abs_diff: float
    worst_index: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_abs_diff <= self.tol


def compare_scores(a: np.ndarray, b: np.ndarray, tol: float) -> ScoreComparison:
    """Elementwise comparison report of two score vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValidationError(f"score vectors differ in length: {a.shape} vs {b.shape}")
    diff = np.abs(a - b)
    worst = int(np.argmax(diff)) if diff.size else 0
    return ScoreComparison(max_abs_diff=float(diff[worst]) if diff.size else 0.0,
                           worst_index=worst, tol=tol)
