"""Coreset selection for unlabeled data from precomputed embedding matrices.

Pipeline: load or extract an (N, M) float32 embedding matrix, accumulate a
per-example importance score from coverage rewards and redundancy penalties
over T random probe iterations, then keep the top-n examples for any prune
rate and emit loss weights for the rest of the training stack.
"""

__version__ = "0.1.0"

import warnings as _warnings

# numba probes TBB on import; the fallback to OpenMP is silent and harmless
_warnings.filterwarnings(
    "ignore", message="The TBB threading layer requires TBB version")

from .diagnostics import (check_distribution, ks_statistic,
                          ks_statistic_two_sample, triangular_cdf)
from .embedding_store import (DimStats, compute_dim_stats, concat_matrices,
                              load_matrix, load_scores, save_matrix,
                              save_scores, standardize_matrix, validate_matrix)
from .errors import (AlignmentError, ConfigError, DomainError, FormatError,
                     ShapeError, ValidationError, ZcoreError)
from .oracle import (ClusterSpec, ScoreComparison, SyntheticSpec,
                     compare_scores, duplicate_rows, gen_synthetic,
                     load_synthetic_spec, oracle_score)
from .rng import CounterStream, init_scores, iteration_stream
from .sampling import (DistributionKind, draw_dim_subset, draw_probe,
                       sample_triangular, triangular_inverse_cdf)
from .scoring import (BLOCK_ITERS, IterationDelta, ScoreConfig,
                      k_nearest_neighbors, nearest_example, redundancy_scores,
                      run_iteration, score_dataset)
from .selection import (SelectionResult, coreset_size, loss_weights,
                        select_coreset, write_selection)

__all__ = [
    "__version__",
    "AlignmentError", "ConfigError", "DomainError", "FormatError",
    "ShapeError", "ValidationError", "ZcoreError",
    "DimStats", "compute_dim_stats", "concat_matrices", "load_matrix",
    "load_scores", "save_matrix", "save_scores", "standardize_matrix",
    "validate_matrix",
    "DistributionKind", "draw_dim_subset", "draw_probe", "sample_triangular",
    "triangular_inverse_cdf",
    "CounterStream", "init_scores", "iteration_stream",
    "BLOCK_ITERS", "IterationDelta", "ScoreConfig", "k_nearest_neighbors",
    "nearest_example", "redundancy_scores", "run_iteration", "score_dataset",
    "SelectionResult", "coreset_size", "loss_weights", "select_coreset",
    "write_selection",
    "ClusterSpec", "ScoreComparison", "SyntheticSpec", "compare_scores",
    "duplicate_rows", "gen_synthetic", "load_synthetic_spec", "oracle_score",
    "check_distribution", "ks_statistic", "ks_statistic_two_sample",
    "triangular_cdf",
]
