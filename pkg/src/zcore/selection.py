"""Coreset selection and loss weights from an importance score vector."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ValidationError


@dataclass
class SelectionResult:
    """Pruned coreset: the n highest-scored examples plus full loss weights."""

    prune_rate: float
    n: int
    kept_indices: np.ndarray  # ascending int64, length n
    weights: np.ndarray       # float64 in [0, 1], length N

    @property
    def n_examples(self) -> int:
        return self.weights.shape[0]


def coreset_size(n_examples: int, prune_rate: float) -> int:
    """n = round(N * (1 - prune_rate)), never below 1 (half rounds up)."""
    return max(1, int(math.floor(n_examples * (1.0 - prune_rate) + 0.5)))


def loss_weights(scores: np.ndarray) -> np.ndarray:
    """Min-max rescale of scores to [0, 1]; constant scores weight as 1."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.shape[0] < 1:
        raise ValidationError("scores must be a non-empty 1-D vector")
    lo = scores.min()
    hi = scores.max()
    if hi == lo:
        return np.ones_like(scores)
    return (scores - lo) / (hi - lo)


def select_coreset(scores: np.ndarray, prune_rate: float) -> SelectionResult:
    """Keep the top-n scored examples; ties at the boundary keep lower indices."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.shape[0] < 1:
        raise ValidationError("scores must be a non-empty 1-D vector")
    if not 0.0 <= prune_rate < 1.0:
        raise DomainError(f"prune rate must lie in [0, 1), got {prune_rate}")
    n = coreset_size(scores.shape[0], prune_rate)
    # Stable sort on the negated scores: equal scores stay in index order.
    order = np.argsort(-scores, kind="stable")
    kept = np.sort(order[:n]).astype(np.int64)
    return SelectionResult(prune_rate=float(prune_rate), n=n,
                           kept_indices=kept, weights=loss_weights(scores))


def write_selection(result: SelectionResult, out_dir, config_echo: dict | None = None) -> None:
    """Emit indices.txt, weights.csv (all N rows), and selection.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "indices.txt", "w", encoding="utf-8", newline="\n") as fh:
        for i in result.kept_indices:
            fh.write(f"{i}\n")
    with open(out / "weights.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("index,weight\n")
        for i, w in enumerate(result.weights):
            fh.write(f"{i},{w:.17g}\n")
    payload = {
        "prune_rate": result.prune_rate,
        "n": result.n,
        "N": result.n_examples,
        "config": config_echo,
    }
    with open(out / "selection.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
