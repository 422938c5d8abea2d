#!/usr/bin/env python
"""Runtime curve of the scoring loop over a sweep of iteration counts.

Generates a random N x M embedding matrix, times score_dataset at each T,
and writes a CSV you can plot (columns: iterations, seconds, us_per_iter).
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.append(str(Path(__file__).resolve().parents[1] / "src"))

from zcore.scoring import ScoreConfig, score_dataset


def main() -> None:
    p = argparse.ArgumentParser(description="Scoring runtime benchmark")
    p.add_argument("--n", type=int, default=50_000, help="examples")
    p.add_argument("--dims", type=int, default=1280, help="embedding dims")
    p.add_argument("--sweep", type=int, nargs="+",
                   default=[100, 1_000, 10_000, 100_000, 1_000_000])
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("runtime_sweep.csv"))
    args = p.parse_args()

    mat = np.random.default_rng(args.seed).standard_normal(
        (args.n, args.dims)).astype(np.float32)
    warm = ScoreConfig(iterations=64, seed=args.seed)
    score_dataset(mat[: min(args.n, 512)], warm)  # compile before timing

    rows = ["iterations,seconds,us_per_iter"]
    for iters in args.sweep:
        config = ScoreConfig(iterations=iters, seed=args.seed)
        if args.workers:
            config.workers = args.workers
        start = time.perf_counter()
        score_dataset(mat, config)
        elapsed = time.perf_counter() - start
        rows.append(f"{iters},{elapsed:.3f},{elapsed / iters * 1e6:.2f}")
        print(rows[-1], file=sys.stderr)

    args.out.write_text("\n".join(rows) + "\n")
    print(f"wrote {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
