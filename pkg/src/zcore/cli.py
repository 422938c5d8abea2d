"""Command-line pipeline: score, select, stats, synth, check-dist, verify.

Score-config flags default to the standard configuration (T=1M, m=2,
alpha=1000, beta=4, triangular), so a bare ``zcore score --emb X --out Y``
reproduces it. An optional ``key = value`` config file fills any flag the
command line leaves unset.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .diagnostics import check_distribution
from .embedding_store import (compute_dim_stats, concat_matrices, load_matrix,
                              load_scores, save_matrix, save_scores,
                              standardize_matrix)
from .errors import ConfigError, ZcoreError
from .oracle import (ClusterSpec, SyntheticSpec, compare_scores, gen_synthetic,
                     load_synthetic_spec, oracle_score)
from .sampling import DistributionKind
from .scoring import ScoreConfig, score_dataset
from .selection import select_coreset, write_selection

_CONFIG_KEYS = {
    "T": ("iterations", int),
    "m": ("sample_dims", int),
    "alpha": ("neighbors", int),
    "beta": ("distance_exponent", float),
    "dist": ("kind", DistributionKind.parse),
    "seed": ("seed", int),
    "workers": ("workers", int),
    "redundancy": ("enable_redundancy", None),
    "random_init": ("enable_random_init", None),
    "epsilon": ("distance_epsilon", float),
}


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("true", "1", "yes", "on"):
        return True
    if v in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {value!r}")


def load_config_file(path) -> dict:
    """Flat ``key = value`` file with ``#`` comments; unknown keys rejected."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            field, conv = _CONFIG_KEYS[key]
            values[field] = _parse_bool(value) if conv is None else conv(value)
    return values


def _add_score_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--T", type=int, default=None, dest="T",
                        help="score iterations (default 1000000)")
    parser.add_argument("--m", type=int, default=None,
                        help="sampled dimensions per iteration (default 2)")
    parser.add_argument("--alpha", type=int, default=None,
                        help="redundancy neighbors per iteration (default 1000)")
    parser.add_argument("--beta", type=float, default=None,
                        help="redundancy distance exponent (default 4)")
    parser.add_argument("--dist", choices=["triangular", "gaussian", "uniform"],
                        default=None, help="probe distribution (default triangular)")
    parser.add_argument("--seed", type=int, default=None,
                        help="random seed (default 0)")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker threads (default: logical cores; results "
                             "do not depend on this)")
    parser.add_argument("--no-redundancy", action="store_const", const=True,
                        default=None, help="disable redundancy penalties")
    parser.add_argument("--no-random-init", action="store_const", const=True,
                        default=None, help="disable the U[0,1) score initialization")
    parser.add_argument("--epsilon", type=float, default=None,
                        help="distance clamp for zero-distance neighbors (default 1e-12)")
    parser.add_argument("--config", type=Path, default=None,
                        help="key = value config file; flags override it")


def build_score_config(args, subcommand_defaults: dict | None = None) -> ScoreConfig:
    """Resolve precedence: CLI flag > config file > subcommand default > standard."""
    values = dict(subcommand_defaults) if subcommand_defaults else {}
    if args.config:
        values.update(load_config_file(args.config))
    flag_map = {
        "iterations": args.T,
        "sample_dims": args.m,
        "neighbors": args.alpha,
        "distance_exponent": args.beta,
        "kind": DistributionKind.parse(args.dist) if args.dist else None,
        "seed": args.seed,
        "workers": args.workers,
        "distance_epsilon": args.epsilon,
        "enable_redundancy": False if args.no_redundancy else None,
        "enable_random_init": False if args.no_random_init else None,
    }
    for field, value in flag_map.items():
        if value is not None:
            values[field] = value
    config = ScoreConfig(**values)
    config.validate()
    return config


def _config_echo(config: ScoreConfig) -> dict:
    return {
        "T": config.iterations,
        "m": config.sample_dims,
        "alpha": config.neighbors,
        "beta": config.distance_exponent,
        "dist": config.kind.cli_name,
        "seed": config.seed,
        "workers": config.workers,
        "redundancy": config.enable_redundancy,
        "random_init": config.enable_random_init,
        "epsilon": config.distance_epsilon,
    }


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def cmd_score(args) -> int:
    config = build_score_config(args)
    parts = [load_matrix(p) for p in args.emb]
    matrix = concat_matrices(parts) if len(parts) > 1 else parts[0]
    if args.standardize:
        matrix = standardize_matrix(matrix)
    n, m = matrix.shape
    _log(f"score: N={n} M={m} T={config.iterations} dist={config.kind.cli_name} "
         f"seed={config.seed} workers={config.workers}")
    start = time.perf_counter()

    def report(done, total):
        _log(f"score: {done}/{total} iterations "
             f"({time.perf_counter() - start:.1f}s elapsed)")

    scores = score_dataset(matrix, config, progress=report)
    elapsed = time.perf_counter() - start
    save_scores(scores, args.out)
    meta = {"N": n, "M": m, "seconds": round(elapsed, 3), **_config_echo(config)}
    with open(f"{args.out}.meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    print(f"zcore-result N={n} M={m} T={config.iterations} seconds={elapsed:.2f}")
    return 0


def cmd_select(args) -> int:
    scores = load_scores(args.scores)
    result = select_coreset(scores, args.rate)
    echo = None
    meta_path = Path(f"{args.scores}.meta.json")
    if meta_path.exists():
        with open(meta_path, "r", encoding="utf-8") as fh:
            echo = json.load(fh)
    write_selection(result, args.out_dir, config_echo=echo)
    _log(f"select: kept n={result.n} of N={result.n_examples} "
         f"(prune rate {args.rate})")
    return 0


def cmd_stats(args) -> int:
    parts = [load_matrix(p) for p in args.emb]
    matrix = concat_matrices(parts) if len(parts) > 1 else parts[0]
    stats = compute_dim_stats(matrix)
    out = open(args.out, "w", encoding="utf-8", newline="\n") if args.out else sys.stdout
    try:
        out.write("dim,min,median,max,mean,std\n")
        for j in range(stats.n_dims):
            out.write(f"{j},{stats.mins[j]:.9g},{stats.medians[j]:.9g},"
                      f"{stats.maxs[j]:.9g},{stats.means[j]:.9g},{stats.stds[j]:.9g}\n")
    finally:
        if args.out:
            out.close()
    _log(f"stats: N={matrix.shape[0]} M={matrix.shape[1]}")
    return 0


def cmd_synth(args) -> int:
    spec = load_synthetic_spec(args.spec)
    matrix = gen_synthetic(spec)
    save_matrix(matrix, args.out)
    _log(f"synth: wrote N={matrix.shape[0]} M={matrix.shape[1]} to {args.out}")
    return 0


def cmd_check_dist(args) -> int:
    matrix = load_matrix(args.emb[0]) if len(args.emb) == 1 else \
        concat_matrices([load_matrix(p) for p in args.emb])
    kind = DistributionKind.parse(args.dist or "triangular")
    seed = args.seed if args.seed is not None else 0
    check = check_distribution(matrix, args.dim, kind, args.samples, seed)
    out = open(args.out, "w", encoding="utf-8", newline="\n") if args.out else sys.stdout
    try:
        out.write("value,source\n")
        for v in check.data:
            out.write(f"{v:.9g},data\n")
        for v in check.samples:
            out.write(f"{v:.9g},sample\n")
    finally:
        if args.out:
            out.close()
    _log(f"check-dist: dim={check.dim} kind={kind.cli_name} ks={check.ks:.6g} "
         f"frac_below_median={check.frac_below_median:.6g}")
    return 0


_DEFAULT_VERIFY_SPEC = SyntheticSpec(
    clusters=(
        ClusterSpec(center=(0.0, 0.0, 0.0, 0.0), spread=0.5, count=40, duplicates=6),
        ClusterSpec(center=(4.0, -2.0, 1.0, 3.0), spread=1.5, count=24),
    ),
    seed=7,
)


def cmd_verify(args) -> int:
    spec = load_synthetic_spec(args.spec) if args.spec else _DEFAULT_VERIFY_SPEC
    matrix = gen_synthetic(spec)
    config = build_score_config(args, subcommand_defaults={"iterations": 1000})
    if args.against == "oracle":
        tol = args.tol if args.tol is not None else 1e-9
        engine = score_dataset(matrix, config)
        reference = oracle_score(matrix, config)
        label = "engine vs oracle"
    else:
        tol = args.tol if args.tol is not None else 0.0
        engine = score_dataset(matrix, replace(config, workers=1))
        reference = score_dataset(matrix, replace(config, workers=8))
        label = "workers=1 vs workers=8"
    report = compare_scores(engine, reference, tol)
    status = "PASS" if report.passed else "FAIL"
    _log(f"verify: {label} N={matrix.shape[0]} M={matrix.shape[1]} "
         f"T={config.iterations} max_diff={report.max_abs_diff:.3e} "
         f"worst_index={report.worst_index} tol={tol:g} -> {status}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zcore",
        description="Coreset selection from precomputed embedding matrices.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score every example of an embedding matrix")
    p.add_argument("--emb", action="append", required=True, type=Path,
                   help="embedding file (.npy or raw-f32); repeat to "
                        "concatenate column-wise in argument order")
    p.add_argument("--out", required=True, type=Path,
                   help="output scores (.npy or .csv by extension)")
    p.add_argument("--standardize", action="store_true",
                   help="standardize each dimension before scoring "
                        "(experimental; raw values are the default)")
    _add_score_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("select", help="prune a coreset from a score vector")
    p.add_argument("--scores", required=True, type=Path)
    p.add_argument("--rate", required=True, type=float,
                   help="prune rate in [0, 1)")
    p.add_argument("--out-dir", required=True, type=Path)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("stats", help="per-dimension statistics of a matrix")
    p.add_argument("--emb", action="append", required=True, type=Path)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="generate a synthetic embedding matrix")
    p.add_argument("--spec", required=True, type=Path,
                   help="JSON file with clusters and seed")
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("check-dist",
                       help="compare a real embedding dimension with sampler draws")
    p.add_argument("--emb", action="append", required=True, type=Path)
    p.add_argument("--dim", required=True, type=int)
    p.add_argument("--dist", choices=["triangular", "gaussian", "uniform"],
                   default=None)
    p.add_argument("--samples", type=int, default=50_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_check_dist)

    p = sub.add_parser("verify",
                       help="check the engine against the serial reference")
    p.add_argument("--spec", type=Path, default=None,
                   help="synthetic spec JSON (default: built-in two-cluster spec)")
    p.add_argument("--against", choices=["oracle", "workers"], default="oracle")
    p.add_argument("--tol", type=float, default=None,
                   help="max per-element difference (default 1e-9 for oracle, "
                        "0 for workers)")
    _add_score_flags(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ZcoreError as exc:
        _log(f"error: {exc}")
        return 1
    except OSError as exc:
        _log(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
