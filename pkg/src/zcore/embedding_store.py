"""Embedding matrix and score vector persistence plus per-dimension stats.

Matrices are plain float32 C-order arrays of shape (N, M): row i is dataset
example i everywhere downstream. Two on-disk formats are supported:

* array container — the ``.npy`` v1.0 subset: little-endian ``<f4`` 2-D
  matrices and ``<f8`` 1-D score vectors, ``fortran_order`` False.
* raw-f32 — 16-byte header (magic ``ZCEM``, u32 N, u32 M, 4 reserved zero
  bytes) followed by the row-major little-endian f32 payload.

Scores can also round-trip through CSV (``index,score`` header, 17
significant digits, so doubles survive exactly).
"""
from __future__ import annotations

import ast
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import AlignmentError, FormatError, ShapeError, ValidationError

_NPY_MAGIC = b"\x93NUMPY"
_RAW_MAGIC = b"ZCEM"


@dataclass(frozen=True)
class DimStats:
    """Exact column-wise order statistics and moments of a matrix.

    mins/maxs are the exact per-column extremes; for even N the median is the
    mean of the two middle order statistics (computed in double precision).
    means/stds are the per-column sample moments that parameterize Gaussian
    probe sampling.
    """

    mins: np.ndarray
    medians: np.ndarray
    maxs: np.ndarray
    means: np.ndarray
    stds: np.ndarray

    @property
    def n_dims(self) -> int:
        return self.mins.shape[0]


def _first_nonfinite(data: np.ndarray):
    bad = ~np.isfinite(data)
    if not bad.any():
        return None
    flat = int(np.argmax(bad))
    return divmod(flat, data.shape[1]) if data.ndim == 2 else (flat,)


def validate_matrix(data: np.ndarray) -> np.ndarray:
    """Check the (N, M) float32 invariants; returns the array unchanged."""
    if data.ndim != 2:
        raise ShapeError(f"embedding matrix must be 2-D, got {data.ndim}-D")
    if data.shape[0] < 1 or data.shape[1] < 1:
        raise ValidationError(f"embedding matrix must be at least 1x1, got {data.shape}")
    if data.dtype != np.float32:
        raise ValidationError(f"embedding matrix must be float32, got {data.dtype}")
    loc = _first_nonfinite(data)
    if loc is not None:
        raise ValidationError(
            f"non-finite embedding value at row {loc[0]}, column {loc[1]}")
    return data


def _read_npy_header(fh, path):
    magic = fh.read(6)
    if magic != _NPY_MAGIC:
        raise FormatError(f"{path}: not an array container (bad magic)")
    version = fh.read(2)
    if version != b"\x01\x00":
        raise FormatError(f"{path}: unsupported container version {tuple(version)}")
    raw_len = fh.read(2)
    if len(raw_len) != 2:
        raise FormatError(f"{path}: truncated header")
    (hlen,) = struct.unpack("<H", raw_len)
    header = fh.read(hlen)
    if len(header) != hlen:
        raise FormatError(f"{path}: truncated header")
    try:
        meta = ast.literal_eval(header.decode("ascii").strip())
    except (ValueError, SyntaxError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: malformed header dict: {exc}") from None
    if not isinstance(meta, dict) or set(meta) != {"descr", "fortran_order", "shape"}:
        raise FormatError(f"{path}: malformed header dict: {meta!r}")
    if meta["fortran_order"] is not False:
        raise FormatError(f"{path}: fortran-order payloads are not supported")
    shape = meta["shape"]
    if not (isinstance(shape, tuple) and all(isinstance(s, int) and s >= 0 for s in shape)):
        raise FormatError(f"{path}: malformed shape {shape!r}")
    return meta["descr"], shape


def _write_npy(path, array: np.ndarray) -> None:
    descr = array.dtype.str  # '<f4' or '<f8'
    header = f"{{'descr': {descr!r}, 'fortran_order': False, 'shape': {array.shape!r}, }}"
    pad = (64 - (10 + len(header) + 1) % 64) % 64
    header = header + " " * pad + "\n"
    with open(path, "wb") as fh:
        fh.write(_NPY_MAGIC)
        fh.write(b"\x01\x00")
        fh.write(struct.pack("<H", len(header)))
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(array).tobytes())


def _read_npy(path, expect_descr, expect_ndim, role):
    with open(path, "rb") as fh:
        descr, shape = _read_npy_header(fh, path)
        if descr != expect_descr:
            raise FormatError(
                f"{path}: {role} requires dtype {expect_descr}, file declares {descr}")
        if len(shape) != expect_ndim:
            raise ShapeError(
                f"{path}: {role} requires a {expect_ndim}-D array, file declares {shape}")
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        data = np.fromfile(fh, dtype=np.dtype(expect_descr), count=count)
        if data.size != count:
            raise FormatError(f"{path}: payload shorter than declared shape {shape}")
    return data.reshape(shape)


def _infer_matrix_format(path) -> str:
    return "npy" if Path(path).suffix.lower() == ".npy" else "raw-f32"


def load_matrix(path, fmt: str | None = None) -> np.ndarray:
    """Load an embedding matrix from an array container or raw-f32 file."""
    fmt = fmt or _infer_matrix_format(path)
    if fmt in ("npy", "array-container"):
        data = _read_npy(path, "<f4", 2, "embedding matrix")
    elif fmt == "raw-f32":
        with open(path, "rb") as fh:
            head = fh.read(16)
            if len(head) != 16 or head[:4] != _RAW_MAGIC:
                raise FormatError(f"{path}: not a raw-f32 embedding file (bad magic)")
            n, m = struct.unpack("<II", head[4:12])
            if head[12:16] != b"\x00\x00\x00\x00":
                raise FormatError(f"{path}: reserved header bytes must be zero")
            data = np.fromfile(fh, dtype="<f4", count=n * m)
            if data.size != n * m:
                raise FormatError(f"{path}: payload shorter than declared {n}x{m}")
            data = data.reshape(n, m)
    else:
        raise FormatError(f"unknown matrix format {fmt!r}")
    return validate_matrix(data.astype(np.float32, copy=False))


def save_matrix(matrix: np.ndarray, path, fmt: str | None = None) -> None:
    """Persist a validated matrix; round-trips bit-exactly."""
    validate_matrix(matrix)
    fmt = fmt or _infer_matrix_format(path)
    if fmt in ("npy", "array-container"):
        _write_npy(path, matrix.astype("<f4", copy=False))
    elif fmt == "raw-f32":
        n, m = matrix.shape
        with open(path, "wb") as fh:
            fh.write(_RAW_MAGIC)
            fh.write(struct.pack("<II", n, m))
            fh.write(b"\x00\x00\x00\x00")
            fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())
    else:
        raise FormatError(f"unknown matrix format {fmt!r}")


def concat_matrices(parts: Sequence[np.ndarray]) -> np.ndarray:
    """Column-wise concatenation of per-model embeddings, row order preserved."""
    if not parts:
        raise ValidationError("need at least one matrix to concatenate")
    for p in parts:
        validate_matrix(p)
    rows = {p.shape[0] for p in parts}
    if len(rows) != 1:
        raise AlignmentError(
            f"matrices must share the example count, got row counts {sorted(rows)}")
    if len(parts) == 1:
        return parts[0].copy()
    return np.concatenate(parts, axis=1)


def compute_dim_stats(matrix: np.ndarray, chunk: int = 256) -> DimStats:
    """Exact per-column min/median/max plus sample mean/std (double precision)."""
    validate_matrix(matrix)
    n, m = matrix.shape
    mins = matrix.min(axis=0).astype(np.float64)
    maxs = matrix.max(axis=0).astype(np.float64)
    medians = np.empty(m, dtype=np.float64)
    for j0 in range(0, m, chunk):
        j1 = min(j0 + chunk, m)
        medians[j0:j1] = np.median(matrix[:, j0:j1].astype(np.float64), axis=0)
    means = matrix.mean(axis=0, dtype=np.float64)
    ddof = 1 if n > 1 else 0
    stds = matrix.std(axis=0, dtype=np.float64, ddof=ddof)
    return DimStats(mins=mins, medians=medians, maxs=maxs, means=means, stds=stds)


def standardize_matrix(matrix: np.ndarray) -> np.ndarray:
    """Optional per-dimension standardization: (x - mean) / sample std.

    Off by default everywhere (raw penultimate-layer values are the normal
    input); constant columns map to zero. Returns a new float32 matrix.
    """
    validate_matrix(matrix)
    stats = compute_dim_stats(matrix)
    safe_std = np.where(stats.stds > 0, stats.stds, 1.0)
    out = (matrix.astype(np.float64) - stats.means) / safe_std
    return validate_matrix(out.astype(np.float32))


def _infer_scores_format(path) -> str:
    return "csv" if Path(path).suffix.lower() == ".csv" else "npy"


def save_scores(scores: np.ndarray, path, fmt: str | None = None) -> None:
    """Write a score vector as .npy (<f8) or CSV with exact-round-trip decimals."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1:
        raise ShapeError(f"score vector must be 1-D, got {scores.ndim}-D")
    if scores.shape[0] == 0:
        raise ValidationError("refusing to save an empty score vector")
    fmt = fmt or _infer_scores_format(path)
    if fmt in ("npy", "array-container"):
        _write_npy(path, scores.astype("<f8", copy=False))
    elif fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("index,score\n")
            for i, v in enumerate(scores):
                fh.write(f"{i},{v:.17g}\n")
    else:
        raise FormatError(f"unknown score format {fmt!r}")


def load_scores(path, fmt: str | None = None) -> np.ndarray:
    """Load a score vector saved by :func:`save_scores`."""
    fmt = fmt or _infer_scores_format(path)
    if fmt in ("npy", "array-container"):
        data = _read_npy(path, "<f8", 1, "score vector")
    elif fmt == "csv":
        values = []
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "index,score":
                raise FormatError(f"{path}: expected 'index,score' header, got {header!r}")
            for lineno, line in enumerate(fh):
                line = line.strip()
                if not line:
                    continue
                try:
                    idx_s, val_s = line.split(",")
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise FormatError(f"{path}: malformed row {lineno + 2}: {line!r}") from None
                if idx != len(values):
                    raise FormatError(
                        f"{path}: indices must ascend from 0, row {lineno + 2} has {idx}")
                values.append(val)
        data = np.asarray(values, dtype=np.float64)
    else:
        raise FormatError(f"unknown score format {fmt!r}")
    if data.size == 0:
        raise ValidationError(f"{path}: empty score vector")
    loc = _first_nonfinite(data)
    if loc is not None:
        raise ValidationError(f"{path}: non-finite score at index {loc[0]}")
    return data
