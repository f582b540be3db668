"""Sequence families and the sequence CSV format."""
import math
import os
from dataclasses import dataclass, field

import numpy as np

from ppclab.errors import DomainError, SequenceFileError


@dataclass(frozen=True)
class SequenceMatrix:
    """N x d array of raw sequence values, one row per index n.

    ``family`` is ``"power"``, ``"nlog"`` or ``"file"``; ``params`` holds the
    family parameters (``theta`` or ``A``, or the source ``path``) and ``n0`` is
    the index of the first row.
    """

    values: np.ndarray
    family: str = "file"
    params: dict = field(default_factory=dict)
    n0: int = 1

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DomainError(f"sequence must be a non-empty N x d array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("sequence entries must be finite")
        if v.shape[0] > 1 and not np.all(np.diff(v, axis=0) > 0):
            raise DomainError("every sequence column must be strictly increasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def N(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]

    def head(self, n):
        """The first ``n`` rows as a new SequenceMatrix."""
        if not 1 <= n <= self.N:
            raise DomainError(f"cannot take {n} rows of a length-{self.N} sequence")
        return SequenceMatrix(self.values[:n], self.family, dict(self.params), self.n0)


@dataclass(frozen=True)
class SpacingCertificate:
    c: float
    holds: bool
    worst_gap: float
    worst_index: int
    column_gaps: tuple = ()


def _indices(N, n0):
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if n0 < 1:
        raise DomainError(f"start index must be >= 1, got {n0}")
    return np.arange(n0, n0 + N, dtype=np.float64)


def gen_power(thetas, N, n0=1):
    """Rows ``(m**theta_1, ..., m**theta_d)`` for ``m = n0, ..., n0 + N - 1``."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=np.float64))
    if thetas.ndim != 1 or thetas.size == 0:
        raise DomainError("thetas must be a non-empty vector")
    if np.any(~np.isfinite(thetas)) or np.any(thetas <= 0):
        raise DomainError(f"every theta must be positive, got {thetas.tolist()}")
    m = _indices(N, n0)
    with np.errstate(over="ignore"):
        values = m[:, None] ** thetas[None, :]
    if not np.all(np.isfinite(values)):
        raise DomainError("entries overflow double precision; lower N, n0 or theta")
    return SequenceMatrix(values, "power", {"theta": thetas.tolist()}, n0)


def gen_nlog(A, N, n0=2):
    """Two-column rows ``(m, m * ln(m)**A)``; ``n0 >= 2`` keeps both positive."""
    if not math.isfinite(A) or A < 1:
        raise DomainError(f"A must be a real >= 1, got {A}")
    if n0 < 2:
        raise DomainError("n0 must be >= 2 since m*log(m)**A vanishes at m = 1")
    m = _indices(N, n0)
    values = np.column_stack([m, m * np.log(m) ** A])
    return SequenceMatrix(values, "nlog", {"A": float(A)}, n0)


def load_sequence(path):
    """Read a sequence CSV: one row per n, d comma-separated decimals, no header."""
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise SequenceFileError("missing", f"sequence file not found: {path}") from None
    rows = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            row = [float(tok) for tok in line.split(",")]
        except ValueError:
            raise SequenceFileError("malformed", f"{path}:{lineno}: not a list of decimals") from None
        if rows and len(row) != len(rows[0]):
            raise SequenceFileError(
                "malformed", f"{path}:{lineno}: expected {len(rows[0])} fields, got {len(row)}"
            )
        if not all(math.isfinite(v) for v in row):
            raise SequenceFileError("malformed", f"{path}:{lineno}: non-finite value")
        rows.append(row)
    if not rows:
        raise SequenceFileError("malformed", f"{path}: no rows")
    values = np.array(rows, dtype=np.float64)
    bad = np.argwhere(np.diff(values, axis=0) <= 0)
    if bad.size:
        n, col = bad[0]
        raise SequenceFileError(
            "not-increasing", f"{path}: column {col} not increasing at row {n + 2}"
        )
    return SequenceMatrix(values, "file", {"path": path}, 1)


def save_sequence(seq, path):
    """Write ``seq`` in the sequence CSV format (round-trips bit-exactly)."""
    values = getattr(seq, "values", seq)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def check_spacing(x, c):
    """Check ``x[n+1] - x[n] >= c`` for every consecutive pair in every column."""
    values = np.asarray(getattr(x, "values", x), dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[0] < 2:
        raise DomainError("spacing check needs at least two rows")
    if not c > 0:
        raise DomainError(f"spacing constant must be positive, got {c}")
    gaps = np.diff(values, axis=0)
    per_col = gaps.min(axis=0)
    flat = int(np.argmin(gaps))
    row = flat // gaps.shape[1]
    worst = float(gaps.flat[flat])
    return SpacingCertificate(
        c=float(c),
        holds=bool(worst >= c),
        worst_gap=worst,
        worst_index=int(row),
        column_gaps=tuple(float(g) for g in per_col),
    )
