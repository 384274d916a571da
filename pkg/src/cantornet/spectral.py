"""
Weight matrices with row (or column) sums in (3/4, 1) and their
Perron-Frobenius eigenpair.

The dominant eigenpair is computed by power iteration from the uniform
probability vector. For strictly positive matrices the Perron root is
simple and strictly dominant, so the iteration always converges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .errors import ConvergenceError, ParameterError

LOWER_SUM = 0.75
UPPER_SUM = 1.0
MODES = ("row", "column")

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000
POLISH_PATIENCE = 5


@dataclass
class Violation:
    kind: str  # "non_positive" or "sum_out_of_range"
    index: Tuple[int, ...]
    value: float

    def as_dict(self):
        return {"kind": self.kind, "index": list(self.index), "value": self.value}


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_weights`.

    ``status`` is ``"pass"``, ``"fail"`` (constraint violations, listed in
    ``violations``) or ``"structural_error"`` (input is not a finite square
    matrix; ``message`` says why).
    """

    status: str
    mode: str
    violations: List[Violation] = field(default_factory=list)
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self):
        return {
            "status": self.status,
            "mode": self.mode,
            "violations": [v.as_dict() for v in self.violations],
            "message": self.message,
        }


def _check_mode(mode):
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")


def validate_weights(W, mode: str = "row") -> ValidationReport:
    """Check positivity and the open (3/4, 1) bound on row or column sums.

    Every violation is reported, not just the first one. Sums are compared
    exactly against the bounds, without slack.
    """
    _check_mode(mode)
    try:
        A = np.asarray(W, dtype=float)
    except (TypeError, ValueError) as exc:
        return ValidationReport("structural_error", mode, message=f"not numeric: {exc}")
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        return ValidationReport(
            "structural_error", mode, message=f"expected a non-empty square matrix, got shape {A.shape}"
        )
    if not np.all(np.isfinite(A)):
        return ValidationReport("structural_error", mode, message="matrix has non-finite entries")

    violations = []
    for i, j in zip(*np.nonzero(A <= 0.0)):
        violations.append(Violation("non_positive", (int(i), int(j)), float(A[i, j])))
    sums = A.sum(axis=1 if mode == "row" else 0)
    for i, s in enumerate(sums):
        if not (LOWER_SUM < s < UPPER_SUM):
            violations.append(Violation("sum_out_of_range", (i,), float(s)))
    return ValidationReport("pass" if not violations else "fail", mode, violations)


class WeightMatrix:
    """A positive square matrix satisfying the sum condition in ``mode``.

    The constructor validates; invalid input raises :class:`ParameterError`
    carrying the :class:`ValidationReport`. Entries are stored read-only.
    """

    def __init__(self, entries, mode: str = "row"):
        report = validate_weights(entries, mode)
        if not report.passed:
            err = ParameterError(f"invalid weight matrix ({report.status}): {_summarize(report)}")
            err.report = report
            raise err
        A = np.array(entries, dtype=float)
        A.setflags(write=False)
        self.entries = A
        self.mode = mode

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __repr__(self):
        return f"WeightMatrix(n={self.n}, mode={self.mode!r})"

    def __eq__(self, other):
        return (
            isinstance(other, WeightMatrix)
            and self.mode == other.mode
            and np.array_equal(self.entries, other.entries)
        )

    # -- serialization -------------------------------------------------
    def to_csv(self) -> str:
        return "".join(",".join(format(x, ".17g") for x in row) + "\n" for row in self.entries)

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "mode": self.mode,
            "entries": [[float(x) for x in row] for row in self.entries],
        }
        return json.dumps(payload, indent=1) + "\n"

    @classmethod
    def from_csv(cls, text: str, mode: str = "row") -> "WeightMatrix":
        rows = [line for line in text.splitlines() if line.strip()]
        return cls([[float(tok) for tok in line.split(",")] for line in rows], mode)

    @classmethod
    def from_json(cls, text: str) -> "WeightMatrix":
        payload = json.loads(text)
        W = cls(payload["entries"], payload.get("mode", "row"))
        if "n" in payload and payload["n"] != W.n:
            raise ParameterError(f"declared n={payload['n']} does not match {W.n}x{W.n} entries")
        return W


def _summarize(report: ValidationReport, limit: int = 5) -> str:
    if report.message:
        return report.message
    parts = [f"{v.kind}@{v.index}={v.value:.17g}" for v in report.violations[:limit]]
    more = len(report.violations) - limit
    if more > 0:
        parts.append(f"... {more} more")
    return "; ".join(parts)


def read_raw_weights(path) -> Tuple[np.ndarray, Optional[str]]:
    """Parse a matrix file without validating it; returns (entries, mode or None).

    Raises ValueError (or OSError) for files that cannot be parsed into a
    rectangular numeric array.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        payload = json.loads(text)
        if not isinstance(payload, dict) or "entries" not in payload:
            raise ValueError("JSON weight file needs an 'entries' field")
        mode = payload.get("mode")
        if mode is not None and mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        rows = payload["entries"]
    else:
        mode = None
        rows = [[float(tok) for tok in line.split(",")] for line in text.splitlines() if line.strip()]
    A = np.array(rows, dtype=float)
    if A.ndim != 2:
        raise ValueError("weight file rows have unequal lengths")
    return A, mode


def load_weights(path, mode: Optional[str] = None) -> WeightMatrix:
    """Read a weight matrix from ``.json`` or ``.csv`` (mode defaults to row for CSV)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        W = WeightMatrix.from_json(text)
        if mode is not None and mode != W.mode:
            W = WeightMatrix(W.entries, mode)
        return W
    return WeightMatrix.from_csv(text, mode or "row")


@dataclass(frozen=True)
class PerronPair:
    rho: float
    v: np.ndarray
    residual: float
    iterations: int

    def as_dict(self):
        return {
            "rho": self.rho,
            "v": [float(x) for x in self.v],
            "residual": self.residual,
            "iterations": self.iterations,
        }


def perron_eigenpair(W, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> PerronPair:
    """Dominant eigenvalue and probability eigenvector by power iteration.

    Parameters
    ----------
    W : WeightMatrix or array_like
        Positive square matrix. Arrays are validated in row mode first.
    tol : float
        Required bound on ``max|W v - rho v|``.
    max_iter : int
        Iteration cap; exceeding it raises :class:`ConvergenceError` with the
        best iterate attached.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    if not isinstance(W, WeightMatrix):
        W = WeightMatrix(W, "row")
    A = W.entries
    n = W.n

    v = np.full(n, 1.0 / n)
    best = (np.inf, v, np.nan, 0)
    stalled = 0
    for it in range(1, max_iter + 1):
        y = A @ v
        v = y / y.sum()
        Av = A @ v
        rho = float(Av.sum())  # sum(v) == 1, so this is the 1-norm Rayleigh ratio
        residual = float(np.max(np.abs(Av - rho * v)))
        if residual < best[0]:
            best = (residual, v, rho, it)
            stalled = 0
        else:
            stalled += 1
        # Once tol is met keep polishing until rounding noise dominates: the
        # activation thresholds inherit any eigenvector error directly.
        if best[0] <= tol and (stalled >= POLISH_PATIENCE or best[0] == 0.0):
            residual, v, rho, it = best
            v = v.copy()
            v.setflags(write=False)
            return PerronPair(rho, v, residual, it)
    if best[0] <= tol:
        residual, v, rho, it = best
        v = v.copy()
        v.setflags(write=False)
        return PerronPair(rho, v, residual, it)
    raise ConvergenceError(
        f"power iteration did not reach tol={tol:g} in {max_iter} iterations "
        f"(best residual {best[0]:.3e})",
        best=(best[2], best[1]),
        residual=best[0],
        iterations=max_iter,
    )


def gen_weight_matrix(n: int, seed: int, sum_target: float, mode: str = "row") -> WeightMatrix:
    """Seeded positive matrix whose rows (or columns) all sum to ``sum_target``."""
    _check_mode(mode)
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not (LOWER_SUM < sum_target < UPPER_SUM):
        raise ParameterError(f"sum_target must lie in (3/4, 1), got {sum_target!r}")
    rng = np.random.default_rng(seed)
    A = 1.0 - rng.random((n, n))  # values in (0, 1]
    if mode == "row":
        A = (A / A.sum(axis=1, keepdims=True)) * sum_target
    else:
        A = (A / A.sum(axis=0, keepdims=True)) * sum_target
    return WeightMatrix(A, mode)
