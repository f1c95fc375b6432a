"""Validated matrix types, exponential and principal logarithm."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import (
    NegativeEntry,
    NegativeRealEigenvalueOnBranchCut,
    NonRealResult,
    NotSquare,
    RowSumViolation,
    ValidationError,
)
from .tolerances import DEFAULT_TOL, ToleranceConfig


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _as_square(raw) -> np.ndarray:
    a = np.asarray(raw, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquare(a.shape)
    return a


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Row-stochastic square matrix; build it through :func:`validate_markov`."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, StochasticMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())


def validate_markov(raw, tol: ToleranceConfig = DEFAULT_TOL) -> StochasticMatrix:
    """Check that `raw` is a Markov matrix and return it frozen.

    Entries in ``[-nonneg_tol, 0)`` are clamped to zero and the affected
    rows renormalized.
    """
    a = _as_square(raw).copy()
    n = a.shape[0]
    if n < 2:
        raise ValidationError("a Markov matrix needs at least 2 states")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    bad = np.argwhere(a < -tol.nonneg_tol)
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise NegativeEntry(i, j, float(a[i, j]))
    sums = a.sum(axis=1)
    off = np.nonzero(np.abs(sums - 1.0) > tol.row_sum_tol)[0]
    if off.size:
        i = int(off[0])
        raise RowSumViolation(i, float(sums[i]))
    clamp = a < 0
    if clamp.any():
        a[clamp] = 0.0
        rows = clamp.any(axis=1)
        a[rows] /= a[rows].sum(axis=1, keepdims=True)
    return StochasticMatrix(_frozen(a))


def is_rate_matrix(q, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True when off-diagonals are >= -nonneg_tol and rows sum to 0."""
    q = np.asarray(q)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise NotSquare(q.shape)
    if np.iscomplexobj(q):
        if np.max(np.abs(q.imag), initial=0.0) > tol.reconstruct_tol:
            return False
        q = q.real
    if not np.all(np.isfinite(q)):
        return False
    off = q[~np.eye(q.shape[0], dtype=bool)]
    if off.size and off.min() < -tol.nonneg_tol:
        return False
    return bool(np.all(np.abs(q.sum(axis=1)) <= tol.row_sum_tol))


def matrix_exponential(q) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a degree-13 Padé kernel."""
    q = np.asarray(q)
    out = scipy.linalg.expm(q)
    return out.real if not np.iscomplexobj(q) else out


def exp_residual(q, m) -> float:
    """Frobenius norm of ``exp(q) - m``."""
    return float(np.linalg.norm(matrix_exponential(np.real_if_close(q)) - np.asarray(m)))


def real_part_checked(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL, what: str = "matrix") -> np.ndarray:
    """Drop a negligible imaginary part, raising when it is not negligible."""
    a = np.asarray(a)
    if not np.iscomplexobj(a):
        return a
    residue = float(np.max(np.abs(a.imag), initial=0.0))
    if residue > tol.reconstruct_tol * max(1.0, float(np.max(np.abs(a.real), initial=0.0))):
        raise NonRealResult(f"{what} has imaginary residue {residue:.3e}")
    return np.ascontiguousarray(a.real)


def jordan_block_log(value: float, size: int) -> np.ndarray:
    """Principal logarithm of the Jordan block ``value*I + N`` (N the shift)."""
    if value <= 0:
        raise NegativeRealEigenvalueOnBranchCut(
            f"Jordan block of size {size} at {value!r} has no principal real logarithm")
    out = np.eye(size) * np.log(value)
    # log(v I + N) = log(v) I + sum_{p>=1} (-1)^(p+1) N^p / (p v^p)
    for p in range(1, size):
        coef = (-1) ** (p + 1) / (p * value ** p)
        out += coef * np.eye(size, k=p)
    return out


def principal_logarithm(decomp) -> np.ndarray:
    """Principal logarithm from a spectral or Jordan decomposition.

    Parameters
    ----------
    decomp : SpectralDecomposition or DefectiveStructure
        From :func:`embedscan.spectral.decompose`.

    Returns
    -------
    ndarray
        Complex for diagonalizable input (negative eigenvalues give a
        genuinely complex result), real for defective input.
    """
    from .spectral import DefectiveStructure

    if isinstance(decomp, DefectiveStructure):
        logj = np.zeros((4, 4))
        for start, size, value in decomp.blocks:
            logj[start:start + size, start:start + size] = jordan_block_log(value, size)
        return decomp.basis @ logj @ decomp.basis_inv
    logs = np.log(decomp.eigenvalues.astype(complex))
    logs[0] = 0.0
    return (decomp.P * logs) @ decomp.P_inv


def principal_log_matrix(matrix, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Convenience wrapper: decompose `matrix` then take its principal log."""
    from .spectral import decompose

    m = matrix if isinstance(matrix, StochasticMatrix) else validate_markov(matrix, tol)
    return principal_logarithm(decompose(m, tol))


@dataclass(frozen=True)
class Branch:
    """Origin of a generator candidate.

    ``kind`` is one of ``principal``, ``distinct``, ``case2``, ``case3``,
    ``defective``.
    """

    kind: str
    k: Tuple[int, ...] = ()
    point: Optional[Tuple[float, float, float]] = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.k:
            out["k"] = list(self.k)
        if self.point is not None:
            out["point"] = list(self.point)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Branch":
        point = data.get("point")
        return cls(data["kind"], tuple(data.get("k", ())),
                   tuple(point) if point is not None else None)


PRINCIPAL = Branch("principal")


@dataclass(frozen=True, eq=False)
class GeneratorCandidate:
    """A real zero-row-sum logarithm of the input, tagged by its branch."""

    matrix: np.ndarray
    branch: Branch = field(default=PRINCIPAL)

    @classmethod
    def build(cls, matrix, branch: Branch = PRINCIPAL,
              tol: ToleranceConfig = DEFAULT_TOL) -> "GeneratorCandidate":
        q = real_part_checked(matrix, tol, what=f"{branch.kind} logarithm")
        return cls(_frozen(q), branch)
