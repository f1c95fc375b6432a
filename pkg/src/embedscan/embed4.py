"""Complete 4x4 embeddability: distinct, conjugate-pair, repeated and defective spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .case3 import solve_case3
from .errors import IllConditioned
from .matrices import (
    PRINCIPAL,
    Branch,
    GeneratorCandidate,
    StochasticMatrix,
    is_rate_matrix,
    principal_logarithm,
    real_part_checked,
    validate_markov,
)
from .spectral import DefectiveStructure, SpectralDecomposition, classify
from .tolerances import DEFAULT_TOL, ToleranceConfig
from .verdict import Verdict

TWO_PI = 2.0 * math.pi
# Jordan bases beyond this condition number make the verdict low-confidence
JORDAN_COND_LIMIT = 1e8


@dataclass(frozen=True, eq=False)
class Case2Data:
    """``Log(M) + k V`` is a rate matrix exactly for ``L <= k <= U`` when ``N_set`` is empty."""

    V: np.ndarray
    L_bound: int
    U_bound: int
    N_set: Tuple[Tuple[int, int], ...] = field(default=())
    log: Optional[np.ndarray] = None


def _principal_real(decomp, tol: ToleranceConfig) -> np.ndarray:
    return real_part_checked(principal_logarithm(decomp), tol, what="principal logarithm")


def solve_case1(M: StochasticMatrix, decomp: SpectralDecomposition,
                tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Positive real spectrum: the principal logarithm is the only candidate."""
    log = _principal_real(decomp, tol)
    verdict = Verdict(case="CaseI", embeddable=False)
    if is_rate_matrix(log, tol):
        verdict.generators = [GeneratorCandidate.build(log, PRINCIPAL, tol)]
        verdict.embeddable = True
    verdict.diagnostics["condition_P"] = decomp.condition
    verdict.diagnostics["eig_margin"] = decomp.eig_margin
    return verdict


def compute_case2_data(M: StochasticMatrix, decomp: SpectralDecomposition,
                       tol: ToleranceConfig = DEFAULT_TOL) -> Case2Data:
    """Branch direction ``V`` and the integer window ``[L, U]``.

    Entries with ``|V_ij| < nonneg_tol`` count as zero and feed ``N_set``.
    Bounds carry the same ``nonneg_tol`` slack as the rate test, so every
    ``k`` in the window passes it.
    """
    log = _principal_real(decomp, tol)
    pairs = decomp.pair_indices
    if not pairs:
        V = np.zeros_like(log)
    else:
        if len(pairs) != 1:
            raise ValueError("expected a single conjugate pair")
        shift = np.zeros(decomp.n, dtype=complex)
        shift[pairs[0]] = TWO_PI * 1j
        shift[pairs[0] + 1] = -TWO_PI * 1j
        V = real_part_checked((decomp.P * shift) @ decomp.P_inv, tol, what="branch direction")

    lo, hi = -math.inf, math.inf
    zero_neg = []
    n = log.shape[0]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            v, l = V[i, j], log[i, j]
            if abs(v) < tol.nonneg_tol:
                if l < -tol.nonneg_tol:
                    zero_neg.append((i, j))
            elif v > 0:
                lo = max(lo, math.ceil((-tol.nonneg_tol - l) / v))
            else:
                hi = min(hi, math.floor((-tol.nonneg_tol - l) / v))
    if not pairs:
        lo = hi = 0
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise IllConditioned("branch direction has off-diagonal entries of one sign only")
    return Case2Data(V=V, L_bound=int(lo), U_bound=int(hi), N_set=tuple(zero_neg), log=log)


def solve_case2(M: StochasticMatrix, decomp: SpectralDecomposition,
                tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """One conjugate pair: generators are ``Log(M) + k V`` for ``k`` in ``[L, U]``."""
    data = compute_case2_data(M, decomp, tol)
    verdict = Verdict(case="CaseII", embeddable=False)
    verdict.bounds.update(L=data.L_bound, U=data.U_bound, N=[list(p) for p in data.N_set])
    verdict.diagnostics["condition_P"] = decomp.condition
    if not data.N_set:
        for k in range(data.L_bound, data.U_bound + 1):
            q = data.log + k * data.V
            if not is_rate_matrix(q, tol):
                verdict.warnings.append(f"branch k={k} inside [L, U] failed the rate test")
                continue
            verdict.generators.append(GeneratorCandidate.build(q, Branch("case2", (k,)), tol))
    verdict.embeddable = bool(verdict.generators)
    return verdict


def solve_case4(M: StochasticMatrix, decomp: SpectralDecomposition,
                tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Eigenvalues ``1, lam, lam, lam``: embeddable iff ``det(M) > 0``."""
    a = np.asarray(M)
    lam = float(decomp.eigenvalues[-1].real)
    verdict = Verdict(case="CaseIV", embeddable=False)
    verdict.diagnostics["lambda"] = lam
    if lam <= 0:
        return verdict
    if lam == 1.0 or abs(lam - 1.0) <= tol.eig_distinct_rel_tol:
        q = np.zeros_like(a)
    else:
        q = (math.log(lam) / (lam - 1.0)) * (a - np.eye(a.shape[0]))
    verdict.generators = [GeneratorCandidate.build(q, PRINCIPAL, tol)]
    verdict.embeddable = True
    return verdict


def solve_defective(M: StochasticMatrix, structure: DefectiveStructure,
                    tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Non-diagonalizable input: only the principal logarithm can be a generator."""
    tag = "Defective3Block" if structure.jordan_shape == "J3" else "Defective2Blocks"
    verdict = Verdict(case=tag, embeddable=False)
    verdict.diagnostics.update(condition_basis=structure.condition,
                               jordan_shape=structure.jordan_shape)
    if structure.condition > JORDAN_COND_LIMIT:
        verdict.confidence = "low"
        verdict.warnings.append(
            f"Jordan basis condition number {structure.condition:.3g} exceeds {JORDAN_COND_LIMIT:.0e}")
    if min(v for _, _, v in structure.blocks) <= 0:
        return verdict
    log = principal_logarithm(structure)
    if is_rate_matrix(log, tol):
        verdict.generators = [GeneratorCandidate.build(log, Branch("defective"), tol)]
        verdict.embeddable = True
    return verdict


def not_embeddable(tag: str, reason: str) -> Verdict:
    v = Verdict(case=tag, embeddable=False)
    v.diagnostics["reason"] = reason
    return v


def dispatch4x4(M: StochasticMatrix, decomp, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Route a decomposed 4x4 matrix to the solver for its spectral case."""
    cls = classify(M, decomp)
    if cls.tag == "NonEmbeddableSpectrum":
        return not_embeddable(cls.tag, cls.reason)
    if isinstance(decomp, DefectiveStructure):
        return solve_defective(M, decomp, tol)
    solver = {"CaseI": solve_case1, "CaseII": solve_case2,
              "CaseIII": solve_case3, "CaseIV": solve_case4}[cls.tag]
    return solver(M, decomp, tol)


def solve4x4(M, tol: ToleranceConfig = DEFAULT_TOL):
    """Decide embeddability of a 4x4 Markov matrix and list its generators.

    Parameters
    ----------
    M : array_like or StochasticMatrix
        4x4 row-stochastic matrix.
    tol : ToleranceConfig

    Returns
    -------
    EmbeddabilityReport
        Verdict, case label, generators and identifiability class.
    """
    from .solver import solve

    m = M if isinstance(M, StochasticMatrix) else validate_markov(M, tol)
    if m.n != 4:
        raise ValueError(f"solve4x4 needs a 4x4 matrix, got {m.n}x{m.n}")
    return solve(m, tol)


def passing_branches(data: Case2Data, k_lo: int, k_hi: int,
                     tol: ToleranceConfig = DEFAULT_TOL) -> List[int]:
    """Direct sweep: every ``k`` in ``[k_lo, k_hi]`` with ``Log + k V`` a rate matrix."""
    return [k for k in range(k_lo, k_hi + 1) if is_rate_matrix(data.log + k * data.V, tol)]


__all__ = [
    "Case2Data", "compute_case2_data", "solve_case1", "solve_case2", "solve_case3",
    "solve_case4", "solve_defective", "dispatch4x4", "solve4x4", "passing_branches",
]
