"""Top-level entry point: validate, decompose, dispatch, report."""

from __future__ import annotations

import numpy as np

from .distinct import enumerate_generators_distinct
from .embed4 import dispatch4x4, not_embeddable
from .errors import SingularMatrix, UnsupportedMatrix
from .matrices import (
    PRINCIPAL,
    GeneratorCandidate,
    StochasticMatrix,
    is_rate_matrix,
    principal_logarithm,
    validate_markov,
)
from .report import EmbeddabilityReport, build_report
from .spectral import classify, decompose, det_shortcut
from .tolerances import DEFAULT_TOL, ToleranceConfig
from .verdict import Verdict


def _general_repeated(m: StochasticMatrix, decomp, tol: ToleranceConfig) -> Verdict:
    # above the determinant threshold only the principal log can be a generator
    if not det_shortcut(m):
        raise UnsupportedMatrix(
            f"repeated eigenvalues in a {m.n}x{m.n} matrix below the determinant threshold")
    verdict = Verdict(case="GeneralRepeated", embeddable=False)
    log = principal_logarithm(decomp)
    if np.max(np.abs(log.imag)) <= tol.reconstruct_tol and is_rate_matrix(log, tol):
        verdict.generators = [GeneratorCandidate.build(log, PRINCIPAL, tol)]
        verdict.embeddable = True
    return verdict


def decide(m: StochasticMatrix, tol: ToleranceConfig = DEFAULT_TOL):
    """Solver verdict and eigenvalues for a validated matrix.

    Raises
    ------
    UnsupportedMatrix
        The input lies outside the supported cases.
    """
    a = m.entries
    if np.linalg.det(a) <= 0:
        return not_embeddable("NonEmbeddableSpectrum", "determinant is not positive"), None
    try:
        decomp = decompose(m, tol)
    except SingularMatrix:
        return not_embeddable("NonEmbeddableSpectrum", "zero eigenvalue"), None
    ev = decomp.eigenvalues
    if m.n == 4:
        return dispatch4x4(m, decomp, tol), ev
    cls = classify(m, decomp)
    if cls.tag == "NonEmbeddableSpectrum":
        return not_embeddable(cls.tag, cls.reason), ev
    if cls.tag == "GeneralDistinct":
        return enumerate_generators_distinct(m, decomp, tol), ev
    return _general_repeated(m, decomp, tol), ev


def solve(matrix, tol: ToleranceConfig = DEFAULT_TOL) -> EmbeddabilityReport:
    """Decide embeddability of a Markov matrix of any size.

    Parameters
    ----------
    matrix : array_like or StochasticMatrix
        Row-stochastic square matrix; raw arrays are validated first.
    tol : ToleranceConfig

    Returns
    -------
    EmbeddabilityReport
        ``embeddable`` is None (case ``"Unsupported"``) for input the solvers
        do not cover, such as defective matrices with ``n != 4``.

    Raises
    ------
    ValidationError
        `matrix` is not a Markov matrix.
    """
    m = matrix if isinstance(matrix, StochasticMatrix) else validate_markov(matrix, tol)
    try:
        verdict, ev = decide(m, tol)
    except UnsupportedMatrix as exc:
        report = build_report(m.entries, None, tol)
        report.diagnostics["unsupported"] = f"{type(exc).__name__}: {exc}"
        return report
    return build_report(m.entries, verdict, tol, eigenvalues=ev)
