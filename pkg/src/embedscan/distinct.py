"""All Markov generators of an n x n Markov matrix with pairwise distinct eigenvalues."""

from __future__ import annotations

import itertools
import math
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .matrices import (
    Branch,
    GeneratorCandidate,
    StochasticMatrix,
    is_rate_matrix,
)
from .spectral import SpectralDecomposition, beta_n
from .tolerances import DEFAULT_TOL, ToleranceConfig
from .verdict import Verdict

TWO_PI = 2.0 * math.pi
# pushes floor/ceil toward inclusion; a spurious k only costs one rate test
_NUDGE = 1e-9


def branch_logarithm(decomp: SpectralDecomposition, k: Sequence[int]) -> np.ndarray:
    """``Log_{k_1..k_s}(M)``: shift the j-th conjugate pair by ``2*pi*k_j*i``.

    The result is complex; callers check the imaginary residue.
    """
    pairs = decomp.pair_indices
    if len(k) != len(pairs):
        raise ValueError(f"need {len(pairs)} branch indices, got {len(k)}")
    logs = np.log(decomp.eigenvalues.astype(complex))
    logs[0] = 0.0
    for idx, kj in zip(pairs, k):
        logs[idx] += TWO_PI * kj * 1j
        logs[idx + 1] = logs[idx].conjugate()
    return (decomp.P * logs) @ decomp.P_inv


def branch_interval(arg_mu: float, beta: float) -> Tuple[int, int]:
    lo = math.ceil((-arg_mu - beta) / TWO_PI - _NUDGE)
    hi = math.floor((-arg_mu + beta) / TWO_PI + _NUDGE)
    return lo, hi


def branch_bounds(decomp: SpectralDecomposition, n: int, det_m: float) -> List[Tuple[int, int]]:
    """Integer interval of admissible ``k_j`` for each conjugate pair.

    An interval with ``lo > hi`` is empty. A pair whose modulus bound is
    undefined (no rate matrix can have that spectrum) also gets an empty
    interval.
    """
    out = []
    for idx in decomp.pair_indices:
        mu = complex(decomp.eigenvalues[idx])
        try:
            beta = beta_n(n, mu, det_m)
        except DomainError:
            out.append((0, -1))
            continue
        out.append(branch_interval(math.atan2(mu.imag, mu.real), beta))
    return out


def generator_count_bound(n: int, det_m: float, s: int) -> int:
    """Upper bound on the number of Markov generators from the determinant."""
    if n <= 2 or s == 0:
        return 1
    ld = math.log(det_m)
    if n >= 6:
        base = math.floor(1 - math.sqrt(3.0) * ld / TWO_PI)
    else:
        base = math.floor(1 - ld / (TWO_PI * math.tan(math.pi / n)))
    return base ** s


def sharper_count_bound(intervals: Sequence[Tuple[int, int]]) -> int:
    return math.prod(max(0, hi - lo + 1) for lo, hi in intervals)


def _sort_key(g: GeneratorCandidate):
    return (float(np.abs(g.matrix).sum()), g.branch.k)


def enumerate_generators_distinct(M: StochasticMatrix, decomp: SpectralDecomposition,
                                  tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Test every branch logarithm inside the admissible box.

    Returns a :class:`Verdict` listing every Markov generator, sorted by
    entrywise 1-norm then branch.
    """
    n = decomp.n
    if not decomp.distinct:
        raise ValueError("eigenvalues are not pairwise distinct")
    ev = decomp.eigenvalues
    det_m = float(np.linalg.det(decomp.matrix))
    verdict = Verdict(case="GeneralDistinct", embeddable=False)
    if det_m <= 0 or any(v.imag == 0 and v.real <= 0 for v in ev):
        verdict.diagnostics["reason"] = "non-positive real eigenvalue"
        return verdict

    s = len(decomp.pair_indices)
    intervals = branch_bounds(decomp, n, det_m) if s else []
    verdict.bounds.update(
        branch_bounds=[list(t) for t in intervals],
        generator_count_bound=generator_count_bound(n, det_m, s),
        sharper_count_bound=sharper_count_bound(intervals),
    )
    ranges = [range(lo, hi + 1) for lo, hi in intervals]
    found = []
    for k in itertools.product(*ranges):
        q = branch_logarithm(decomp, k)
        if not is_rate_matrix(q, tol):
            continue
        branch = Branch("distinct", tuple(int(v) for v in k)) if s else Branch("principal")
        found.append(GeneratorCandidate.build(q, branch, tol))
    found.sort(key=_sort_key)
    verdict.generators = found
    verdict.embeddable = bool(found)
    if len(found) > verdict.bounds["generator_count_bound"]:
        verdict.warnings.append("generator count exceeds the determinant bound")
    verdict.diagnostics["condition_P"] = decomp.condition
    return verdict
