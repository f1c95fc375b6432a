"""Eigendecomposition with pairing conventions, 4x4 case taxonomy, eigenvalue-region bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .errors import (
    ComplexDefective,
    DomainError,
    InternalNumericalFailure,
    SingularMatrix,
    UnsupportedDefective,
    UnsupportedMatrix,
)
from .matrices import StochasticMatrix
from .tolerances import DEFAULT_TOL, ToleranceConfig

# eigenvalues this small are indistinguishable from 0 for a matrix of norm ~1
_ZERO_EIG = 1e-13
# max sine of the angle between eigenvectors of a split Jordan block
_PARALLEL_SIN = 1e-3


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """``M = P diag(eigenvalues) P_inv`` with the ordering convention.

    Eigenvalue 1 comes first with the all-ones column, then simple real
    eigenvalues, then repeated real ones, then each conjugate pair as
    ``(mu, conj(mu))`` with ``Im(mu) > 0``.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    P: np.ndarray
    P_inv: np.ndarray
    is_real_P: bool
    multiplicities: Tuple[int, ...]
    condition: float
    eig_margin: float

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def distinct(self) -> bool:
        return all(m == 1 for m in self.multiplicities)

    @property
    def pair_indices(self) -> List[int]:
        """Column indices of the ``mu`` members (``Im > 0``) of conjugate pairs."""
        ev = self.eigenvalues
        return [i for i in range(len(ev)) if ev[i].imag > 0]

    def reconstruction_error(self) -> float:
        rebuilt = (self.P * self.eigenvalues) @ self.P_inv
        return float(np.linalg.norm(rebuilt - self.matrix))


@dataclass(frozen=True, eq=False)
class DefectiveStructure:
    """Real Jordan basis of a non-diagonalizable 4x4 Markov matrix.

    ``jordan_shape`` is ``"J2"`` for ``diag(1, lam, J2(mu))`` and ``"J3"``
    for ``diag(1, J3(lam))``. ``blocks`` lists ``(start, size, value)``.
    """

    matrix: np.ndarray
    jordan_shape: str
    basis: np.ndarray
    basis_inv: np.ndarray
    eigen: Tuple[float, float]
    blocks: Tuple[Tuple[int, int, float], ...]
    condition: float

    @property
    def n(self) -> int:
        return 4

    @property
    def eigenvalues(self) -> np.ndarray:
        vals = []
        for _, size, value in self.blocks:
            vals.extend([value] * size)
        return np.array(vals, dtype=complex)

    def jordan_matrix(self) -> np.ndarray:
        j = np.zeros((4, 4))
        for start, size, value in self.blocks:
            j[start:start + size, start:start + size] = value * np.eye(size) + np.eye(size, k=1)
        return j

    def reconstruction_error(self) -> float:
        rebuilt = self.basis @ self.jordan_matrix() @ self.basis_inv
        return float(np.linalg.norm(rebuilt - self.matrix))


@dataclass(frozen=True)
class SpectralClass:
    """Case label with the eigenvalues that define it."""

    tag: str
    payload: dict = field(default_factory=dict)
    reason: str = ""


CASE_TAGS = ("CaseI", "CaseII", "CaseIII", "CaseIV", "Defective2Blocks",
             "Defective3Block", "NonEmbeddableSpectrum", "GeneralDistinct",
             "GeneralRepeated")


def _close(a: complex, b: complex, rel: float) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def _cluster(w: np.ndarray, vecs: np.ndarray, tol: ToleranceConfig) -> List[List[int]]:
    n = len(w)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    unit = vecs / np.linalg.norm(vecs, axis=0)
    for i in range(n):
        for j in range(i + 1, n):
            merge = _close(w[i], w[j], tol.eig_distinct_rel_tol)
            if not merge and _close(w[i], w[j], tol.jordan_merge_tol):
                cos = abs(np.vdot(unit[:, i], unit[:, j]))
                merge = math.sqrt(max(0.0, 1.0 - cos * cos)) <= _PARALLEL_SIN
            if merge:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _null_basis(a: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis (columns) for the `dim` smallest right singular directions."""
    _, _, vh = np.linalg.svd(a)
    return vh[a.shape[1] - dim:].conj().T


def _geometric_multiplicity(a: np.ndarray, center: float, m: int, tol: ToleranceConfig) -> int:
    s = np.linalg.svd(a - center * np.eye(a.shape[0]), compute_uv=False)
    # floor the scale at 1 (the norm of a Markov matrix) so M close to center*I reads as diagonalizable
    g = int(np.sum(s <= tol.defect_rank_tol * max(s[0], 1.0)))
    return min(max(g, 1), m)


def _top_right_vector(a: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(a)
    return vh[0].conj()


def decompose(M: StochasticMatrix, tol: ToleranceConfig = DEFAULT_TOL):
    """Eigendecomposition of a Markov matrix under the ordering convention.

    Returns a :class:`SpectralDecomposition` when `M` is diagonalizable and
    a :class:`DefectiveStructure` for defective 4x4 input.

    Raises
    ------
    SingularMatrix
        An eigenvalue is numerically zero.
    UnsupportedDefective
        Defective input with ``n != 4``.
    ComplexDefective
        A repeated non-real eigenvalue is defective.
    """
    a = np.asarray(M.entries if isinstance(M, StochasticMatrix) else M, dtype=float)
    n = a.shape[0]
    w, vecs = np.linalg.eig(a)
    if np.min(np.abs(w)) <= _ZERO_EIG:
        raise SingularMatrix("matrix has a zero eigenvalue")
    groups = _cluster(w, vecs, tol)

    clusters = []  # (center, members, is_real)
    for members in groups:
        center = complex(np.mean(w[members]))
        is_real = abs(center.imag) <= tol.eig_distinct_rel_tol * max(1.0, abs(center))
        if is_real:
            center = complex(center.real, 0.0)
        clusters.append((center, members, is_real))

    one = min(range(len(clusters)), key=lambda c: abs(clusters[c][0] - 1.0))
    if abs(clusters[one][0] - 1.0) > 1e-6:
        raise InternalNumericalFailure("no eigenvalue 1 found in a Markov matrix")
    one_cluster = clusters.pop(one)
    clusters = [(1.0 + 0j, one_cluster[1], True)] + clusters

    defective = []
    for center, members, is_real in clusters:
        m = len(members)
        if m == 1:
            continue
        if not is_real:
            if n < 6:
                raise InternalNumericalFailure("repeated complex eigenvalue in a small matrix")
            g = _geometric_multiplicity(a.astype(complex), center, m, tol)
            if g < m:
                raise ComplexDefective(f"defective complex eigenvalue {center}")
            raise UnsupportedMatrix("repeated non-real eigenvalues")
        g = _geometric_multiplicity(a, center.real, m, tol)
        if g < m:
            defective.append((center.real, members, g))

    ones = np.ones(n)
    if defective:
        if n != 4:
            raise UnsupportedDefective(f"defective {n}x{n} matrices are not supported")
        if len(defective) != 1:
            raise InternalNumericalFailure("more than one defective eigenvalue in a 4x4 matrix")
        return _defective_structure(a, clusters, defective[0], tol)

    real_simple, real_rep, pairs = [], [], []
    for center, members, is_real in clusters[1:]:
        if is_real:
            (real_simple if len(members) == 1 else real_rep).append((center.real, members))
        elif center.imag > 0:
            pairs.append((center, members))
    real_simple.sort(key=lambda t: -t[0])
    real_rep.sort(key=lambda t: -t[0])
    pairs.sort(key=lambda t: (-abs(t[0]), -t[0].imag))

    cols, vals, mults = [ones], [1.0 + 0j], [len(clusters[0][1])]
    m1 = len(clusters[0][1])
    if m1 > 1:
        k = _null_basis(a - np.eye(n), m1)
        k = k - np.outer(np.full(n, 1.0 / n), ones @ k)
        extra = np.linalg.svd(k, full_matrices=False)[0][:, :m1 - 1]
        for j in range(m1 - 1):
            cols.append(extra[:, j])
            vals.append(1.0 + 0j)
    for value, members in real_simple:
        v = np.real(vecs[:, members[0]])
        cols.append(v / np.linalg.norm(v))
        vals.append(complex(value))
        mults.append(1)
    for value, members in real_rep:
        k = _null_basis(a - value * np.eye(n), len(members))
        for j in range(len(members)):
            cols.append(k[:, j])
            vals.append(complex(value))
        mults.append(len(members))
    for value, members in pairs:
        v = vecs[:, members[0]]
        v = v / np.linalg.norm(v)
        cols.extend([v, v.conj()])
        vals.extend([value, value.conjugate()])
        mults.extend([1, 1])

    is_real = not pairs
    P = np.column_stack(cols).astype(float if is_real else complex)
    P_inv = np.linalg.inv(P)
    ev = np.array(vals, dtype=complex)
    centers = [c for c, _, _ in clusters]
    margin = min((abs(x - y) / max(1.0, abs(x), abs(y))
                  for i, x in enumerate(centers) for y in centers[i + 1:]), default=math.inf)
    return SpectralDecomposition(
        matrix=a, eigenvalues=ev, P=P, P_inv=P_inv, is_real_P=is_real,
        multiplicities=tuple(mults), condition=float(np.linalg.cond(P)),
        eig_margin=float(margin))


def _defective_structure(a, clusters, defective, tol) -> DefectiveStructure:
    mu, members, g = defective
    m = len(members)
    nmat = a - mu * np.eye(4)
    kbasis = _null_basis(np.linalg.matrix_power(nmat, m), m)
    nk = kbasis.T @ nmat @ kbasis  # nilpotent restriction, m x m
    ones = np.ones(4)

    if m == 3 and g == 1:
        wk = _top_right_vector(nk @ nk)
        chain = [nk @ nk @ wk, nk @ wk, wk]
        cols = [ones] + [kbasis @ c for c in chain]
        blocks = ((0, 1, 1.0), (1, 3, mu))
        shape, eigen = "J3", (mu, mu)
    elif m == 3 and g == 2:
        wk = _top_right_vector(nk)
        top = nk @ wk
        null = _null_basis(nk, 2)
        null = null - np.outer(top, top @ null) / (top @ top)
        u = null[:, int(np.argmax(np.linalg.norm(null, axis=0)))]
        cols = [ones, kbasis @ u, kbasis @ top, kbasis @ wk]
        blocks = ((0, 1, 1.0), (1, 1, mu), (2, 2, mu))
        shape, eigen = "J2", (mu, mu)
    elif m == 2 and g == 1:
        wk = _top_right_vector(nk)
        cols = [ones]
        one_cluster = clusters[0]
        if len(one_cluster[1]) == 2:
            k = _null_basis(a - np.eye(4), 2)
            k = k - np.outer(np.full(4, 0.25), ones @ k)
            cols.append(np.linalg.svd(k, full_matrices=False)[0][:, 0])
            lam = 1.0
        else:
            rest = [c for c in clusters[1:] if len(c[1]) == 1]
            if len(rest) != 1 or not rest[0][2]:
                raise InternalNumericalFailure("unexpected spectrum around a Jordan block")
            lam = rest[0][0].real
            cols.append(_null_basis(a - lam * np.eye(4), 1)[:, 0])
        cols += [kbasis @ (nk @ wk), kbasis @ wk]
        blocks = ((0, 1, 1.0), (1, 1, lam), (2, 2, mu))
        shape, eigen = "J2", (lam, mu)
    else:
        raise InternalNumericalFailure(f"unsupported Jordan structure m={m}, g={g}")

    basis = np.column_stack(cols).real
    basis_inv = np.linalg.inv(basis)
    return DefectiveStructure(
        matrix=a, jordan_shape=shape, basis=basis, basis_inv=basis_inv,
        eigen=eigen, blocks=blocks, condition=float(np.linalg.cond(basis)))


def classify(M: StochasticMatrix, decomp) -> SpectralClass:
    """Assign the case label (4x4 taxonomy, or general for other sizes)."""
    a = np.asarray(M.entries if isinstance(M, StochasticMatrix) else M, dtype=float)
    det = float(np.linalg.det(a))
    if det <= 0:
        return SpectralClass("NonEmbeddableSpectrum", {"det": det}, "determinant is not positive")
    if isinstance(decomp, DefectiveStructure):
        lam, mu = decomp.eigen
        payload = {"lambda": lam, "mu": mu}
        if lam <= 0 or mu <= 0:
            return SpectralClass("NonEmbeddableSpectrum", payload,
                                 "defective matrix with a non-positive eigenvalue")
        tag = "Defective3Block" if decomp.jordan_shape == "J3" else "Defective2Blocks"
        return SpectralClass(tag, payload)

    ev = decomp.eigenvalues
    # group by multiplicity in decomposition order
    groups, pos = [], 0
    for m in decomp.multiplicities:
        groups.append((ev[pos], m))
        pos += m
    for value, m in groups:
        if value.imag == 0 and value.real < 0 and m % 2 == 1:
            return SpectralClass("NonEmbeddableSpectrum", {"eigenvalue": value.real},
                                 "negative eigenvalue of odd multiplicity")

    if decomp.n != 4:
        if decomp.distinct:
            return SpectralClass("GeneralDistinct")
        return SpectralClass("GeneralRepeated")

    one_mult = groups[0][1]
    rest = groups[1:]
    pairs = [g for g in rest if g[0].imag > 0]
    if pairs:
        lam = float(ev[1].real) if one_mult == 1 else 1.0
        return SpectralClass("CaseII", {"lambda": lam, "mu": complex(pairs[0][0])})
    if one_mult == 4:
        return SpectralClass("CaseIV", {"lambda": 1.0})
    reals = [(v.real, m) for v, m in rest]
    if one_mult == 1 and len(reals) == 1 and reals[0][1] == 3:
        return SpectralClass("CaseIV", {"lambda": reals[0][0]})
    repeated = [r for r in reals if r[1] == 2]
    if repeated:
        mu = repeated[0][0]
        lam = 1.0 if one_mult == 2 else [r for r in reals if r[1] == 1][0][0]
        return SpectralClass("CaseIII", {"lambda": lam, "mu": mu})
    if all(v > 0 for v, _ in reals) and all(m == 1 for _, m in reals):
        return SpectralClass("CaseI", {"eigenvalues": [1.0] * one_mult + [v for v, _ in reals]})
    return SpectralClass("NonEmbeddableSpectrum", {}, "spectrum outside the 4x4 taxonomy")


# ---------------------------------------------------------------- bounds


def bound_b_n(n: int, lam: complex, trace_q: float) -> float:
    """Bound on ``|Im(lam)|`` for a non-real eigenvalue of an n x n rate matrix."""
    if n < 3:
        raise DomainError("the imaginary-part bound needs n >= 3")
    re = complex(lam).real
    if re > 0 or trace_q > 0:
        raise DomainError("need Re(lambda) <= 0 and trace <= 0")
    radicand = 2.0 * trace_q * re - re * re
    if radicand < 0:
        if radicand < -1e-12 * max(1.0, trace_q * trace_q):
            raise DomainError(f"negative radicand {radicand!r}")
        radicand = 0.0
    return min(math.sqrt(radicand), -re / math.tan(math.pi / n))


def bound_B_n(n: int, trace_q: float) -> float:
    """Spectrum-free bound on imaginary parts, given only the trace."""
    if n < 3:
        raise DomainError("B_n needs n >= 3")
    if n <= 6:
        return -trace_q / (2.0 * math.tan(math.pi / n))
    return -math.sqrt(3.0) / 2.0 * trace_q


def beta_n(n: int, z: complex, det_m: float) -> float:
    """Imaginary-part bound for any logarithm branch of an eigenvalue `z` of M."""
    modulus = abs(z)
    if not (0 < modulus <= 1 + 1e-12) or det_m <= 0:
        raise DomainError("need 0 < |z| <= 1 and det(M) > 0")
    if n < 3:
        raise DomainError("beta_n needs n >= 3")
    lz = min(math.log(modulus), 0.0)
    ld = math.log(det_m)
    radicand = 2.0 * ld * lz - lz * lz
    if radicand < 0:
        if radicand < -1e-12 * max(1.0, ld * ld):
            raise DomainError(f"negative radicand {radicand!r}")
        radicand = 0.0
    return min(math.sqrt(radicand), -lz / math.tan(math.pi / n))


def det_threshold(n: int) -> float:
    """Determinant above which the principal logarithm is the only possible generator."""
    if n <= 2:
        return 0.0
    return min(math.exp(-2.0 * math.pi / math.sqrt(3.0)),
               math.exp(-2.0 * math.pi * math.tan(math.pi / n)))


def det_shortcut(M) -> bool:
    a = np.asarray(M.entries if isinstance(M, StochasticMatrix) else M, dtype=float)
    return float(np.linalg.det(a)) > det_threshold(a.shape[0])


def circulant_generator(n: int, alpha: float) -> np.ndarray:
    """Cyclic rate matrix: ``-alpha`` on the diagonal, ``alpha`` on the cyclic superdiagonal."""
    q = -alpha * np.eye(n)
    for i in range(n):
        q[i, (i + 1) % n] += alpha
    return q
