"""Repeated real eigenvalue case: generators ``Q_k(x, y, z)`` on a hyperboloid sheet.

A 4x4 Markov matrix ``M = P diag(1, lam, mu, mu) P^-1`` has the real
zero-row-sum logarithms

    Q_k(x, y, z) = L + (2 pi k + Arg mu) V(x, y, z),   x z - y^2 = 1,

with ``L = P diag(0, log lam, log|mu|, log|mu|) P^-1`` and ``V`` linear in
``(x, y, z)``. Off-diagonal nonnegativity carves a polyhedron ``P_k`` out of
parameter space; generators correspond to points of ``P_k`` on the sheet
``x, z > 0`` of the hyperboloid. The search below walks vertices, then
edges, then faces of ``P_k``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from .errors import DegenerateScale
from .matrices import Branch, GeneratorCandidate, StochasticMatrix, is_rate_matrix
from .spectral import SpectralDecomposition
from .tolerances import DEFAULT_TOL, ToleranceConfig
from .verdict import Verdict

TWO_PI = 2.0 * math.pi
ON_SHEET_TOL = 1e-10
_DEDUP = 1e-8
_PLANE_EPS = 1e-12
_LADDER = (10.0, 100.0, 1e4)
# inclusion nudge for boundary branches such as mu = -exp(-pi)
_NUDGE = 1e-9

EMPTY, FINITE, INFINITE = "Empty", "FinitePoints", "Infinite"

Point = Tuple[float, float, float]


# ---------------------------------------------------------------- basis


@dataclass(frozen=True, eq=False)
class Case3Basis:
    """Real eigenbasis and the fixed part ``L`` of the logarithm family."""

    L: np.ndarray
    P: np.ndarray
    P_inv: np.ndarray
    mu: float
    arg_mu: float
    lam: float

    @classmethod
    def from_decomposition(cls, decomp: SpectralDecomposition) -> "Case3Basis":
        ev = decomp.eigenvalues.real
        if not decomp.is_real_P or decomp.n != 4:
            raise ValueError("need a real 4x4 eigenbasis")
        mu, lam = float(ev[2]), float(ev[1])
        if abs(ev[3] - mu) > 1e-6 * max(1.0, abs(mu)):
            raise ValueError("columns 2 and 3 must carry the repeated eigenvalue")
        P, P_inv = decomp.P.real, decomp.P_inv.real
        logs = np.array([0.0, math.log(lam) if lam != 1.0 else 0.0,
                         math.log(abs(mu)), math.log(abs(mu))])
        L = (P * logs) @ P_inv
        return cls(L=L, P=P, P_inv=P_inv, mu=mu,
                   arg_mu=math.pi if mu < 0 else 0.0, lam=lam)

    def scale(self, k: int) -> float:
        return TWO_PI * k + self.arg_mu

    def V(self, x: float, y: float, z: float) -> np.ndarray:
        w = np.zeros((4, 4))
        w[2:, 2:] = [[-y, x], [-z, y]]
        return self.P @ w @ self.P_inv

    def plane_coefficients(self) -> np.ndarray:
        """``(A, B, C)`` with ``V_ij = A x + B y + C z``, shape ``(4, 4, 3)``."""
        p3, p4 = self.P[:, 2], self.P[:, 3]
        q3, q4 = self.P_inv[2], self.P_inv[3]
        return np.stack([np.outer(p3, q4),
                         np.outer(p4, q4) - np.outer(p3, q3),
                         -np.outer(p4, q3)], axis=-1)


def build_Qk(basis: Case3Basis, k: int, x: float, y: float, z: float) -> np.ndarray:
    """``L + (2 pi k + Arg mu) V(x, y, z)``."""
    return basis.L + basis.scale(k) * basis.V(x, y, z)


def k_range(mu: float) -> Tuple[int, int]:
    """Integers ``k`` for which ``Q_k`` can be a rate matrix.

    Empty (``lo > hi``) when no branch qualifies.
    """
    if mu == 0 or not -1.0 <= mu < 1.0:
        raise ValueError(f"mu must lie in [-1, 1) and be nonzero, got {mu!r}")
    r = math.log(abs(mu)) / TWO_PI
    shift = 0.0 if mu > 0 else -0.5
    return math.ceil(shift + r - _NUDGE), math.floor(shift - r + _NUDGE)


# ---------------------------------------------------------------- halfspaces


@dataclass(frozen=True, eq=False)
class HalfspaceSystem:
    """Inequalities ``normals @ p >= rhs - slack`` describing a polyhedron in R^3.

    Rows whose normal vanishes are constant constraints: they either hold
    everywhere or make the polyhedron empty.
    """

    normals: np.ndarray
    rhs: np.ndarray
    slack: float = 0.0
    labels: Tuple[Tuple[int, int], ...] = ()
    planes: Optional[np.ndarray] = None  # raw (A, B, C, D) rows
    orientation: float = 1.0

    @property
    def constant_rows(self) -> np.ndarray:
        return np.linalg.norm(self.normals, axis=1) <= _PLANE_EPS

    @property
    def constant_ok(self) -> bool:
        c = self.constant_rows
        return bool(np.all(self.rhs[c] <= self.slack))

    def residuals(self, p) -> np.ndarray:
        return self.normals @ np.asarray(p, dtype=float) - self.rhs

    def feasible(self, p, extra: float = 0.0) -> bool:
        p = np.asarray(p, dtype=float)
        # relative slack absorbs rounding in normals @ p for large |p|
        band = self.slack + extra + 1e-9 * np.linalg.norm(self.normals, axis=1) * np.linalg.norm(p)
        return bool(np.all(self.residuals(p) >= -band))

    def interior_margin(self, p) -> float:
        live = ~self.constant_rows
        if not live.any():
            return math.inf
        return float(np.min(self.residuals(p)[live]))


def build_halfspaces(basis: Case3Basis, k: int,
                     tol: ToleranceConfig = DEFAULT_TOL) -> HalfspaceSystem:
    """Halfspaces whose intersection is ``{p : Q_k(p) has nonnegative off-diagonals}``.

    Raises
    ------
    DegenerateScale
        ``2 pi k + Arg mu == 0``; every ``p`` then yields the principal log.
    """
    s = basis.scale(k)
    if s == 0.0:
        raise DegenerateScale("2*pi*k + Arg(mu) vanishes; use the principal logarithm")
    coef = basis.plane_coefficients()
    labels, rows, normals, rhs = [], [], [], []
    sign = 1.0 if s > 0 else -1.0
    for i, j in itertools.permutations(range(4), 2):
        a, b, c = coef[i, j]
        d = -basis.L[i, j] / s
        labels.append((i, j))
        rows.append((a, b, c, d))
        normals.append((sign * a, sign * b, sign * c))
        rhs.append(sign * d)
    return HalfspaceSystem(
        normals=np.array(normals), rhs=np.array(rhs), slack=tol.nonneg_tol / abs(s),
        labels=tuple(labels), planes=np.array(rows), orientation=sign)


# ---------------------------------------------------------------- vertices


def _dedup(points: Sequence[np.ndarray], eps: float = _DEDUP) -> List[np.ndarray]:
    out: List[np.ndarray] = []
    for p in points:
        if all(np.linalg.norm(p - q) > eps * max(1.0, np.linalg.norm(q)) for q in out):
            out.append(p)
    return out


def is_unbounded(hs: HalfspaceSystem) -> bool:
    """True when the recession cone ``{d : normals @ d >= 0}`` is nontrivial."""
    live = ~hs.constant_rows
    a = hs.normals[live]
    if a.size == 0:
        return True
    a = a / np.linalg.norm(a, axis=1, keepdims=True)
    for axis in range(3):
        for sgn in (1.0, -1.0):
            c = np.zeros(3)
            c[axis] = -sgn
            res = linprog(c, A_ub=-a, b_ub=np.zeros(len(a)), bounds=[(-1, 1)] * 3,
                          method="highs")
            if res.status == 0 and -res.fun > 1e-9:
                return True
    return False


def enumerate_vertices(hs: HalfspaceSystem) -> Tuple[List[Point], bool]:
    """Feasible vertices of the polyhedron and whether it is unbounded.

    Every triple of non-constant planes is solved; nonsingular solutions
    that satisfy all inequalities (with slack) are kept and deduplicated.
    """
    if not hs.constant_ok:
        return [], False
    idx = np.nonzero(~hs.constant_rows)[0]
    found = []
    for tri in itertools.combinations(idx, 3):
        a = hs.normals[list(tri)]
        scale = np.prod(np.linalg.norm(a, axis=1))
        if abs(np.linalg.det(a)) <= _PLANE_EPS * scale:
            continue
        p = np.linalg.solve(a, hs.rhs[list(tri)])
        if np.all(np.isfinite(p)) and hs.feasible(p):
            found.append(p)
    verts = _dedup(found)
    return [tuple(float(v) for v in p) for p in verts], is_unbounded(hs)


# ---------------------------------------------------------------- hyperboloid


def f_value(p) -> float:
    """``x z - y^2 - 1``; zero on the hyperboloid."""
    x, y, z = p
    return x * z - y * y - 1.0


def sheet_value(p) -> float:
    """Concave function that is positive inside the sheet ``x, z > 0`` and zero on it.

    ``(x + z) - |(x - z, 2y, 2)|``; unlike ``f`` it does not vanish on the
    other sheet, so sign changes detect crossings of the positive sheet only.
    """
    x, y, z = p
    return (x + z) - math.sqrt((x - z) ** 2 + 4.0 * y * y + 4.0)


def on_sheet(p, tol: float = ON_SHEET_TOL) -> bool:
    x, y, z = p
    scale = max(1.0, abs(x * z), y * y)
    return x > 0 and z > 0 and abs(f_value(p)) <= tol * scale


def project_to_sheet(p) -> Point:
    """One Newton step onto ``x z - y^2 = 1`` along the gradient."""
    x, y, z = (float(v) for v in p)
    g = np.array([z, -2.0 * y, x])
    gg = float(g @ g)
    if gg > 0:
        x, y, z = np.array([x, y, z]) - f_value((x, y, z)) * g / gg
    return (float(x), float(y), float(z))


def _quadratic_roots(a: float, b: float, c: float) -> List[float]:
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0:
        return []
    a, b, c = a / scale, b / scale, c / scale
    if abs(a) <= 1e-14:
        return [] if abs(b) <= 1e-14 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        if disc < -1e-12:
            return []
        disc = 0.0
    sq = math.sqrt(disc)
    # cancellation-free pair
    qv = -0.5 * (b + math.copysign(sq, b))
    roots = [qv / a]
    roots.append(c / qv if qv != 0 else roots[0])
    return sorted(roots)


def line_roots(p0, d, lo: float = -math.inf, hi: float = math.inf) -> List[Point]:
    """Points of the positive sheet on ``p0 + t d`` with ``lo <= t <= hi``.

    ``f`` restricted to the line is quadratic in ``t``; tangential double
    roots are reported once.
    """
    p0, d = np.asarray(p0, float), np.asarray(d, float)
    a = d[0] * d[2] - d[1] ** 2
    b = p0[0] * d[2] + p0[2] * d[0] - 2 * p0[1] * d[1]
    c = f_value(p0)
    span = max(1.0, abs(lo) if math.isfinite(lo) else 1.0, abs(hi) if math.isfinite(hi) else 1.0)
    eps = 1e-9 * span
    out = []
    for t in _quadratic_roots(a, b, c):
        if lo - eps <= t <= hi + eps:
            p = p0 + min(max(t, lo), hi) * d
            if p[0] > 0 and p[2] > 0:
                out.append(p)
    pts = _dedup(out, 1e-7)
    return [tuple(float(v) for v in p) for p in pts]


# ---------------------------------------------------------------- steps


@dataclass
class Hit:
    """Points located by one search step plus the evidence they carry."""

    points: List[Point] = field(default_factory=list)
    infinite: bool = False

    def __bool__(self):
        return bool(self.points)


def intersect_step1(hs: Optional[HalfspaceSystem], vertices: Sequence[Point]) -> Hit:
    """Vertex test: a sign change of the sheet function, or a vertex on the sheet."""
    vals = [sheet_value(v) for v in vertices]
    neg = [v for v, s in zip(vertices, vals) if s < 0]
    pos = [v for v, s in zip(vertices, vals) if s > 0]
    for vn in neg:
        for vp in pos:
            if on_sheet(vn) or on_sheet(vp):
                continue
            d = np.subtract(vp, vn)
            pts = line_roots(vn, d, 0.0, 1.0)
            if pts:
                return Hit([project_to_sheet(pts[0])], infinite=True)
    touching = [v for v in vertices if on_sheet(v)]
    if touching:
        return Hit([tuple(v) for v in touching], infinite=False)
    return Hit()


def _edge_lines(hs: HalfspaceSystem):
    idx = np.nonzero(~hs.constant_rows)[0]
    for r1, r2 in itertools.combinations(idx, 2):
        n1, n2 = hs.normals[r1], hs.normals[r2]
        d = np.cross(n1, n2)
        nd = np.linalg.norm(d)
        if nd <= _PLANE_EPS * np.linalg.norm(n1) * np.linalg.norm(n2):
            continue
        a = np.vstack([n1, n2])
        p0 = np.linalg.lstsq(a, hs.rhs[[r1, r2]], rcond=None)[0]
        d = d / nd
        # feasible parameter interval along the line
        lo, hi = -math.inf, math.inf
        ok = True
        for r in range(len(hs.rhs)):
            ad = hs.normals[r] @ d
            gap = hs.normals[r] @ p0 - hs.rhs[r] + hs.slack
            if abs(ad) <= 1e-12 * max(1.0, np.linalg.norm(hs.normals[r])):
                if gap < -1e-9 * max(1.0, np.linalg.norm(hs.normals[r]) * np.linalg.norm(p0)):
                    ok = False
                    break
                continue
            t = -gap / ad
            if ad > 0:
                lo = max(lo, t)
            else:
                hi = min(hi, t)
        if ok and lo <= hi + 1e-9 * max(1.0, abs(lo) if math.isfinite(lo) else 1.0):
            yield p0, d, lo, hi


def intersect_step2(hs: HalfspaceSystem) -> Hit:
    """Edge test: roots of ``f`` on every feasible edge line."""
    hit = Hit()
    if not hs.constant_ok:
        return hit
    for p0, d, lo, hi in _edge_lines(hs):
        pts = [p for p in line_roots(p0, d, lo, hi) if hs.feasible(p)]
        if len(pts) >= 2:
            return Hit([project_to_sheet(p) for p in pts], infinite=True)
        hit.points.extend(project_to_sheet(p) for p in pts)
    hit.points = [tuple(p) for p in _dedup([np.array(p) for p in hit.points], 1e-7)]
    return hit


def plane_sheet_points(A: float, B: float, C: float, D: float,
                       bounded: bool = True) -> Tuple[List[Point], bool]:
    """Sample points of ``{A x + B y + C z = D}`` on the positive sheet.

    Substituting ``z = (1 + y^2) / x`` gives a quadratic in ``y`` whose
    discriminant is ``Delta(x) = (B^2 - 4AC) x^2 + 4CD x - 4C^2``.

    Returns
    -------
    points : list of (x, y, z)
        Samples of the intersection; for a bounded conic, a spread of points
        around it, otherwise a ladder of increasing ``x``.
    curve : bool
        True when the intersection is a curve rather than a single
        tangency point.
    """
    a2, a1, a0 = B * B - 4 * A * C, 4 * C * D, -4 * C * C
    scale = max(abs(a2), abs(a1), abs(a0), 1e-300)
    deg = 1e-12 * scale

    def solve_y(x):
        if x <= 0:
            return []
        if abs(C) > _PLANE_EPS * max(1.0, abs(A), abs(B)):
            disc = a2 * x * x + a1 * x + a0
            if disc < -1e-10 * scale * max(1.0, x * x):
                return []
            sq = math.sqrt(max(disc, 0.0))
            ys = {(-B * x + sq) / (2 * C), (-B * x - sq) / (2 * C)}
        elif abs(B) > _PLANE_EPS * max(1.0, abs(A)):
            ys = {(D - A * x) / B}
        elif abs(A * x - D) <= 1e-12 * max(1.0, abs(D)):
            ys = {0.0}
        else:
            return []
        return [(x, y, (1 + y * y) / x) for y in ys]

    if a2 < -deg:
        roots = _quadratic_roots(a2, a1, a0)
        if len(roots) < 2 or roots[1] <= 0:
            return [], False
        r1, r2 = max(roots[0], 0.0), roots[1]
        if r2 - r1 <= 1e-9 * max(1.0, r2):
            return solve_y(0.5 * (r1 + r2)), False
        xs = [r1 + (r2 - r1) * t for t in (0.5, 0.1, 0.9, 0.25, 0.75, 0.01, 0.99)]
        return [p for x in xs for p in solve_y(x)], True

    # x is unbounded on the intersection; none of it fits in a bounded polyhedron
    if bounded:
        return [], False
    if abs(a2) <= deg and abs(a1) <= deg:
        if abs(C) <= _PLANE_EPS and abs(B) <= _PLANE_EPS:
            if abs(A) <= _PLANE_EPS or D / A <= 0:
                return [], False
            x0 = D / A
            return [(x0, y, (1 + y * y) / x0) for y in (0.0, 1.0, -1.0, 10.0, -10.0)], True
        ladder = [1.0]
    elif abs(a2) <= deg:
        if a1 <= 0:
            return [], False
        ladder = [-a0 / a1]
    else:
        roots = [r for r in _quadratic_roots(a2, a1, a0) if r > 0]
        peak = -a1 / (2 * a2)
        ladder = roots[:1] + ([peak] if peak > 0 else []) + ([2 * max(roots)] if roots else [])
    ladder += list(_LADDER)
    pts = [p for x in ladder for p in solve_y(x)]
    return pts, True


def intersect_step3(hs: HalfspaceSystem, bounded: bool = True) -> Hit:
    """Face test: intersect each face plane with the sheet and test membership."""
    hit = Hit()
    if not hs.constant_ok:
        return hit
    for r in np.nonzero(~hs.constant_rows)[0]:
        A, B, C = hs.normals[r]
        pts, curve = plane_sheet_points(A, B, C, hs.rhs[r], bounded)
        inside = [project_to_sheet(p) for p in pts if hs.feasible(p)]
        inside = [p for p in inside if hs.feasible(p)]
        if not inside:
            continue
        if curve and len(inside) >= 2:
            return Hit(inside[:1], infinite=True)
        hit.points.extend(inside[:1])
    hit.points = [tuple(p) for p in _dedup([np.array(p) for p in hit.points], 1e-7)]
    return hit


# ---------------------------------------------------------------- solver


@dataclass
class Case3Solution:
    """Search outcome for one branch ``k``.

    ``points`` holds the located parameters on the positive sheet; the first
    is the representative. ``principal`` marks the branch where every point
    gives the principal logarithm.
    """

    k: int
    cardinality_class: str
    points: List[Point] = field(default_factory=list)
    principal: bool = False
    unbounded: bool = False
    vertex_count: int = 0

    @property
    def point(self) -> Optional[Point]:
        return self.points[0] if self.points else None

    def generator_count(self) -> float:
        if self.cardinality_class == INFINITE:
            return math.inf
        return len(self.points)

    def to_dict(self) -> dict:
        return {"k": self.k, "cardinality_class": self.cardinality_class,
                "points": [list(p) for p in self.points], "principal": self.principal,
                "unbounded": self.unbounded, "vertex_count": self.vertex_count}

    @classmethod
    def from_dict(cls, data: dict) -> "Case3Solution":
        return cls(k=data["k"], cardinality_class=data["cardinality_class"],
                   points=[tuple(p) for p in data["points"]],
                   principal=data.get("principal", False),
                   unbounded=data.get("unbounded", False),
                   vertex_count=data.get("vertex_count", 0))


def search_branch(basis: Case3Basis, k: int, tol: ToleranceConfig = DEFAULT_TOL) -> Case3Solution:
    """Locate points of ``P_k`` on the positive sheet for one ``k``."""
    if basis.scale(k) == 0.0:
        if is_rate_matrix(basis.L, tol):
            return Case3Solution(k, FINITE, [(1.0, 0.0, 1.0)], principal=True)
        return Case3Solution(k, EMPTY)
    hs = build_halfspaces(basis, k, tol)
    vertices, unbounded = enumerate_vertices(hs)
    sol = Case3Solution(k, EMPTY, unbounded=unbounded, vertex_count=len(vertices))
    if not vertices and not unbounded:
        return sol

    # tangency points are collected across all steps; a cut stops the search
    found: List[Point] = []
    steps = (lambda: intersect_step1(hs, vertices),
             lambda: intersect_step2(hs),
             lambda: intersect_step3(hs, bounded=not unbounded))
    for step in steps:
        hit = step()
        if hit.infinite:
            res = _accept(sol, hit.points, basis, k, tol, INFINITE)
            if res.cardinality_class != EMPTY:
                return res
        found.extend(hit.points)
    if not found:
        return sol
    pts = [tuple(p) for p in _dedup([np.array(p) for p in found], 1e-7)]
    interior = any(hs.interior_margin(p) > 10 * hs.slack + 1e-12 for p in pts)
    return _accept(sol, pts, basis, k, tol, INFINITE if interior else FINITE)


def _accept(sol, points, basis, k, tol, cls) -> Case3Solution:
    good = [p for p in points if on_sheet(p) and is_rate_matrix(build_Qk(basis, k, *p), tol)]
    if not good:
        return sol
    sol.points = good if cls == FINITE else good[:1]
    sol.cardinality_class = cls
    return sol


def solve_case3(M: StochasticMatrix, decomp: SpectralDecomposition,
                tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Embeddability and one generator per admissible branch ``k``.

    Returns a :class:`Verdict` whose ``solutions`` list one
    :class:`Case3Solution` per ``k`` in range and whose ``generators`` hold
    ``Q_k`` at each representative point.
    """
    basis = Case3Basis.from_decomposition(decomp)
    verdict = Verdict(case="CaseIII", embeddable=False)
    lo, hi = k_range(basis.mu)
    verdict.bounds["k_range"] = [lo, hi]
    verdict.diagnostics.update(condition_P=decomp.condition, eig_margin=decomp.eig_margin,
                               mu=basis.mu, lambda_=basis.lam)
    for k in range(lo, hi + 1):
        sol = search_branch(basis, k, tol)
        verdict.solutions.append(sol)
        if sol.cardinality_class == EMPTY:
            continue
        kind = "principal" if sol.principal else "case3"
        branch = Branch(kind, (k,), sol.point) if not sol.principal else Branch("principal")
        verdict.generators.append(GeneratorCandidate.build(build_Qk(basis, k, *sol.point), branch, tol))
    verdict.embeddable = bool(verdict.generators)
    if any(s.unbounded for s in verdict.solutions):
        verdict.warnings.append("unbounded polyhedron met; emptiness certified only up to the sample ladder")
    return verdict
