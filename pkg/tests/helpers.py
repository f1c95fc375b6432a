"""Fixture builders and independent oracles shared by the test modules."""

import math

import numpy as np
from scipy.linalg import expm

from embedscan.case3 import Case3Basis
from embedscan.spectral import circulant_generator

TWO_PI = 2.0 * math.pi


def c4(alpha):
    return circulant_generator(4, alpha)


def equal_input(a, b, c, d):
    """``lam I + 1 (a, b, c, d)`` with ``lam = 1 - (a + b + c + d)``."""
    pi = np.array([a, b, c, d], dtype=float)
    return (1.0 - pi.sum()) * np.eye(4) + np.outer(np.ones(4), pi)


def rate_from_offdiag(w):
    q = np.array(w, dtype=float)
    np.fill_diagonal(q, 0.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    return q


def random_rate(rng, n, high=2.0):
    return rate_from_offdiag(rng.uniform(0.0, high, (n, n)))


def equal_input_e12pi():
    """Equal-input matrix with ``det = exp(-12 pi)`` and three known generators."""
    e = math.exp(-4.0 * math.pi)
    m = np.full((4, 4), (1.0 - e) / 4.0)
    np.fill_diagonal(m, (1.0 + 3.0 * e) / 4.0)
    return m


def e12pi_generators():
    p = math.pi
    g1 = [[-3 * p, p, 2 * p, 0], [p, -3 * p, 0, 2 * p], [0, 2 * p, -3 * p, p], [2 * p, 0, p, -3 * p]]
    g2 = [[-3 * p, p, p, p], [p, -3 * p, p, p], [p, p, -3 * p, p], [p, p, p, -3 * p]]
    g3 = [[-3 * p, p, 0, 2 * p], [p, -3 * p, 2 * p, 0], [2 * p, 0, -3 * p, p], [0, 2 * p, p, -3 * p]]
    return [np.array(g) for g in (g1, g2, g3)]


BLOCK_SWAP = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=float)


def case3_fixture(rng, mu_positive, max_tries=10000):
    """A rate matrix ``Q`` whose exponential has a repeated real eigenvalue.

    ``Q`` is a random rate matrix dominated by a directed 4-cycle, rescaled so
    its one conjugate eigenvalue pair has imaginary part ``2 pi`` (repeated
    eigenvalue ``mu > 0`` of ``exp(Q)``) or ``pi`` (``mu < 0``). The dense
    perturbation keeps every off-diagonal entry strictly positive.

    Returns ``(Q, M, mu)``.
    """
    target = TWO_PI if mu_positive else math.pi
    for _ in range(max_tries):
        w = rng.uniform(0.2, 1.0, 4)
        perm = rng.permutation(4)
        base = np.zeros((4, 4))
        for a in range(4):
            base[perm[a], perm[(a + 1) % 4]] = w[a]
        q0 = rate_from_offdiag(base + rng.uniform(0.005, 0.15, (4, 4)))
        ev = np.linalg.eigvals(q0)
        pair = [e for e in ev if e.imag > 1e-6]
        if len(pair) != 1:
            continue
        q = (target / pair[0].imag) * q0
        ev = np.linalg.eigvals(q)
        mu = math.exp(max(e.real for e in ev if e.imag > 1e-6)) * (1 if mu_positive else -1)
        lam = math.exp(min((e.real for e in ev if abs(e.imag) < 1e-9 and abs(e) > 1e-9)))
        if abs(mu) < math.exp(-12) or abs(lam - mu) < 1e-4:
            continue
        return q, expm(q), mu
    raise RuntimeError("no Case III fixture found")


def constructing_branch(basis: Case3Basis, q):
    """The ``k`` and ``(x, y, z)`` with ``Q = Q_k(x, y, z)``, read off the eigenbasis."""
    w = basis.P_inv @ (q - basis.L) @ basis.P
    blk = w[2:, 2:]
    s = math.sqrt(np.linalg.det(blk))
    s = s if blk[0, 1] > 0 else -s
    k = round((s - basis.arg_mu) / TWO_PI)
    return k, (blk[0, 1] / s, -blk[0, 0] / s, -blk[1, 0] / s)


def grid_hits(basis: Case3Basis, k, tol=1e-9, n=200, span=5.0):
    """Brute-force sweep of the positive sheet for a rate matrix ``Q_k``.

    Points are ``x = e^t``, ``y = sinh u``, ``z = (1 + y^2) / x`` on an
    ``n x n`` grid of ``(t, u)`` over ``[-span, span]^2``.
    """
    t = np.linspace(-span, span, n)
    tt, uu = np.meshgrid(t, t)
    x = np.exp(tt).ravel()
    y = np.sinh(uu).ravel()
    z = (1 + y * y) / x
    s = basis.scale(k)
    ok = np.ones(x.size, dtype=bool)
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            v = (basis.P[i, 2] * basis.P_inv[3, j] * x
                 + (basis.P[i, 3] * basis.P_inv[3, j] - basis.P[i, 2] * basis.P_inv[2, j]) * y
                 - basis.P[i, 3] * basis.P_inv[2, j] * z)
            ok &= basis.L[i, j] + s * v >= -tol
    return bool(ok.any())


def repeated_real_rate(r=0.4, s=0.5):
    """Rate matrix with eigenvalues ``0, -s, -3r, -3r`` (diagonalizable)."""
    q = np.zeros((4, 4))
    q[0, 1:] = s / 3.0
    q[1:, 1:] = r
    np.fill_diagonal(q, 0.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    return q


def match_sets(a, b, tol):
    """True when every matrix in `a` has a partner in `b` within `tol` and vice versa."""
    if len(a) != len(b):
        return False
    for x in a:
        if not any(np.linalg.norm(x - y) < tol for y in b):
            return False
    for y in b:
        if not any(np.linalg.norm(x - y) < tol for x in a):
            return False
    return True
