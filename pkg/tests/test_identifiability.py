import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from embedscan.embed4 import compute_case2_data, passing_branches
from embedscan.identifiability import (
    FINITE,
    NOT_EMBEDDABLE,
    UNIQUE,
    UNKNOWN,
    IdentifiabilityClass,
)
from embedscan.matrices import principal_log_matrix, validate_markov
from embedscan.solver import solve
from embedscan.spectral import decompose, det_shortcut

from helpers import BLOCK_SWAP, c4, equal_input, equal_input_e12pi, random_rate, rate_from_offdiag


def test_finite_count_needs_two():
    with pytest.raises(ValueError):
        IdentifiabilityClass(FINITE, 1)
    assert IdentifiabilityClass(FINITE, 3).describe() == "FiniteCount(3)"


def test_round_trip():
    c = IdentifiabilityClass(FINITE, 2, ["case rule"])
    assert IdentifiabilityClass.from_dict(c.to_dict()) == c


def test_case1_unique():
    q = 0.3 * rate_from_offdiag([[0, 1, 2, 1], [1, 0, 3, 2], [2, 3, 0, 1], [1, 2, 1, 0]])
    r = solve(expm(q))
    assert r.case == "CaseI"
    assert r.identifiability.tag == UNIQUE


def test_equal_input_below_bound_unknown():
    r = solve(equal_input_e12pi())
    assert r.identifiability.tag == UNKNOWN


def test_equal_input_above_bound_unique():
    r = solve(equal_input(0.2, 0.1, 0.3, 0.1))
    assert r.identifiability.tag == UNIQUE


def test_diagonally_dominant_unique():
    q = 0.1 * c4(1.0) + 0.03 * rate_from_offdiag(np.ones((4, 4)))
    r = solve(expm(q))
    assert r.diagonally_dominant
    assert r.identifiability.tag == UNIQUE
    assert any("0.5" in f for f in r.identifiability.basis_facts)


def test_not_embeddable():
    r = solve(BLOCK_SWAP)
    assert r.identifiability.tag == NOT_EMBEDDABLE


def test_circulant_finite_count():
    r = solve(expm(c4(4.0)))
    assert r.identifiability.tag == FINITE
    assert r.identifiability.count == r.bounds["U"] - r.bounds["L"] + 1 == 2


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1), st.floats(1.0, 6.0))
def test_case2_count_equals_direct_sweep(seed, scale):
    rng = np.random.default_rng(seed)
    m = expm(scale * c4(1.0) + rng.uniform(0, 0.4) * random_rate(rng, 4, 1.0))
    r = solve(m)
    if r.case != "CaseII" or not r.embeddable:
        return
    sm = validate_markov(m)
    sweep = passing_branches(compute_case2_data(sm, decompose(sm)), -30, 30)
    expected = len(sweep)
    got = r.identifiability.count if r.identifiability.tag == FINITE else 1
    assert got == expected


@settings(max_examples=60)
@given(st.integers(3, 6), st.integers(0, 2**32 - 1))
def test_shortcut_implies_unique_principal(n, seed):
    rng = np.random.default_rng(seed)
    q = rng.uniform(0.05, 1.0) * random_rate(rng, n, 1.0)
    m = expm(q)
    if not det_shortcut(m):
        return
    r = solve(m)
    if r.embeddable:
        assert r.identifiability.tag == UNIQUE
        assert len(r.generators) == 1
        assert np.allclose(r.generator_arrays()[0], principal_log_matrix(m).real, atol=1e-8)
