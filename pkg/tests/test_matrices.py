import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from embedscan.errors import NegativeEntry, NegativeRealEigenvalueOnBranchCut, NotSquare, RowSumViolation
from embedscan.matrices import (
    PRINCIPAL,
    Branch,
    GeneratorCandidate,
    is_rate_matrix,
    jordan_block_log,
    matrix_exponential,
    principal_log_matrix,
    validate_markov,
)
from embedscan.spectral import decompose

from helpers import e12pi_generators, equal_input, equal_input_e12pi, rate_from_offdiag


def rate_matrices(n, high):
    return arrays(float, (n, n), elements=st.floats(0.0, high)).map(rate_from_offdiag)


# ---------------------------------------------------------------- validation


def test_identity_valid():
    m = validate_markov(np.eye(4))
    assert m.n == 4
    assert np.array_equal(m.entries, np.eye(4))


def test_doubly_stochastic_valid():
    validate_markov([[0.5, 0.5], [0.5, 0.5]])


def test_row_sum_violation_reports_row():
    with pytest.raises(RowSumViolation) as exc:
        validate_markov([[0.5, 0.6], [0.5, 0.5]])
    assert exc.value.i == 0


def test_not_square():
    with pytest.raises(NotSquare):
        validate_markov([[1.0, 0.0]])


def test_negative_entry():
    with pytest.raises(NegativeEntry) as exc:
        validate_markov([[1.1, -0.1], [0.0, 1.0]])
    assert (exc.value.i, exc.value.j) == (0, 1)


def test_tiny_negative_entries_clamped():
    m = validate_markov([[1.0 + 5e-11, -5e-11], [0.3, 0.7]])
    assert m.entries[0, 1] == 0.0
    assert m.entries[0].sum() == pytest.approx(1.0, abs=1e-15)


def test_validated_entries_are_frozen():
    m = validate_markov(np.eye(2))
    with pytest.raises(ValueError):
        m.entries[0, 0] = 0.5


# ---------------------------------------------------------------- rate test


@pytest.mark.parametrize("q, expected", [
    (np.zeros((3, 3)), True),
    ([[-1, 1], [1, -1]], True),
    ([[-1, 1], [-0.5, 0.5]], False),
    ([[-1, 1], [1, -0.5]], False),
])
def test_is_rate_matrix(q, expected):
    assert is_rate_matrix(np.array(q, dtype=float)) is expected


def test_is_rate_matrix_not_square():
    with pytest.raises(NotSquare):
        is_rate_matrix(np.zeros((2, 3)))


def test_is_rate_matrix_rejects_complex_residue():
    q = np.array([[-1, 1], [1, -1]], dtype=complex)
    q[0, 1] += 1e-3j
    assert not is_rate_matrix(q)


# ---------------------------------------------------------------- exponential


def test_exp_zero_is_identity():
    assert np.array_equal(matrix_exponential(np.zeros((4, 4))), np.eye(4))


@pytest.mark.parametrize("a", [0.1, 1.0, 3.7])
def test_exp_two_state_closed_form(a):
    q = np.array([[-a, a], [a, -a]])
    e = math.exp(-2 * a)
    expected = np.array([[(1 + e) / 2, (1 - e) / 2], [(1 - e) / 2, (1 + e) / 2]])
    assert np.allclose(matrix_exponential(q), expected, atol=1e-15, rtol=0)


@pytest.mark.parametrize("idx", [0, 1, 2])
def test_exp_of_listed_generators_gives_equal_input_matrix(idx):
    q = e12pi_generators()[idx]
    assert is_rate_matrix(q)
    assert np.linalg.norm(matrix_exponential(q) - equal_input_e12pi()) < 1e-8


@given(rate_matrices(4, 2.5))
def test_exp_of_rate_matrix_is_markov(q):
    validate_markov(matrix_exponential(q))


@given(arrays(float, (4, 4), elements=st.floats(-1.25, 1.25)))
def test_det_exp_equals_exp_trace(q):
    lhs = np.linalg.det(matrix_exponential(q))
    assert lhs == pytest.approx(math.exp(np.trace(q)), rel=1e-10)


# ---------------------------------------------------------------- logarithm


def test_principal_log_identity_is_zero():
    assert np.allclose(principal_log_matrix(np.eye(4)), 0.0, atol=1e-15)


def test_principal_log_equal_input_formula():
    m = equal_input(0.1, 0.1, 0.1, 0.1)
    expected = (math.log(0.6) / -0.4) * (m - np.eye(4))
    assert np.allclose(principal_log_matrix(m).real, expected, atol=1e-12)


def test_principal_log_recovers_small_cyclic_generator():
    q = 0.1 * np.array([[-1, 1, 0], [0, -1, 1], [1, 0, -1]], dtype=float)
    log = principal_log_matrix(matrix_exponential(q))
    assert np.linalg.norm(log - q) < 1e-8


@given(rate_matrices(4, 0.4))
def test_principal_log_matches_library_oracle(q):
    m = matrix_exponential(q)
    ours = principal_log_matrix(m)
    ref = scipy.linalg.logm(m)
    assert np.linalg.norm(ours - ref) < 1e-8
    assert np.linalg.norm(matrix_exponential(ours.real) - m) < 1e-8
    assert np.max(np.abs(ours.sum(axis=1))) < 1e-10


@pytest.mark.parametrize("value", [0.3, 1.0, 2.5])
@pytest.mark.parametrize("size", [1, 2, 3])
def test_jordan_block_log_matches_library_oracle(value, size):
    block = value * np.eye(size) + np.eye(size, k=1)
    assert np.allclose(jordan_block_log(value, size), scipy.linalg.logm(block).real, atol=1e-12)


def test_jordan_block_log_rejects_negative():
    with pytest.raises(NegativeRealEigenvalueOnBranchCut):
        jordan_block_log(-0.5, 2)


def test_principal_log_defective_block():
    q = np.array([[-1, 1, 0, 0], [0, -1, 1, 0], [0, 0, -1, 1], [0, 0, 0, 0]], dtype=float)
    m = validate_markov(matrix_exponential(q))
    log = principal_log_matrix(m)
    assert np.linalg.norm(log - q) < 1e-8


# ---------------------------------------------------------------- candidates


def test_branch_dict_round_trip():
    for b in (PRINCIPAL, Branch("distinct", (1, -2)), Branch("case3", (0,), (1.0, 0.0, 1.0))):
        assert Branch.from_dict(b.to_dict()) == b


def test_candidate_drops_negligible_imaginary_part():
    q = np.array([[-1, 1], [1, -1]], dtype=complex) + 1e-14j
    g = GeneratorCandidate.build(q)
    assert g.matrix.dtype == float


def test_candidate_rejects_real_imaginary_part():
    from embedscan.errors import NonRealResult

    with pytest.raises(NonRealResult):
        GeneratorCandidate.build(np.array([[-1, 1], [1, -1]]) + 0.1j)


def test_decompose_spectral_reconstruction():
    m = validate_markov(equal_input(0.1, 0.2, 0.3, 0.1))
    d = decompose(m)
    assert d.reconstruction_error() < 1e-12
