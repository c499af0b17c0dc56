import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from dlaguerre.errors import DomainError
from dlaguerre.operators import (
    OperatorParams,
    TridiagonalMatrix,
    apply_tau,
    as_dense,
    entries,
    markov_witness_search,
    quadratic_form,
    string_weights,
    truncate,
)
from dlaguerre.specfun import sigma_table

alphas = st.floats(-0.99, 10.0)
sequences = hnp.arrays(np.float64, st.integers(1, 40), elements=st.floats(-10.0, 10.0))


def test_params_validation():
    assert OperatorParams(0.5).alpha == 0.5
    with pytest.raises(DomainError):
        OperatorParams(-1.0)
    with pytest.raises(DomainError):
        OperatorParams(float("nan"))
    with pytest.raises(DomainError):
        OperatorParams(1.0, tol=0.0)


@pytest.mark.parametrize("alpha,n,expected", [(0.0, 0, (1.0, -1.0)), (3.0, 0, (4.0, -2.0)), (0.0, 4, (9.0, -5.0))])
def test_entries_examples(alpha, n, expected):
    assert entries(alpha, n) == pytest.approx(expected, rel=1e-15)


def test_apply_tau_examples():
    assert apply_tau(1.0, {0: 1.0}) == pytest.approx([2.0, -math.sqrt(2.0)], rel=1e-15)
    assert not np.any(apply_tau(0.7, np.zeros(5)))
    for a in (-0.5, 0.0, 2.0):
        out = apply_tau(a, np.ones(300), "tilde")
        assert np.max(np.abs(out[:299])) <= 1e-12 * (2 * 299 + 1 + a)


def test_apply_tau_rejects_unknown_variant():
    with pytest.raises(ValueError):
        apply_tau(1.0, [1.0], "twisted")


def test_string_weights_examples():
    sw = string_weights(0.0, 10)
    assert sw.l == pytest.approx(np.ones(11), rel=1e-15)
    assert sw.w == pytest.approx(1.0 / np.arange(1, 12), rel=1e-15)
    assert string_weights(2.3, 0).w[0] == pytest.approx(1 / 3.3, rel=1e-15)
    sw = string_weights(1.0, 2)
    assert sw.l[2] == pytest.approx(3.0, rel=1e-15)
    assert sw.w[2] == pytest.approx(1.0 / 12.0, rel=1e-15)


@pytest.mark.parametrize("alpha", [-0.9, -0.5, 0.0, 0.5, 1.0, 2.5, 7.0])
def test_string_reconstruction(alpha):
    rebuilt = string_weights(alpha, 500).reconstruct()
    T = truncate(alpha, 501)
    assert rebuilt.diag == pytest.approx(T.diag, rel=1e-13)
    assert rebuilt.offdiag == pytest.approx(T.offdiag, rel=1e-13)


def test_quadratic_form_examples():
    assert quadratic_form(1.0, {0: 1.0}) == pytest.approx(2.0, rel=1e-15)
    assert quadratic_form(1.0, {0: 1.0}, "tilde") == pytest.approx(2.0, rel=1e-15)
    assert quadratic_form(0.3, {}) == 0.0


@given(alphas, sequences)
def test_form_matches_operator(alpha, u):
    form = quadratic_form(alpha, u)
    pairing = float(np.dot(apply_tau(alpha, u)[: u.size], u))
    assert form >= 0.0
    assert pairing == pytest.approx(form, rel=1e-11, abs=1e-11 * float(np.dot(u, u)) * (2 * u.size + 2 + abs(alpha)))


@given(alphas, sequences)
def test_tilde_form_is_conjugated_plain_form(alpha, u):
    s = sigma_table(alpha, u.size)
    weighted = np.dot(apply_tau(alpha, u, "tilde")[: u.size] * s[: u.size] ** 2, u)
    assert quadratic_form(alpha, u, "tilde") == pytest.approx(
        weighted, rel=1e-10, abs=1e-10 * float(np.sum(u * u * s[: u.size] ** 2)) * (2 * u.size + 2 + abs(alpha)))


@given(alphas, sequences)
def test_conjugation_identity(alpha, u):
    s = sigma_table(alpha, u.size)
    lhs = apply_tau(alpha, u, "tilde")
    rhs = apply_tau(alpha, u * s[: u.size]) / s
    scale = (2 * u.size + 2 + abs(alpha)) * np.max(np.abs(u) * s[: u.size]) / s
    assert np.all(np.abs(lhs - rhs) <= 1e-11 * scale + 1e-300)


def test_domain_independence_bound():
    n = np.arange(10_001, dtype=float)
    for a in np.linspace(-0.99, 10.0, 23):
        gap = np.abs(np.sqrt(n + a + 1) - np.sqrt(n + 1))
        assert np.all(gap <= abs(a) / np.sqrt(n + 1) * (1 + 1e-12))


@pytest.mark.parametrize("alpha", [0.25, 1.0, 3.0])
def test_tilde_ground_state_for_reciprocal_lengths(alpha):
    sw = string_weights(alpha, 300)
    g = 1.0 / sw.l
    out = apply_tau(alpha, g, "tilde")[1:300]
    n = np.arange(1, 300)
    assert np.all(np.abs(out) <= 1e-13 * (2 * n + 1 + alpha) * g[1:300])


def test_truncate_examples():
    T = truncate(0.0, 2)
    assert list(T.diag) == [1.0, 3.0] and list(T.offdiag) == [-1.0]
    assert list(truncate(2.0, 1, {0: 3.0}).diag) == [0.0]
    assert list(truncate(0.4, 1).diag) == [1.4]


def test_truncate_rejects_potential_outside_window():
    with pytest.raises(DomainError):
        truncate(1.0, 3, {3: 1.0})
    with pytest.raises(DomainError):
        truncate(1.0, 0)


def test_tridiagonal_matrix_is_read_only_and_consistent():
    T = truncate(0.5, 6)
    with pytest.raises(ValueError):
        T.diag[0] = 1.0
    u = np.arange(6.0)
    assert T.matvec(u) == pytest.approx(T.to_dense() @ u, rel=1e-15)
    with pytest.raises(ValueError):
        TridiagonalMatrix([1.0, 2.0], [1.0, 2.0])


def test_as_dense_handles_mappings_and_windows():
    assert list(as_dense({2: 1.5})) == [0.0, 0.0, 1.5]
    assert list(as_dense([1.0, 0.0], 4)) == [1.0, 0.0, 0.0, 0.0]
    with pytest.raises(DomainError):
        as_dense({5: 1.0}, 3)
    with pytest.raises(DomainError):
        as_dense({-1: 1.0})


def test_markov_witness_search():
    found = markov_witness_search(-0.5, trials=2000, seed=0)
    assert found is not None
    assert found.form_capped > found.form_original
    assert np.all(found.u > 0)
    # alpha = 0 is the free birth-death form, for which capping never raises the energy
    assert markov_witness_search(0.0, trials=500, seed=1) is None
