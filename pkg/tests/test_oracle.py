import math

import numpy as np
import pytest

from dlaguerre import oracle
from dlaguerre.errors import ConvergenceError, DomainError
from dlaguerre.heat import HeatQuery, heat_kernel, heat_kernel_matrix
from dlaguerre.operators import TridiagonalMatrix, truncate
from dlaguerre.spectral import gauss_rule


@pytest.fixture(scope="module")
def rule_alpha_one():
    return gauss_rule(1.0, 200)


def test_expm_examples():
    assert oracle.expm_heat(0.0, 1.0, 0, 0, N=400) == pytest.approx(0.5, abs=1e-9)
    assert oracle.expm_heat(2.0, 1.0, 1, 1, N=400) == pytest.approx(0.125, abs=1e-9)
    assert oracle.expm_heat(0.5, 1e-9, 3, 3, N=50) == pytest.approx(1.0, rel=1e-7)


@pytest.mark.parametrize("method", ["positive", "eig"])
def test_expm_block_matches_closed_form(method):
    block, defect = oracle.expm_heat_block(0.5, 0.3, 10, N=200, method=method)
    exact = heat_kernel_matrix(0.5, 0.3, 10)
    assert defect <= 1e-10
    if method == "positive":
        assert np.max(np.abs(block - exact) / exact) <= 1e-11
    else:
        assert np.max(np.abs(block - exact)) <= 1e-13


def test_positive_expm_keeps_relative_accuracy_for_tiny_entries():
    block, _ = oracle.expm_heat_block(1.0, 0.01, 25, N=200)
    exact = heat_kernel_matrix(1.0, 0.01, 25)
    assert exact[0, 25] < 1e-40
    assert np.max(np.abs(block - exact) / exact) <= 1e-11


def test_expm_certification_failure_is_reported():
    with pytest.raises(ConvergenceError):
        oracle.expm_heat_block(0.0, 50.0, 2, N=10)


def test_expm_validation():
    with pytest.raises(DomainError):
        oracle.expm_heat(0.0, 1.0, 5, 0, N=5)
    with pytest.raises(DomainError):
        oracle.heat_block(0.0, 1.0, 2, N=oracle.MAX_N + 1)
    with pytest.raises(DomainError):
        oracle.heat_block(0.0, -1.0, 2, N=10)
    with pytest.raises(ValueError):
        oracle.heat_block(0.0, 1.0, 2, N=10, method="pade")
    with pytest.raises(DomainError):
        oracle.positive_expm(TridiagonalMatrix([1.0, 1.0], [0.5]), 1.0)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 2.5])
def test_eigendecomposition_invariants(alpha):
    T = truncate(alpha, 300)
    eig = oracle.eigendecompose(T)
    assert eig.dim == 300
    assert eig.reconstruction_defect(T) <= 1e-10
    assert eig.eigenvalues[0] >= -1e-10
    assert np.all(np.diff(eig.eigenvalues) > 0)
    with pytest.raises(ValueError):
        eig.eigenvalues[0] = 0.0


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0])
def test_semigroup_identity_on_truncation(alpha):
    for s, t in [(0.1, 0.2), (1.0, 1.0), (0.5, 3.0)]:
        assert oracle.semigroup_defect(alpha, s, t, N=200) <= 1e-10


def test_quad_examples(rule_alpha_one):
    assert oracle.quad_heat(1.0, 2.0, 0, 0, rule_alpha_one) == pytest.approx(
        float(np.sum(rule_alpha_one.weights * np.exp(-2.0 * rule_alpha_one.nodes))), rel=1e-14)
    assert oracle.quad_heat(1.0, 2.0, 0, 0, rule_alpha_one) == pytest.approx(
        heat_kernel(HeatQuery(1.0, 2.0, 0, 0)), abs=1e-8)
    assert oracle.quad_heat(1.0, 2.0, 3, 7, rule_alpha_one) == pytest.approx(
        heat_kernel(HeatQuery(1.0, 2.0, 3, 7)), abs=1e-8)


def test_quad_off_diagonal_vanishes_as_t_goes_to_zero(rule_alpha_one):
    values = [abs(oracle.quad_heat(1.0, t, 2, 5, rule_alpha_one)) for t in (1e-2, 1e-4, 1e-6)]
    assert values[0] > values[1] > values[2]
    assert values[2] <= 1e-8


def test_quad_warns_for_small_rule():
    rule = gauss_rule(0.5, 12)
    with pytest.warns(RuntimeWarning):
        oracle.quad_heat(0.5, 1.0, 4, 4, rule)


@pytest.mark.slow
def test_high_precision_quad_agrees_with_expm():
    alpha, t = 0.5, 0.1
    rule = gauss_rule(alpha, 120, dps=60)
    q = oracle.quad_heat_block(alpha, t, 12, rule)
    e, _ = oracle.expm_heat_block(alpha, t, 12, N=400)
    assert np.max(np.abs(q - e) / e) <= 1e-8


def test_free_lattice_examples():
    assert oracle.free_lattice_heat(1e-10, 3, 3) == pytest.approx(1.0, rel=1e-9)
    assert oracle.free_lattice_heat(1.0, 0, 0) == pytest.approx(math.exp(-2.0) * 2.2795853023360673, rel=1e-13)
    assert oracle.free_lattice_heat(1.0, 0, 0) == pytest.approx(0.30851, abs=1e-5)
    total = math.fsum(oracle.free_lattice_heat(1.5, 0, m) for m in range(-60, 61))
    assert total == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(DomainError):
        oracle.free_lattice_heat(0.0, 0, 0)


@pytest.mark.parametrize("method", ["positive", "eig"])
def test_lattice_truncation_reproduces_bessel_kernel(method):
    for n, m in [(0, 0), (0, 3), (-2, 5)]:
        assert oracle.lattice_heat_truncated(1.0, n, m, method=method) == pytest.approx(
            oracle.free_lattice_heat(1.0, n, m), rel=1e-10)
