import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from dlaguerre.errors import DomainError
from dlaguerre.operators import apply_tau
from dlaguerre.specfun import laguerre, sigma
from dlaguerre.spectral import (
    QuadratureRule,
    gauss_rule,
    green,
    green_at_zero,
    green_column,
    poly_first,
    poly_first_all,
    poly_first_matrix,
    poly_second,
    poly_second_all,
    spectral_transform,
    weyl_m,
    weyl_m_inverse,
    weyl_solution,
)

alphas = st.floats(-0.99, 10.0)


# polynomials


def test_poly_first_examples():
    assert poly_first(0.7, 0, 3.0) == 1.0
    assert poly_first(0.0, 1, 2.0) == pytest.approx(-1.0, rel=1e-15)
    for a in (-0.5, 1.0, 4.0):
        assert poly_first(a, 9, 0.0) == pytest.approx(sigma(a, 9), rel=1e-13)


@given(alphas, st.integers(0, 60), st.floats(-5.0, 40.0))
def test_poly_first_is_normalised_laguerre(alpha, n, z):
    scale = max(1.0, abs(laguerre(alpha, n, z)), laguerre(alpha, n, 0.0)) / sigma(alpha, n)
    assert abs(poly_first(alpha, n, z) - laguerre(alpha, n, z) / sigma(alpha, n)) <= 1e-11 * scale


def test_poly_second_seeds():
    assert poly_second(0.3, 0, 2.0) == 0.0
    # the seed sign makes (tau - z) Q = delta_0; see the decisions ledger for the sign convention
    assert poly_second(3.0, 1, 0.7) == pytest.approx(-0.5, rel=1e-15)
    assert poly_second(1.0, 1, 0.0) == pytest.approx(-1.0 / math.sqrt(2.0), rel=1e-15)


@given(alphas, st.floats(-20.0, 20.0))
def test_second_kind_solves_inhomogeneous_recurrence(alpha, z):
    q = poly_second_all(alpha, 30, z)
    r = apply_tau(alpha, q)[:30] - z * q[:30]
    scale = np.max(np.abs(q)) * (61 + abs(alpha) + abs(z))
    assert r[0] == pytest.approx(1.0, abs=1e-12 * scale)
    assert np.all(np.abs(r[1:]) <= 1e-12 * scale)


def test_second_kind_at_zero_closed_form():
    # Q_n(0) = (1 - sigma(n)^2) / (alpha sigma(n)) for alpha != 0
    for a in (0.5, 1.0, 2.5):
        for n in range(1, 20):
            s = sigma(a, n)
            assert poly_second(a, n, 0.0) == pytest.approx((1 - s * s) / (a * s), rel=1e-12)


def test_eigenfunction_identity_on_quadrature_nodes():
    for a in (-0.5, 0.0, 1.0, 2.5):
        rule = gauss_rule(a, 60)
        P = poly_first_matrix(a, 40, rule.nodes)
        for i, lam in enumerate(rule.nodes):
            r = apply_tau(a, P[:, i])[:40] - lam * P[:40, i]
            scale = np.max(np.abs(P[:, i])) * (81 + a + lam)
            assert np.max(np.abs(r)) <= 1e-10 * scale


# Weyl function


def test_weyl_examples():
    assert weyl_m(2.0, -1e-9) == pytest.approx(0.5, rel=1e-7)
    assert weyl_m(0.0, -1.0) == pytest.approx(math.e * special.exp1(1.0), rel=1e-13)
    assert weyl_m(0.0, -1.0) == pytest.approx(0.5963473623231940, rel=1e-13)
    for a in (-0.5, 0.0, 3.0):
        assert weyl_m(a, -1e6) == pytest.approx(1e-6, rel=0.01)


@given(st.floats(-0.99, 8.0), st.floats(-1e4, -1e-8))
def test_weyl_integral_against_mpmath(alpha, x):
    exact = mpmath.exp(-x) * mpmath.expint(1 + alpha, -x)
    assert weyl_m(alpha, x) == pytest.approx(float(exact), rel=1e-12)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.5])
def test_weyl_monotone_increasing(alpha):
    xs = -np.logspace(math.log10(50.0), -4, 200)
    m = np.array([weyl_m(alpha, x) for x in xs])
    assert np.all(np.diff(m) > 0)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.5])
def test_weyl_cf_converges_to_integral_with_adaptive_depth(alpha):
    for x in (-10.0, -1.0, -0.1):
        assert weyl_m(alpha, x, "cf") == pytest.approx(weyl_m(alpha, x), rel=1e-12)


def test_weyl_cf_depth_200_accurate_for_x_at_most_minus_two():
    for a in (-0.5, 0.0, 1.0, 2.5):
        for x in np.linspace(-10.0, -2.0, 9):
            assert abs(weyl_m(a, x, "cf", 200) - weyl_m(a, x)) <= 1e-10


def test_weyl_rejects_nonnegative_x_and_bad_method():
    with pytest.raises(DomainError):
        weyl_m(1.0, 0.0)
    with pytest.raises(ValueError):
        weyl_m(1.0, -1.0, "pade")
    with pytest.raises(DomainError):
        weyl_m(1.0, -1.0, "cf", 0)


@pytest.mark.parametrize("alpha,x", [(1.0, -0.3), (2.0, -5.0), (-0.5, -1e-4), (0.0, -20.0)])
def test_weyl_inverse_round_trip(alpha, x):
    assert weyl_m_inverse(alpha, weyl_m(alpha, x)) == pytest.approx(x, rel=1e-10)


def test_weyl_inverse_range():
    with pytest.raises(DomainError):
        weyl_m_inverse(2.0, 0.5)
    with pytest.raises(DomainError):
        weyl_m_inverse(0.0, -1.0)


# Weyl solution and Green function


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.5])
@pytest.mark.parametrize("x", [-1.0, -3.0, -20.0])
def test_weyl_solution_decays(alpha, x):
    psi = np.abs(weyl_solution(alpha, x, 200))
    assert np.all(psi > 0)
    assert np.all(np.diff(psi[5:]) < 0)


def test_weyl_solution_against_extended_precision():
    with mpmath.workdps(80):
        for a, x in [(1.0, -0.5), (0.0, -2.0), (-0.5, -0.01)]:
            am, xm = mpmath.mpf(a), mpmath.mpf(x)
            m = mpmath.exp(-xm) * mpmath.expint(1 + am, -xm)
            p, q = [mpmath.mpf(1), (1 + am - xm) / mpmath.sqrt(1 + am)], [mpmath.mpf(0), -1 / mpmath.sqrt(1 + am)]
            for n in range(1, 60):
                c0, c1 = mpmath.sqrt(n * (n + am)), mpmath.sqrt((n + 1) * (n + 1 + am))
                p.append(((2 * n + 1 + am - xm) * p[n] - c0 * p[n - 1]) / c1)
                q.append(((2 * n + 1 + am - xm) * q[n] - c0 * q[n - 1]) / c1)
            exact = [float(q[n] + m * p[n]) for n in range(60)]
            assert weyl_solution(a, x, 59) == pytest.approx(exact, rel=1e-10)


def test_green_examples():
    assert green(2.0, -1e-8, 0, 0) == pytest.approx(0.5, rel=1e-6)
    assert green(1.0, -1e-9, 0, 1) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-6)


@given(st.floats(-0.99, 5.0), st.floats(-50.0, -1e-3), st.integers(0, 40), st.integers(0, 40))
def test_green_symmetric(alpha, x, n, m):
    assert green(alpha, x, n, m) == green(alpha, x, m, n)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.5])
@pytest.mark.parametrize("x", [-0.5, -2.0, -0.01])
def test_green_column_residual(alpha, x):
    for m in (0, 1, 5, 10):
        g = green_column(alpha, x, m, 80)
        r = apply_tau(alpha, g)[:80] - x * g[:80]
        r[m] -= 1.0
        assert np.max(np.abs(r)) <= 1e-9


def test_green_column_matches_entries():
    col = green_column(1.5, -0.7, 4, 12)
    assert col == pytest.approx([green(1.5, -0.7, n, 4) for n in range(13)], rel=1e-14)


def test_green_at_zero_examples():
    assert green_at_zero(1.0, 5, 5) == pytest.approx(1.0, rel=1e-15)
    assert green_at_zero(-0.5, 0, 0) == math.inf
    assert green_at_zero(2.0, 0, 2) == pytest.approx(0.5 / math.sqrt(6.0), rel=1e-14)


def test_green_approaches_zero_energy_limit():
    # the approach is algebraic, of order |x|^min(alpha, 1) up to a logarithm
    for a in (0.5, 1.0, 3.0):
        for x in (-1e-6, -1e-10, -1e-14):
            bound = 10.0 * abs(x) ** min(a, 1.0) * (1.0 + abs(math.log(abs(x))))
            for n, m in [(0, 0), (2, 5), (7, 7)]:
                assert green(a, x, n, m) == pytest.approx(green_at_zero(a, n, m), rel=bound)


def test_green_rejects_nonnegative_energy():
    with pytest.raises(DomainError):
        green(1.0, 0.0, 0, 0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
def test_green_trace_identity(alpha):
    # l(n) * sum_{k >= n} w(k) = 1/alpha; the algebraically decaying tail needs Levin acceleration
    def w(k):
        return mpmath.gamma(k + 1) * mpmath.gamma(alpha + 1) / mpmath.gamma(alpha + k + 2)

    for n in (0, 1, 5, 30):
        tail = mpmath.nsum(w, [n, mpmath.inf], method="levin")
        l_n = mpmath.rf(alpha + 1, n) / mpmath.factorial(n)
        assert float(l_n * tail) == pytest.approx(1.0 / alpha, rel=1e-10)
        assert green_at_zero(alpha, n, n) == pytest.approx(float(l_n * tail), rel=1e-10)


# quadrature


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.5])
def test_gauss_rule_moments(alpha):
    rule = gauss_rule(alpha, 80)
    assert math.fsum(rule.weights) == pytest.approx(1.0, abs=1e-13)
    assert math.fsum(rule.weights * rule.nodes) == pytest.approx(alpha + 1, rel=1e-13)
    assert math.fsum(rule.weights * rule.nodes ** 2) == pytest.approx((alpha + 1) * (alpha + 2), rel=1e-13)
    for k in range(3, 12):
        exact = math.exp(math.lgamma(alpha + 1 + k) - math.lgamma(alpha + 1))
        assert math.fsum(rule.weights * rule.nodes ** k) == pytest.approx(exact, rel=1e-11)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.5])
def test_gauss_rule_orthogonality(alpha):
    rule = gauss_rule(alpha, 80)
    P = poly_first_matrix(alpha, 40, rule.nodes)
    gram = (P * rule.weights) @ P.T
    assert np.max(np.abs(gram - np.eye(41))) <= 1e-9


def test_gauss_rule_matches_scipy_roots():
    nodes, weights = special.roots_genlaguerre(30, 1.5)
    rule = gauss_rule(1.5, 30)
    assert rule.nodes == pytest.approx(nodes, rel=1e-12)
    assert rule.weights == pytest.approx(weights / math.gamma(2.5), rel=1e-9)


def test_high_precision_rule_agrees_with_double_rule():
    double = gauss_rule(0.5, 40)
    hp = gauss_rule(0.5, 40, dps=40)
    assert hp.nodes == pytest.approx(double.nodes, rel=1e-13)
    big = hp.weights > 1e-200
    assert hp.weights[big] == pytest.approx(double.weights[big], rel=1e-10)
    assert len(hp.hp_nodes) == 40


def test_quadrature_rule_validation():
    with pytest.raises(ValueError):
        QuadratureRule(0.0, [2.0, 1.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        QuadratureRule(0.0, [1.0, 2.0], [0.5])
    with pytest.raises(DomainError):
        gauss_rule(0.0, 0)


def test_spectral_transform_examples():
    rule = gauss_rule(0.5, 20)
    assert spectral_transform(0.5, {0: 1.0}, rule) == pytest.approx(np.ones(20), rel=1e-15)
    F = spectral_transform(0.5, {3: 1.0}, rule)
    back = spectral_transform(0.5, F, rule, "inverse")
    expected = np.zeros(20)
    expected[3] = 1.0
    assert np.max(np.abs(back - expected)) <= 1e-12


@given(st.floats(-0.9, 5.0), st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=15))
def test_plancherel(alpha, coeffs):
    rule = gauss_rule(round(alpha, 2), 16)
    F = spectral_transform(round(alpha, 2), coeffs, rule)
    norm2 = math.fsum(c * c for c in coeffs)
    assert math.fsum(rule.weights * F * F) == pytest.approx(norm2, rel=1e-10, abs=1e-12)


def test_spectral_transform_rejects_bad_input():
    rule = gauss_rule(1.0, 8)
    with pytest.raises(ValueError):
        spectral_transform(1.0, np.ones(7), rule, "inverse")
    with pytest.raises(ValueError):
        spectral_transform(1.0, {0: 1.0}, rule, "sideways")


def test_poly_first_all_rejects_negative_degree():
    with pytest.raises(DomainError):
        poly_first_all(1.0, -1, 0.0)
