import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nlft_lab import (Potential, TailNotConverged, estimate_w, kernel_K, kernel_proximity,
                      linearization_error, nonlinear_parseval_residual, sinc_kernel)
from nlft_lab.spectral import ParsevalQuadrature, fourier_linear, integrate_log_abs_a

from conftest import random_piecewise
from oracles import constant_abs_a_sq


def test_weight_free_case():
    assert estimate_w(Potential.zero(), 0.7).w == 1.0


def test_weight_constant():
    f = Potential.constant(1).truncate(1)
    assert estimate_w(f, 0.0, t_w=1).w == pytest.approx(math.exp(-2), rel=1e-15)


def test_weight_is_stationary_past_support():
    f = Potential.constant(1).truncate(1)
    for s in (0.0, 0.4, 2.5):
        assert abs(estimate_w(f, s, t_w=1).w - estimate_w(f, s, t_w=5).w) < 1e-12


def test_weight_reports_drift_for_noncompact():
    w = estimate_w(Potential.preset("powerdecay"), 1.0, t_w=40)
    assert w.t_used == 40 and w.drift > 0


@pytest.mark.parametrize("t", [0.5, 2.0, 7.0])
def test_free_kernel_is_sinc(t, rng):
    lam = rng.uniform(-3, 3, 20) + 1j * rng.uniform(-1, 1, 20)
    z = rng.uniform(-3, 3, 20) + 1j * rng.uniform(-1, 1, 20)
    K = kernel_K(Potential.zero(), t, lam, z)
    ref = sinc_kernel(t, lam, z)
    assert np.max(np.abs(K - ref) / np.maximum(1, np.abs(ref))) < 1e-13


def test_free_kernel_diagonal():
    for t in (0.5, 1, 5):
        assert kernel_K(Potential.zero(), t, 0.3, 0.3) == pytest.approx(t / math.pi, rel=1e-14)


def test_free_diagonal_nondecreasing_in_t():
    vals = [kernel_K(Potential.zero(), t, 1.1, 1.1).real for t in np.linspace(0.1, 5, 20)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_diagonal_is_real_and_positive(rng):
    for _ in range(10):
        f = random_piecewise(rng)
        x = float(rng.uniform(-4, 4))
        K = kernel_K(f, 3.0, x, x)
        assert abs(K.imag) < 1e-12 * abs(K) and K.real > 0


def test_hermitian_symmetry(rng):
    f = Potential.piecewise([0, 0.5, 1.5], [1.0, -0.7])
    lam = rng.uniform(-3, 3, 30) + 1j * rng.uniform(-1, 1, 30)
    z = rng.uniform(-3, 3, 30) + 1j * rng.uniform(-1, 1, 30)
    K1 = kernel_K(f, 2.0, lam, z)
    K2 = kernel_K(f, 2.0, z, lam)
    assert np.max(np.abs(K1 - np.conj(K2))) < 1e-10


def test_diagonal_matches_norm_of_kernel():
    # K(x, x) = ||K(x, .)||^2 = int |K(x, s)|^2 / |E(s)|^2 ds for f = 0
    t, x = 1.5, 0.4
    val, _ = integrate.quad(lambda s: abs(sinc_kernel(t, x, s)) ** 2, -400, 400, limit=4000)
    assert val == pytest.approx(kernel_K(Potential.zero(), t, x, x).real, rel=2e-3)


@pytest.mark.parametrize("f", [Potential.zero(), Potential.constant(1).truncate(1),
                               Potential.piecewise([0, 0.4, 1], [0.8, -1.2])])
def test_quotient_and_derivative_forms_agree_near_threshold(f):
    # across the switch-over radius both forms agree up to the quotient's
    # rounding floor eps * |E(z)| |E(w)| / |w - z|
    t, z0 = 2.0, 0.6 - 0.2j
    for r in (2e-9, 5e-9, 1e-8, 2e-8, 5e-8):
        lam = np.conj(z0 + r * np.exp(0.7j))
        quotient = kernel_K(f, t, lam, z0, radius=0.0)
        limit = kernel_K(f, t, lam, z0, radius=1.0)
        E = abs(kernel_K(f, t, np.conj(z0), z0))  # size of the diagonal
        floor = 8 * np.finfo(float).eps * max(1.0, E) / r
        assert abs(quotient - limit) <= 1e-9 + floor + abs(r) * 10 * max(1.0, E)


def test_quotient_error_near_threshold_is_rounding_dominated():
    # documents why the two forms cannot agree to 1e-9 for every potential:
    # halving the distance roughly doubles the difference
    f = Potential.constant(1).truncate(1)
    t, z0 = 2.0, 0.6 - 0.2j
    d = []
    for r in (1e-8, 1e-9, 1e-10):
        lam = np.conj(z0 + r)
        d.append(abs(kernel_K(f, t, lam, z0, radius=0.0) - kernel_K(f, t, lam, z0, radius=1.0)))
    assert d[2] > d[0]


def test_proximity_free_case_is_zero():
    for s, C, t in [(0.0, 5, 20), (1.3, 3, 7)]:
        rep = kernel_proximity(Potential.zero(), s, C, t)
        assert rep.data["sup_discrepancy"] < 1e-13


def test_proximity_trend_constant():
    f = Potential.constant(1).truncate(1)
    sups = [kernel_proximity(f, 0.7, 5, t).data["sup_discrepancy"] for t in (20, 80)]
    assert sups[1] < sups[0]


def test_proximity_trend_powerdecay():
    f = Potential.preset("powerdecay")
    w = estimate_w(f, 1.3).w
    sups = [kernel_proximity(f, 1.3, 5, t, w=w).data["sup_discrepancy"] for t in (20, 40, 80)]
    assert sups[0] >= sups[1] >= sups[2]


def test_proximity_validation():
    with pytest.raises(ValueError):
        kernel_proximity(Potential.zero(), 0, 5, 10, grid_n=3)


def test_parseval_free_case():
    rep = nonlinear_parseval_residual(Potential.zero(), 1.0)
    assert rep.data["lhs"] == 0 == rep.data["rhs"]


def _closed_form_integral(q, t, L=1000.0):
    """Integral of log|a(t, s)| from |a|^2 = 1 + q^2 |sinh(t w) / w|^2, w^2 = q^2 - s^2.

    scipy quadrature on [0, L] in half-period pieces, plus the tail
    (q^2 / 2) int_L^inf sin^2(t r) / r^2 ds in closed form via Si.
    """
    import mpmath

    def g(s):
        return 0.5 * math.log(constant_abs_a_sq(q, t, s))

    edges = np.concatenate([[0.0, q], np.arange(2 * q, L, math.pi / (2 * t)), [L]])
    body = sum(integrate.quad(g, a, b, epsabs=1e-15, epsrel=1e-13)[0]
               for a, b in zip(edges, edges[1:]))
    X = t * math.sqrt(L * L - q * q)
    # int_X^inf sin^2(r) / r^2 dr = 1/(2X) - cos(2X)/(2X) + (pi/2 - Si(2X))
    tail_r = 1 / (2 * X) - math.cos(2 * X) / (2 * X) + float(mpmath.pi / 2 - mpmath.si(2 * X))
    tail = 0.5 * q * q * t * tail_r
    return 2 * (body + tail)


@pytest.mark.parametrize("q", [0.5, 1.0])
def test_log_abs_a_integral_matches_closed_form_quadrature(q):
    f = Potential.constant(q).truncate(1)
    qr, _, _ = integrate_log_abs_a(f, 1.0)
    assert abs(qr.value - _closed_form_integral(q, 1.0)) < 1e-7


@pytest.mark.parametrize("q", [0.5, 1.0])
def test_parseval_integral_equals_half_pi_norm(q):
    # with a = e^{itz}(E + iE~)/2 the integral of log|a| is (pi/2) ||f||^2
    f = Potential.constant(q).truncate(1)
    rep = nonlinear_parseval_residual(f, 1.0, normalization="plancherel")
    assert rep.passed
    assert rep.data["lhs"] == pytest.approx(0.5 * math.pi * q * q, abs=1e-6)


@pytest.mark.parametrize("q, expected", [(1.0, 1.0), (0.5, 0.25)])
def test_parseval_examples_as_stated(q, expected):
    # stated value: lhs equals ||f||^2 on (0, 1). The computed integral is
    # (pi/2) times that, so this check is reported as failing.
    rep = nonlinear_parseval_residual(Potential.constant(q).truncate(1), 1.0)
    assert rep.data["rhs"] == pytest.approx(expected, abs=1e-12)
    assert not rep.passed
    assert abs(rep.data["lhs"] - expected) > 0.1


def test_parseval_log_abs_a_nonnegative(rng):
    f = random_piecewise(rng, max_support=2.0)
    rep = nonlinear_parseval_residual(f, 2.0, normalization="plancherel")
    assert rep.check("min_log_abs_a").passed
    assert np.all(rep.data["log_abs_a"] >= -1e-15)


def test_parseval_tail_cap():
    with pytest.raises(TailNotConverged):
        integrate_log_abs_a(Potential.constant(1).truncate(1), 1.0,
                            ParsevalQuadrature(tail_tol=1e-30, s_max_cap=100))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=4), st.floats(0.2, 2))
def test_plancherel_form_random_piecewise(values, T):
    f = Potential.piecewise(np.linspace(0, T, len(values) + 1), values)
    rep = nonlinear_parseval_residual(f, T, normalization="plancherel")
    assert rep.check("plancherel_residual").value < 1e-6 * max(1, rep.data["rhs"])


def test_linearization_examples():
    f = Potential.constant(1)
    rep = linearization_error(f, 1.0, 0.0, [0.01])
    assert rep.data["errors"][0] == pytest.approx(math.sinh(0.01) - 0.01, rel=1e-6)
    assert linearization_error(f, 1.0, 0.0, [0.0, 0.1]).data["errors"][0] == 0.0
    assert linearization_error(f, 1.0, 0.0, [1e-1, 1e-2, 1e-3]).data["slope"] >= 1.9


def test_fourier_linear_matches_quadrature():
    f = Potential.piecewise([0, 0.3, 1.0], [1.0, -2.0])
    s = 1.7
    re = integrate.quad(lambda u: f.evaluate(u) * math.cos(2 * u * s), 0, 1, points=[0.3])[0]
    im = integrate.quad(lambda u: f.evaluate(u) * math.sin(2 * u * s), 0, 1, points=[0.3])[0]
    assert abs(fourier_linear(f, 1.0, s) - complex(re, im)) < 1e-12
