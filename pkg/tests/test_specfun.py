import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from lgtrans.errors import DomainError, NumericError
from lgtrans.specfun import (
    HypergeomParams,
    assoc_laguerre,
    binomial,
    double_factorial,
    double_factorial_reciprocal,
    factorial,
    gamma_half,
    harmonic_at_equator,
    hyp1f2,
    hyp3f2_terminating,
    hyp3f2_terminating_exact,
    laguerre_recurrence,
    pochhammer,
    spherical_bessel,
    spherical_harmonic,
)


# --- counting functions -----------------------------------------------------


def test_double_factorial_reciprocal_examples():
    assert double_factorial_reciprocal(0) == 1
    assert double_factorial_reciprocal(-1) == 1
    assert double_factorial_reciprocal(6) == Fraction(1, 48)
    assert double_factorial_reciprocal(7) == Fraction(1, 105)
    for n in (-2, -3, -4, -11):
        assert double_factorial_reciprocal(n) == 0


def test_double_factorial_domain():
    assert double_factorial(-1) == 1
    assert double_factorial(9) == 945
    with pytest.raises(DomainError):
        double_factorial(-2)


def test_pochhammer_and_gamma():
    assert pochhammer(Fraction(7, 3), 0) == 1
    assert pochhammer(2, 3) == 24
    assert pochhammer(-3, 5) == 0
    assert pochhammer(Fraction(1, 2), 2) == Fraction(3, 4)
    assert gamma_half(1) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma_half(3) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-15)
    assert gamma_half(8) == 6.0
    assert factorial(10) == 3628800
    assert binomial(10, 3) == 120


@given(st.integers(0, 40))
def test_gamma_half_matches_math(k):
    if k == 0:
        with pytest.raises(DomainError):
            gamma_half(k)
    else:
        assert gamma_half(k) == pytest.approx(math.gamma(k / 2), rel=1e-14)


@given(st.fractions(min_value=-5, max_value=5, max_denominator=7), st.integers(0, 8), st.integers(0, 8))
def test_pochhammer_splits(a, n, m):
    assert pochhammer(a, n + m) == pochhammer(a, n) * pochhammer(a + n, m)


# --- Laguerre ---------------------------------------------------------------


def test_laguerre_examples():
    assert assoc_laguerre(0, 3).coeffs == (1,)
    assert assoc_laguerre(1, 4).coeffs == (5, -1)
    assert assoc_laguerre(2, 0)(2.0) == pytest.approx(-1.0, abs=1e-15)
    assert assoc_laguerre(2, 0).exact(2) == -1


def test_laguerre_coefficient_count():
    for p in range(12):
        for a in range(5):
            poly = assoc_laguerre(p, a)
            assert len(poly.coeffs) == p + 1 == poly.degree + 1
            assert all(isinstance(c, Fraction) for c in poly.coeffs)


@pytest.mark.parametrize("alpha", range(7))
def test_laguerre_orthogonality_exact(alpha):
    for p in range(11):
        for q in range(11):
            cp, cq = assoc_laguerre(p, alpha).coeffs, assoc_laguerre(q, alpha).coeffs
            val = sum(a * b * math.factorial(alpha + i + j) for i, a in enumerate(cp) for j, b in enumerate(cq))
            want = Fraction(math.factorial(p + alpha), math.factorial(p)) if p == q else 0
            assert val == want


def test_laguerre_coeffs_vs_recurrence():
    # pointwise relative error is meaningless at roots, so compare on the
    # scale of the largest value over [0, 50]
    x = np.linspace(0.0, 50.0, 201)
    for p in range(21):
        for alpha in range(7):
            a, b = assoc_laguerre(p, alpha)(x), laguerre_recurrence(p, alpha, x)
            assert np.max(np.abs(a - b)) < 1e-12 * np.max(np.abs(b))


def test_laguerre_evaluation_is_correctly_rounded():
    x = np.linspace(0.0, 50.0, 101)
    for p in (5, 12, 20):
        poly = assoc_laguerre(p, 6)
        exact = np.array([float(poly.exact(Fraction(t))) for t in x])
        got = poly(x)
        nz = exact != 0
        assert np.max(np.abs(got[nz] - exact[nz]) / np.abs(exact[nz])) < 1e-14


@given(st.integers(0, 15), st.integers(0, 6), st.floats(0, 30))
def test_laguerre_vs_scipy(p, alpha, x):
    want = special.eval_genlaguerre(p, alpha, x)
    got = assoc_laguerre(p, alpha)(x)
    scale = float(np.max(np.abs(assoc_laguerre(p, alpha)(np.linspace(0, 30, 61)))))
    assert abs(got - want) <= 1e-12 * scale


# --- spherical harmonics ----------------------------------------------------


def test_spherical_harmonic_examples():
    assert spherical_harmonic(0, 0, 0.3, 1.1) == pytest.approx(1 / math.sqrt(4 * math.pi))
    assert abs(spherical_harmonic(1, 0, math.pi / 2, 0.7)) < 1e-16
    assert spherical_harmonic(1, 1, math.pi / 2, 0.0) == pytest.approx(-math.sqrt(3 / (8 * math.pi)), rel=1e-15)
    with pytest.raises(DomainError):
        spherical_harmonic(2, 3, 0.1, 0.1)


@settings(max_examples=60)
@given(st.integers(0, 12), st.data(), st.floats(0, math.pi), st.floats(-math.pi, math.pi))
def test_spherical_harmonic_vs_mpmath(l, data, theta, phi):
    m = data.draw(st.integers(-l, l))
    want = complex(mpmath.spherharm(l, m, theta, phi))
    assert abs(spherical_harmonic(l, m, theta, phi) - want) < 1e-13


def test_spherical_harmonic_orthonormality():
    idx = [(l, m) for l in range(9) for m in range(-l, l + 1)]
    x, w = np.polynomial.legendre.leggauss(32)
    n_phi = 64
    phi = np.arange(n_phi) * 2 * math.pi / n_phi
    T, P = np.meshgrid(np.arccos(x), phi, indexing="ij")
    Y = np.array([spherical_harmonic(l, m, T, P).ravel() for l, m in idx])
    W = np.repeat(w, n_phi) * 2 * math.pi / n_phi
    gram = (Y.conj() * W) @ Y.T
    assert np.max(np.abs(gram - np.eye(len(idx)))) < 1e-10


def test_harmonic_at_equator():
    assert harmonic_at_equator(1, 0) == 0.0
    assert harmonic_at_equator(0, 0) == pytest.approx(1 / math.sqrt(4 * math.pi), rel=1e-15)
    assert harmonic_at_equator(2, 2) == pytest.approx(spherical_harmonic(2, 2, math.pi / 2, 0.0).real, abs=1e-14)
    for l in range(11):
        for m in range(-l, l + 1):
            want = spherical_harmonic(l, m, math.pi / 2, 0.0)
            assert abs(harmonic_at_equator(l, m) - want) < 1e-13
            if (l + m) % 2:
                assert harmonic_at_equator(l, m) == 0.0


# --- spherical Bessel -------------------------------------------------------


def test_spherical_bessel_examples():
    assert spherical_bessel(0, 0.0) == 1.0
    assert spherical_bessel(3, 0.0) == 0.0
    assert spherical_bessel(0, 1.0) == pytest.approx(math.sin(1.0), rel=1e-15)
    # j_2(0.1) from its closed form (3/x^3 - 1/x) sin x - 3 cos x / x^2
    x = 0.1
    closed = (3 / x**3 - 1 / x) * math.sin(x) - 3 * math.cos(x) / x**2
    series = sum((-1) ** k * x ** (2 * k + 2) / (math.factorial(k) * 2**k * double_factorial(2 * k + 5)) for k in range(10))
    assert spherical_bessel(2, 0.1) == pytest.approx(series, rel=1e-15)
    assert closed == pytest.approx(series, rel=1e-9)  # the closed form cancels badly at small x
    assert spherical_bessel(2, 0.1) == pytest.approx(6.6619060838490e-4, rel=1e-12)


@pytest.mark.parametrize("p", [0, 1, 2, 5, 10, 20, 30])
def test_spherical_bessel_vs_mpmath(p):
    for x in np.concatenate([np.linspace(1e-3, 1, 7), np.linspace(1.3, 50, 40)]):
        want = float(mpmath.sqrt(mpmath.pi / (2 * x)) * mpmath.besselj(p + 0.5, x))
        got = spherical_bessel(p, float(x))
        if abs(want) > 1e-290:
            assert abs(got - want) <= 1e-12 * abs(want) or abs(got - want) < 1e-300


@settings(max_examples=80)
@given(st.integers(1, 29), st.floats(0.05, 50))
def test_spherical_bessel_recurrence(p, x):
    # j_{p-1} + j_{p+1} = (2p+1)/x j_p, checked away from roots
    lhs = spherical_bessel(p - 1, x) + spherical_bessel(p + 1, x)
    rhs = (2 * p + 1) / x * spherical_bessel(p, x)
    scale = max(abs(spherical_bessel(p - 1, x)), abs(spherical_bessel(p + 1, x)), 1e-300)
    assert abs(lhs - rhs) <= 1e-11 * scale


def test_plane_wave_expansion():
    theta = np.linspace(0.0, math.pi, 64)
    for x in (0.5, 2.0, 5.0):
        series = sum(
            1j**p * math.sqrt(4 * math.pi * (2 * p + 1)) * spherical_bessel(p, x) * spherical_harmonic(p, 0, theta, 0.0)
            for p in range(41)
        )
        assert np.max(np.abs(np.exp(1j * x * np.cos(theta)) - series)) < 1e-10


# --- hypergeometric ---------------------------------------------------------


def test_hyp1f2_zero_argument():
    assert hyp1f2(Fraction(1, 2), Fraction(3, 2), 2, 0.0) == 1.0


def test_hyp1f2_rejects_poles():
    with pytest.raises(DomainError):
        hyp1f2(1, -2, 1, 0.5)
    with pytest.raises(DomainError):
        hyp1f2(1, 1, 1, 2e4)
    with pytest.raises(DomainError):
        HypergeomParams((1,), (0, 1), 0.1)


def test_hyp1f2_lambda_kernel_example():
    # p = l' = 0 and a = 0.3: the integral of j_0(0.3 t) over [0, 1] is Si(0.3)/0.3
    a = 0.3
    f = hyp1f2(Fraction(1, 2), Fraction(3, 2), Fraction(3, 2), -(a / 2) ** 2)
    assert f == pytest.approx(float(mpmath.si(a)) / a, rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(
    st.fractions(min_value=Fraction(1, 2), max_value=8, max_denominator=2),
    st.fractions(min_value=Fraction(1, 2), max_value=10, max_denominator=2),
    st.fractions(min_value=Fraction(1, 2), max_value=10, max_denominator=2),
    st.floats(-1e4, 1e4),
)
def test_hyp1f2_vs_extended_precision(a, b1, b2, z):
    with mpmath.workdps(50):
        want = mpmath.hyp1f2(mpmath.mpf(a.numerator) / a.denominator, mpmath.mpf(b1.numerator) / b1.denominator,
                             mpmath.mpf(b2.numerator) / b2.denominator, z)
    got = hyp1f2(a, b1, b2, z)
    assert abs(got - float(want)) <= 1e-13 * abs(float(want)) + 1e-300


def test_hyp1f2_term_cap():
    from lgtrans import specfun

    old = specfun.HYP1F2_MAX_TERMS
    specfun.HYP1F2_MAX_TERMS = 3
    try:
        with pytest.raises(NumericError):
            hyp1f2(1, 1, 1, 50.0)
    finally:
        specfun.HYP1F2_MAX_TERMS = old


def test_hyp3f2_examples():
    assert hyp3f2_terminating(0, 3, 4, 5, 6) == 1.0
    assert hyp3f2_terminating(-1, 1, 1, 1, 1) == 0.0
    with pytest.raises(DomainError):
        hyp3f2_terminating(1, 1, 1, 1, 1)


def test_hyp3f2_degenerate_parameters_raise():
    # N_i=2, M_i=0, exponent 2, M_f=2, N_f=4 maps onto a zero lower parameter
    with pytest.raises(DomainError):
        hyp3f2_terminating_exact(-1, 3, 1, 1, 0)


@settings(max_examples=80)
@given(st.integers(0, 12), st.fractions(-6, 6, max_denominator=3), st.fractions(-6, 6, max_denominator=3),
       st.fractions(Fraction(1, 3), 9, max_denominator=3), st.fractions(Fraction(1, 3), 9, max_denominator=3))
def test_hyp3f2_vs_mpmath(n, a2, a3, b1, b2):
    # explicit terminating sum at 40 digits; mpmath.hyp3f2 cannot settle exact zeros
    f = lambda q: mpmath.mpf(q.numerator) / q.denominator  # noqa: E731
    with mpmath.workdps(40):
        want = mpmath.fsum(
            mpmath.rf(-n, j) * mpmath.rf(f(a2), j) * mpmath.rf(f(a3), j)
            / (mpmath.rf(f(b1), j) * mpmath.rf(f(b2), j) * mpmath.factorial(j))
            for j in range(n + 1)
        )
    got = hyp3f2_terminating(-n, a2, a3, b1, b2)
    assert got == pytest.approx(float(want), rel=1e-12, abs=1e-12)
