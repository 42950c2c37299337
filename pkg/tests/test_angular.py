import itertools
import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.physics.wigner import gaunt as sympy_gaunt, wigner_3j

from lgtrans.angular import (
    AngularBraKet,
    coupling_coefficient,
    gaunt,
    multi_harmonic_integral,
    parity_allowed,
    wigner3j,
    wigner3j_squared,
)
from lgtrans.errors import DomainError
from lgtrans.oracle import sphere_quadrature
from lgtrans.specfun import spherical_harmonic


def test_wigner3j_examples():
    assert wigner3j(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / math.sqrt(3), rel=1e-15)
    assert wigner3j(1, 1, 2, 0, 0, 0) == pytest.approx(math.sqrt(2 / 15), rel=1e-15)
    assert wigner3j(1, 1, 2, 1, 0, 0) == 0.0
    assert wigner3j(1, 1, 3, 0, 0, 0) == 0.0
    assert wigner3j(0.5, 0.5, 1, 0.5, -0.5, 0) == pytest.approx(1 / math.sqrt(6), rel=1e-15)
    with pytest.raises(DomainError):
        wigner3j(0.3, 1, 1, 0, 0, 0)


def _three_j_args(j_max=5):
    for j1, j2 in itertools.product(range(j_max + 1), repeat=2):
        for j3 in range(abs(j1 - j2), min(j1 + j2, j_max) + 1):
            for m1 in range(-j1, j1 + 1):
                for m2 in range(-j2, j2 + 1):
                    if abs(m1 + m2) <= j3:
                        yield j1, j2, j3, m1, m2, -m1 - m2


def test_wigner3j_vs_sympy_exact():
    for args in _three_j_args(4):
        sign, sq = wigner3j_squared(*args)
        ref = wigner_3j(*args)
        assert sq == ref**2
        assert sign == int(sympy.sign(ref))


def test_wigner3j_permutation_symmetry():
    for j1, j2, j3, m1, m2, m3 in _three_j_args(5):
        w = wigner3j(j1, j2, j3, m1, m2, m3)
        odd = (-1) ** (j1 + j2 + j3)
        assert wigner3j(j2, j3, j1, m2, m3, m1) == pytest.approx(w, abs=1e-15)
        assert wigner3j(j3, j1, j2, m3, m1, m2) == pytest.approx(w, abs=1e-15)
        assert wigner3j(j2, j1, j3, m2, m1, m3) == pytest.approx(odd * w, abs=1e-15)
        assert wigner3j(j1, j3, j2, m1, m3, m2) == pytest.approx(odd * w, abs=1e-15)
        assert wigner3j(j1, j2, j3, -m1, -m2, -m3) == pytest.approx(odd * w, abs=1e-15)


def test_wigner3j_orthogonality():
    for j1, j2 in itertools.product(range(6), repeat=2):
        for j3 in range(abs(j1 - j2), min(j1 + j2, 5) + 1):
            for m3 in range(-j3, j3 + 1):
                total = sum(
                    (2 * j3 + 1) * wigner3j(j1, j2, j3, m1, -m1 - m3, m3) ** 2
                    for m1 in range(-j1, j1 + 1)
                    if abs(m1 + m3) <= j2
                )
                assert total == pytest.approx(1.0, abs=1e-13)


def test_gaunt_examples():
    assert gaunt(0, 0, 0, 0, 0, 0) == pytest.approx(1 / math.sqrt(4 * math.pi), rel=1e-15)
    assert gaunt(1, 0, 1, 0, 1, 0) == 0.0
    quad = sphere_quadrature(
        lambda t, p: spherical_harmonic(2, 0, t, p) * spherical_harmonic(1, 0, t, p) * spherical_harmonic(1, 0, t, p)
    )
    assert gaunt(2, 0, 1, 0, 1, 0) == pytest.approx(quad.real, abs=1e-10)
    assert gaunt(2, 0, 1, 0, 1, 0) == pytest.approx(1 / math.sqrt(5 * math.pi), rel=1e-14)
    with pytest.raises(DomainError):
        gaunt(1, 2, 1, 0, 1, 0)


@settings(max_examples=150)
@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6), st.data())
def test_gaunt_vs_sympy(l1, l2, l3, data):
    m1 = data.draw(st.integers(-l1, l1))
    m2 = data.draw(st.integers(-l2, l2))
    m3 = data.draw(st.integers(-l3, l3))
    assert gaunt(l1, m1, l2, m2, l3, m3) == pytest.approx(float(sympy_gaunt(l1, l2, l3, m1, m2, m3)), abs=1e-14)


def test_coupling_reconstructs_product():
    t, p = np.meshgrid(np.linspace(0.1, 3.0, 7), np.linspace(-3, 3, 9), indexing="ij")
    for la, ma, lb, mb in [(1, 1, 1, 0), (2, -1, 1, 1), (3, 2, 2, -2)]:
        prod = spherical_harmonic(la, ma, t, p) * spherical_harmonic(lb, mb, t, p)
        rebuilt = sum(
            coupling_coefficient(la, ma, lb, mb, L) * spherical_harmonic(L, ma + mb, t, p)
            for L in range(abs(la - lb), la + lb + 1)
            if abs(ma + mb) <= L
        )
        assert np.max(np.abs(prod - rebuilt)) < 1e-13


def test_multi_harmonic_examples():
    bk = AngularBraKet((0, 0), ((0, 0), (0, 0), (0, 0)), (0, 0))
    assert multi_harmonic_integral(bk) == pytest.approx((4 * math.pi) ** -1.5, rel=1e-14)
    assert multi_harmonic_integral(AngularBraKet((1, 1), ((1, 0), (1, 1), (0, 0)), (0, 0))) == 0.0
    bk = AngularBraKet((2, 2), ((1, 1), (1, 1), (0, 0)), (0, 0))
    quad = sphere_quadrature(
        lambda t, p: np.conj(spherical_harmonic(2, 2, t, p)) * spherical_harmonic(1, 1, t, p) ** 2 / (4 * math.pi)
    )
    assert multi_harmonic_integral(bk) == pytest.approx(quad.real, abs=1e-10)
    # frozen: sqrt(3 / (10 pi)) / (4 pi)
    assert multi_harmonic_integral(bk) == pytest.approx(math.sqrt(3 / (10 * math.pi)) / (4 * math.pi), rel=1e-14)
    with pytest.raises(DomainError):
        AngularBraKet((1, 2), (), (0, 0))


def _harmonic_pairs(l_max):
    return st.integers(0, l_max).flatmap(lambda l: st.tuples(st.just(l), st.integers(-l, l)))


@settings(max_examples=120, deadline=None)
@given(_harmonic_pairs(4), st.lists(_harmonic_pairs(4), min_size=1, max_size=3), _harmonic_pairs(4))
def test_multi_harmonic_vs_quadrature(final, factors, initial):
    bk = AngularBraKet(final, tuple(factors), initial)

    def f(t, p):
        out = np.conj(spherical_harmonic(*final, t, p)) * spherical_harmonic(*initial, t, p)
        for l, m in factors:
            out = out * spherical_harmonic(l, m, t, p)
        return out

    assert abs(multi_harmonic_integral(bk) - sphere_quadrature(f)) < 1e-9


@given(_harmonic_pairs(4), st.integers(0, 3), st.integers(-1, 1), st.integers(0, 3), _harmonic_pairs(4))
def test_parity_zero_in_channel_pattern(final, lp, sigma, p, initial):
    bk = AngularBraKet(final, ((lp, lp), (1, sigma), (p, 0)), initial)
    val = multi_harmonic_integral(bk)
    if not parity_allowed(final[0], initial[0], lp, p):
        assert val == 0.0
    if final[1] != initial[1] + lp + sigma:
        assert val == 0.0


def test_parity_allowed_examples():
    assert parity_allowed(1, 0, 0, 0)
    assert not parity_allowed(0, 0, 0, 0)
    assert parity_allowed(2, 0, 1, 0)
