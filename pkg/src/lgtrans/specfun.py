"""Scalar special functions.

Exact rational arithmetic (``fractions.Fraction``) is used wherever the
arguments are rational: Laguerre coefficients, Pochhammer symbols, double
factorials and the terminating 3F2. Floating point enters only at the final
evaluation. Spherical harmonics follow the Condon-Shortley phase convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import DomainError, NumericError

__all__ = [
    "LaguerrePoly",
    "HypergeomParams",
    "factorial",
    "binomial",
    "double_factorial",
    "double_factorial_reciprocal",
    "pochhammer",
    "gamma_half",
    "assoc_laguerre",
    "spherical_harmonic",
    "harmonic_at_equator",
    "spherical_bessel",
    "hyp1f2",
    "hyp3f2_terminating",
    "hyp3f2_terminating_exact",
]

HYP1F2_RTOL = 1e-16
HYP1F2_MAX_TERMS = 100_000

factorial = math.factorial
binomial = math.comb


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    # floats are taken at face value (exact binary expansion)
    return Fraction(x)


def double_factorial(n: int) -> int:
    """n!! for n >= -1, with 0!! = (-1)!! = 1."""
    if n < -1:
        raise DomainError(f"n!! diverges for n = {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def double_factorial_reciprocal(n: int) -> Fraction:
    """Return 1/n!! exactly.

    For ``n <= -2`` the double factorial is treated as infinite, so the
    reciprocal is exactly zero. Sums weighted by this factor therefore drop
    the corresponding terms without special-casing.
    """
    if n <= -2:
        return Fraction(0)
    return Fraction(1, double_factorial(n))


def pochhammer(a, n: int) -> Fraction:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1), exact for rational a."""
    if n < 0:
        raise DomainError("pochhammer order must be non-negative")
    a = _as_fraction(a)
    out = Fraction(1)
    for i in range(n):
        out *= a + i
    return out


def gamma_half(k: int) -> float:
    """Gamma(k/2) for positive integer k."""
    if k <= 0:
        raise DomainError("gamma_half is defined here for k >= 1 only")
    if k % 2 == 0:
        return float(math.factorial(k // 2 - 1))
    # Gamma(j + 1/2) = (2j-1)!! sqrt(pi) / 2^j
    j = (k - 1) // 2
    return double_factorial(2 * j - 1) * math.sqrt(math.pi) / 2.0**j


# --------------------------------------------------------------------------
# Laguerre polynomials


_SPLITTER = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@dataclass(frozen=True)
class LaguerrePoly:
    """Generalized Laguerre polynomial L_p^alpha as exact monomial coefficients.

    ``coeffs[j]`` multiplies ``x**j``.
    """

    degree: int
    alpha: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1:
            raise DomainError("coefficient count must equal degree + 1")

    def __call__(self, x):
        # compensated Horner with double-double coefficients: plain Horner
        # loses ~6 digits to cancellation for degree 20 near x = 50
        x = np.asarray(x, dtype=float)
        hi, lo = self._split_coeffs
        s = np.full_like(x, hi[-1])
        err = np.full_like(x, lo[-1])
        for c_hi, c_lo in zip(hi[-2::-1], lo[-2::-1]):
            p, pe = _two_prod(s, x)
            s, se = _two_sum(p, c_hi)
            err = err * x + (pe + se + c_lo)
        out = s + err
        return out if out.ndim else float(out)

    @cached_property
    def _split_coeffs(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        hi = tuple(float(c) for c in self.coeffs)
        lo = tuple(float(c - Fraction(h)) for c, h in zip(self.coeffs, hi))
        return hi, lo

    def exact(self, x) -> Fraction:
        x = _as_fraction(x)
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def recurrence(self, x):
        """Evaluate by the three-term recurrence instead of the coefficients."""
        return laguerre_recurrence(self.degree, self.alpha, x)


@lru_cache(maxsize=None)
def assoc_laguerre(p: int, alpha: int) -> LaguerrePoly:
    if p < 0 or alpha < 0:
        raise DomainError("Laguerre degree and alpha must be non-negative")
    coeffs = tuple(
        Fraction((-1) ** j * math.comb(p + alpha, p - j), math.factorial(j))
        for j in range(p + 1)
    )
    return LaguerrePoly(p, alpha, coeffs)


def laguerre_recurrence(p: int, alpha: int, x):
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if p == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for k in range(1, p):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur if np.ndim(cur) else float(cur)


# --------------------------------------------------------------------------
# Spherical harmonics


def _check_lm(l: int, m: int) -> None:
    if l < 0 or abs(m) > l:
        raise DomainError(f"invalid harmonic indices (l={l}, m={m})")


def _legendre_normalized(l: int, m: int, x, sin_theta=None):
    """sqrt((2l+1)/4pi (l-m)!/(l+m)!) P_l^m(x) with Condon-Shortley phase, m >= 0.

    Pass ``sin_theta`` when available: rebuilding it from 1 - x^2 loses
    half the digits near the poles.
    """
    x = np.asarray(x, dtype=float)
    if sin_theta is None:
        s2 = np.clip(1.0 - x * x, 0.0, None)
    else:
        s2 = np.asarray(sin_theta, dtype=float) ** 2
    # P_m^m seed
    ratio = 1.0
    for k in range(1, m + 1):
        ratio *= (2 * k - 1) / (2 * k)
    pmm = (-1) ** m * math.sqrt((2 * m + 1) / (4 * math.pi) * ratio) * s2 ** (m / 2)
    if l == m:
        return pmm
    pm1 = x * math.sqrt(2 * m + 3) * pmm
    if l == m + 1:
        return pm1
    a_prev = math.sqrt((4 * (m + 1) ** 2 - 1) / ((m + 1) ** 2 - m * m))
    for ll in range(m + 2, l + 1):
        a = math.sqrt((4 * ll * ll - 1) / (ll * ll - m * m))
        pmm, pm1 = pm1, a * (x * pm1 - pmm / a_prev)
        a_prev = a
    return pm1


def spherical_harmonic(l: int, m: int, theta, phi):
    """Complex Y_l^m(theta, phi), orthonormal on the unit sphere."""
    _check_lm(l, m)
    am = abs(m)
    theta = np.asarray(theta, dtype=float)
    sin_theta = np.abs(np.sin(theta))
    val = _legendre_normalized(l, am, np.cos(theta), sin_theta) * np.exp(1j * am * np.asarray(phi))
    if m < 0:
        val = (-1) ** am * np.conj(val)
    return val if np.ndim(val) else complex(val)


def harmonic_at_equator(l: int, m: int) -> float:
    """Y_l^m(pi/2, 0) from the double-factorial closed form; exactly 0 for l+m odd."""
    _check_lm(l, m)
    if (l + m) % 2:
        return 0.0
    sign = -1 if ((l + m) // 2) % 2 else 1
    num = math.factorial(l - m) * math.factorial(l + m)
    den = double_factorial(l - m) * double_factorial(l + m)
    return sign * math.sqrt((2 * l + 1) / (4 * math.pi) * Fraction(num, den * den))


# --------------------------------------------------------------------------
# Spherical Bessel functions


def _sph_bessel_series(p: int, x: float) -> float:
    lead = x**p / double_factorial(2 * p + 1)
    term, total, k = 1.0, 1.0, 0
    q = -0.5 * x * x
    while True:
        k += 1
        term *= q / (k * (2 * p + 2 * k + 1))
        total += term
        if abs(term) < 1e-17 * abs(total):
            return lead * total


def _sph_bessel_miller(p: int, x: float) -> float:
    start = p + int(x) + 20 + int(math.sqrt(40.0 * max(p, x, 1.0)))
    fnext, f = 0.0, 1.0
    norm = (2 * start + 1) * f * f
    vals = [0.0] * (p + 1)
    for n in range(start, 0, -1):
        fnext, f = f, (2 * n + 1) / x * f - fnext
        norm += (2 * n - 1) * f * f
        if n - 1 <= p:
            vals[n - 1] = f
        if abs(f) > 1e150:
            f *= 1e-150
            fnext *= 1e-150
            norm *= 1e-300
            vals = [v * 1e-150 for v in vals]
    # sum_n (2n+1) j_n(x)^2 = 1 fixes the scale; j_0 (or j_1 near its zeros) the sign
    scale = 1.0 / math.sqrt(norm)
    j0 = math.sin(x) / x
    if abs(j0) < 0.1 and p >= 1:
        j1 = math.sin(x) / (x * x) - math.cos(x) / x
        if vals[1] * j1 < 0:
            scale = -scale
    elif vals[0] * j0 < 0:
        scale = -scale
    return vals[p] * scale


def spherical_bessel(p: int, x: float) -> float:
    """j_p(x) for p >= 0, x >= 0.

    Power series where cancellation is mild (preserves the x^p/(2p+1)!!
    behaviour near the origin), Miller's downward recurrence otherwise,
    normalised with sum_n (2n+1) j_n^2 = 1.
    """
    if p < 0 or x < 0:
        raise DomainError("spherical_bessel needs p >= 0 and x >= 0")
    x = float(x)
    if x == 0.0:
        return 1.0 if p == 0 else 0.0
    if x * x < 4.0 * (2 * p + 3) or x < 1.0:
        return _sph_bessel_series(p, x)
    return _sph_bessel_miller(p, x)


# --------------------------------------------------------------------------
# Generalized hypergeometric series


@dataclass(frozen=True)
class HypergeomParams:
    numer: tuple[Fraction, ...]
    denom: tuple[Fraction, ...]
    z: float

    def __post_init__(self):
        numer = tuple(_as_fraction(a) for a in self.numer)
        denom = tuple(_as_fraction(b) for b in self.denom)
        object.__setattr__(self, "numer", numer)
        object.__setattr__(self, "denom", denom)
        stop = _termination_order(numer)
        for b in denom:
            if b.denominator == 1 and b <= 0 and (stop is None or -b < stop):
                raise DomainError(f"denominator parameter {b} hits a pole before termination")

    @property
    def terminates_at(self) -> int | None:
        return _termination_order(self.numer)


def _termination_order(numer: Sequence[Fraction]) -> int | None:
    orders = [int(-a) for a in numer if a.denominator == 1 and a <= 0]
    return min(orders) if orders else None


def _hyp1f2_float(a: float, b1: float, b2: float, z: float):
    term, total, peak = 1.0, 1.0, 1.0
    for k in range(HYP1F2_MAX_TERMS):
        ratio = (a + k) * z / ((b1 + k) * (b2 + k) * (k + 1))
        term *= ratio
        total += term
        peak = max(peak, abs(term))
        if term == 0.0 or (abs(ratio) < 0.5 and abs(term) < HYP1F2_RTOL * abs(total)):
            return total, peak
    raise NumericError(f"1F2 did not converge in {HYP1F2_MAX_TERMS} terms (z={z})")


def _hyp1f2_decimal(a: Fraction, b1: Fraction, b2: Fraction, z: float, digits: int) -> float:
    with localcontext() as ctx:
        ctx.prec = digits
        dec = lambda q: Decimal(q.numerator) / Decimal(q.denominator)  # noqa: E731
        a_, b1_, b2_, z_ = dec(a), dec(b1), dec(b2), Decimal(z)
        tol = Decimal(10) ** (-20)
        term, total = Decimal(1), Decimal(1)
        for k in range(HYP1F2_MAX_TERMS):
            ratio = (a_ + k) * z_ / ((b1_ + k) * (b2_ + k) * (k + 1))
            term *= ratio
            total += term
            if term == 0 or (abs(ratio) < Decimal("0.5") and abs(term) < tol * abs(total)):
                return float(total)
    raise NumericError(f"1F2 did not converge in {HYP1F2_MAX_TERMS} terms (z={z})")


def hyp1f2(a, b1, b2, z: float) -> float:
    """1F2(a; b1, b2; z) by direct summation of the series.

    Summation stops once the term ratio has dropped below 1/2 and the next
    term is below 1e-16 of the partial sum; beyond that point the tail is
    bounded by twice the last term. When cancellation between terms eats
    more than three digits the sum is redone in decimal arithmetic with
    enough guard digits.
    """
    params = HypergeomParams((a,), (b1, b2), z)
    if abs(z) > 1e4:
        raise DomainError("|z| > 1e4 is outside the supported range")
    a, b1, b2 = params.numer[0], *params.denom
    if z == 0:
        return 1.0
    total, peak = _hyp1f2_float(float(a), float(b1), float(b2), float(z))
    if total != 0.0 and peak / abs(total) <= 1e3:
        return total
    # the float total is unreliable here, so size the precision from the peak term
    digits = int(math.log10(peak)) + 40
    while True:
        value = _hyp1f2_decimal(a, b1, b2, float(z), digits)
        if value != 0.0 and math.log10(peak / abs(value)) < digits - 25:
            return value
        if digits > 2000:
            raise NumericError(f"1F2 cancellation too severe at z={z}")
        digits += 40


def hyp3f2_terminating_exact(a1, a2, a3, b1, b2) -> Fraction:
    """3F2(a1, a2, a3; b1, b2; 1) for a1 = -n, summed exactly."""
    a1, a2, a3, b1, b2 = (_as_fraction(v) for v in (a1, a2, a3, b1, b2))
    if a1.denominator != 1 or a1 > 0:
        raise DomainError("a1 must be a non-positive integer")
    n = int(-a1)
    term, total = Fraction(1), Fraction(1)
    for k in range(n):
        den = (b1 + k) * (b2 + k) * (k + 1)
        if den == 0:
            raise DomainError(
                f"denominator Pochhammer vanishes at order {k + 1} <= {n}: b=({b1}, {b2})"
            )
        term *= (a1 + k) * (a2 + k) * (a3 + k) / den
        total += term
    return total


def hyp3f2_terminating(a1, a2, a3, b1, b2) -> float:
    return float(hyp3f2_terminating_exact(a1, a2, a3, b1, b2))
