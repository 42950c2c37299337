"""Angular-momentum algebra: Wigner 3j symbols, Gaunt coefficients and
integrals of products of spherical harmonics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError

__all__ = [
    "AngularBraKet",
    "wigner3j",
    "wigner3j_squared",
    "gaunt",
    "coupling_coefficient",
    "multi_harmonic_integral",
    "parity_allowed",
]


def _twice(j) -> int:
    t = Fraction(j) * 2
    if t.denominator != 1:
        raise DomainError(f"{j} is not an integer or half-integer")
    return int(t)


@lru_cache(maxsize=65536)
def _racah(tj1: int, tj2: int, tj3: int, tm1: int, tm2: int, tm3: int) -> tuple[int, Fraction]:
    """Sign and exact square of the 3j symbol, from twice-valued arguments."""
    if tm1 + tm2 + tm3 != 0:
        return 0, Fraction(0)
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        if tj < 0 or abs(tm) > tj or (tj + tm) % 2:
            return 0, Fraction(0)
    if (tj1 + tj2 + tj3) % 2 or tj3 > tj1 + tj2 or tj3 < abs(tj1 - tj2):
        return 0, Fraction(0)

    f = math.factorial
    a, b, c = (tj1 + tj2 - tj3) // 2, (tj1 - tj2 + tj3) // 2, (-tj1 + tj2 + tj3) // 2
    delta = Fraction(f(a) * f(b) * f(c), f((tj1 + tj2 + tj3) // 2 + 1))
    norm = 1
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        norm *= f((tj + tm) // 2) * f((tj - tm) // 2)

    t1 = (tj3 - tj2 + tm1) // 2
    t2 = (tj3 - tj1 - tm2) // 2
    t3 = (tj1 + tj2 - tj3) // 2
    t4 = (tj1 - tm1) // 2
    t5 = (tj2 + tm2) // 2
    total = Fraction(0)
    for k in range(max(0, -t1, -t2), min(t3, t4, t5) + 1):
        den = f(k) * f(t1 + k) * f(t2 + k) * f(t3 - k) * f(t4 - k) * f(t5 - k)
        total += Fraction((-1) ** k, den)
    if total == 0:
        return 0, Fraction(0)
    phase = (tj1 - tj2 - tm3) // 2
    sign = (-1) ** phase * (1 if total > 0 else -1)
    return sign, delta * norm * total * total


def wigner3j_squared(j1, j2, j3, m1, m2, m3) -> tuple[int, Fraction]:
    """Exact (sign, square) of the 3j symbol."""
    return _racah(*(_twice(v) for v in (j1, j2, j3, m1, m2, m3)))


def wigner3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol by the Racah formula with integer intermediates.

    Returns 0 when the triangle, projection or m-sum conditions fail.
    """
    sign, sq = wigner3j_squared(j1, j2, j3, m1, m2, m3)
    return sign * math.sqrt(sq) if sign else 0.0


def gaunt(l1: int, m1: int, l2: int, m2: int, l3: int, m3: int) -> float:
    """Integral of Y_l1^m1 Y_l2^m2 Y_l3^m3 over the unit sphere."""
    for l, m in ((l1, m1), (l2, m2), (l3, m3)):
        if l < 0 or abs(m) > l:
            raise DomainError(f"invalid harmonic indices (l={l}, m={m})")
    if (l1 + l2 + l3) % 2 or m1 + m2 + m3:
        return 0.0
    s0, q0 = wigner3j_squared(l1, l2, l3, 0, 0, 0)
    s1, q1 = wigner3j_squared(l1, l2, l3, m1, m2, m3)
    if not (s0 and s1):
        return 0.0
    pref = (2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1) / (4 * math.pi)
    return s0 * s1 * math.sqrt(pref * float(q0 * q1))


def coupling_coefficient(la: int, ma: int, lb: int, mb: int, L: int) -> float:
    """c_L in Y_la^ma Y_lb^mb = sum_L c_L Y_L^(ma+mb)."""
    M = ma + mb
    if abs(M) > L:
        return 0.0
    return (-1) ** M * gaunt(la, ma, lb, mb, L, -M)


@dataclass(frozen=True)
class AngularBraKet:
    """<Y_final | prod(factors) | Y_initial>, each entry an (l, m) pair."""

    final: tuple[int, int]
    factors: tuple[tuple[int, int], ...]
    initial: tuple[int, int]

    def __post_init__(self):
        pairs = (self.final, *self.factors, self.initial)
        for l, m in pairs:
            if l < 0 or abs(m) > l:
                raise DomainError(f"invalid harmonic indices (l={l}, m={m})")
        object.__setattr__(self, "factors", tuple(tuple(f) for f in self.factors))


def _contract(factors: tuple[tuple[int, int], ...]) -> dict[tuple[int, int], float]:
    # left-to-right pairwise coupling of the factor harmonics
    expansion = {factors[0]: 1.0}
    for lb, mb in factors[1:]:
        nxt: dict[tuple[int, int], float] = {}
        for (la, ma), coeff in expansion.items():
            M = ma + mb
            for L in range(max(abs(la - lb), abs(M)), la + lb + 1):
                c = coupling_coefficient(la, ma, lb, mb, L)
                if c != 0.0:
                    nxt[(L, M)] = nxt.get((L, M), 0.0) + coeff * c
        expansion = nxt
    return expansion


def multi_harmonic_integral(bk: AngularBraKet) -> float:
    """Integral of conj(Y_final) * prod(factors) * Y_initial over the sphere.

    Real in the Condon-Shortley convention.
    """
    (lf, mf), (li, mi) = bk.final, bk.initial
    if not bk.factors:
        return 1.0 if (lf, mf) == (li, mi) else 0.0
    if mf != mi + sum(m for _, m in bk.factors):
        return 0.0
    total = 0.0
    for (L, M), coeff in _contract(bk.factors).items():
        total += coeff * gaunt(lf, -mf, L, M, li, mi)
    return (-1) ** mf * total


def parity_allowed(l_f: int, l_i: int, l_prime: int, p: int) -> bool:
    return (l_f + l_i + l_prime + p + 1) % 2 == 0
