"""Regular solid harmonics and the near-axis LG field.

The field is available in four equivalent evaluations:

* ``field_raw``: E0/sqrt(|l|!) (r_perp/w0)^|l| exp[i(l phi + k z - w t)]
* ``field_solid_form``: the same field written through R_|l|^l(r_perp/w0)
* ``field_translated`` at a point R +/- lambda*mu*r, expanded with the
  translation theorem as a double sum (``form="double_sum"``), as the double
  sum with explicit double factorials (``form="double_factorial"``), or as
  the collapsed single sum over l' with m' = sgn(l) l' (``form="single_sum"``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .model import AtomSpec, BeamConfig
from .specfun import double_factorial_reciprocal, spherical_harmonic

__all__ = [
    "FieldPoint",
    "c_coefficient",
    "regular_solid_harmonic",
    "solid_harmonic_table",
    "translation_terms",
    "translate_solid_harmonic",
    "form10_coefficient",
    "field_raw",
    "field_solid_form",
    "field_translated",
    "FORMS",
    "displaced_point",
]

HALF_PI = 0.5 * math.pi
FORMS = ("double_sum", "double_factorial", "single_sum")


@dataclass(frozen=True)
class FieldPoint:
    """Position (units of w0) and time phase omega*t."""

    position: tuple[float, float, float]
    omega_t: float = 0.0

    def __post_init__(self):
        pos = tuple(float(c) for c in self.position)
        if len(pos) != 3 or not all(math.isfinite(c) for c in pos):
            raise DomainError("position must be a finite 3-vector")
        object.__setattr__(self, "position", pos)


def c_coefficient(l: int, m: int) -> float:
    """C_l^m = [4pi / (2l+1) / (l-m)! / (l+m)!]^(1/2)."""
    if l < 0 or abs(m) > l:
        raise DomainError(f"invalid solid harmonic indices (l={l}, m={m})")
    return math.sqrt(4 * math.pi / (2 * l + 1) / math.factorial(l - m) / math.factorial(l + m))


def regular_solid_harmonic(l: int, m: int, v) -> complex:
    """R_l^m(v) = C_l^m |v|^l Y_l^m(theta, phi) of the 3-vector ``v``."""
    c = c_coefficient(l, m)
    x, y, z = (float(t) for t in v)
    r = math.hypot(x, y, z)
    if r == 0.0:
        return 1.0 + 0j if l == 0 else 0j
    theta = math.atan2(math.hypot(x, y), z)
    phi = math.atan2(y, x)
    return c * r**l * spherical_harmonic(l, m, theta, phi)


def solid_harmonic_table(l_max: int, v) -> np.ndarray:
    """All R_l^m(v) for l <= l_max; entry [l, m + l_max].

    Uses R_l^m = r^l P_l^m(cos theta) e^(im phi) / (l+m)! and the Cartesian
    recurrences, so no trigonometry is involved. Out-of-range slots are 0.
    """
    if l_max < 0:
        raise DomainError("l_max must be non-negative")
    x, y, z = (float(t) for t in v)
    r2 = x * x + y * y + z * z
    xy = complex(x, y)
    off = l_max
    out = np.zeros((l_max + 1, 2 * l_max + 1), dtype=complex)
    out[0, off] = 1.0
    for m in range(l_max + 1):
        if m > 0:
            out[m, off + m] = -xy * out[m - 1, off + m - 1] / (2 * m)
        if m + 1 <= l_max:
            out[m + 1, off + m] = z * out[m, off + m]
        for l in range(m + 1, l_max):
            out[l + 1, off + m] = ((2 * l + 1) * z * out[l, off + m] - r2 * out[l - 1, off + m]) / ((l + 1) ** 2 - m * m)
    for m in range(1, l_max + 1):
        out[m:, off - m] = (-1) ** m * np.conj(out[m:, off + m])
    return out


def translation_terms(l: int, m: int, x, y, sign: int = 1) -> list[complex]:
    """Individual terms sign^(l-l') R_{l'}^{m'}(x) R_{l-l'}^{m-m'}(y) of the translation sum."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if l < 0 or abs(m) > l:
        raise DomainError(f"invalid solid harmonic indices (l={l}, m={m})")
    tx, ty = solid_harmonic_table(l, x), solid_harmonic_table(l, y)
    terms = []
    for lp in range(l + 1):
        weight = sign ** (l - lp)
        for mp in range(max(-lp, m - (l - lp)), min(lp, m + (l - lp)) + 1):
            terms.append(weight * tx[lp, l + mp] * ty[l - lp, l + m - mp])
    return terms


def translate_solid_harmonic(l: int, m: int, x, y, sign: int = 1) -> complex:
    """R_l^m(x + sign*y) through the translation theorem.

    Sums R_{l'}^{m'}(x) R_{l-l'}^{m-m'}(y) over l' <= l, |m'| <= l' with
    weight sign^(l-l'); terms whose second index pair is out of range vanish.
    The sum cancels heavily when |x + sign*y| is small against |x| + |y|,
    so its accuracy is relative to the sum of the term magnitudes.
    """
    terms = translation_terms(l, m, x, y, sign)
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def form10_coefficient(l: int, lp: int, mp: int) -> Fraction:
    """Weight of the (l', m') term in the double-factorial form of the field.

    Product of the four reciprocal double factorials times the even-parity
    delta on l'+m'. Pruned terms come out exactly zero.
    """
    if (lp + mp) % 2:
        return Fraction(0)
    L = abs(l)
    d = abs(l - mp)
    return (
        double_factorial_reciprocal(lp - abs(mp))
        * double_factorial_reciprocal(lp + abs(mp))
        * double_factorial_reciprocal(L - lp - d)
        * double_factorial_reciprocal(L - lp + d)
    )


def field_raw(beam: BeamConfig, pt: FieldPoint) -> complex:
    x, y, z = pt.position
    L = beam.abs_l
    transverse = complex(x, beam.sign * y) ** L  # = r_perp^L exp(i l phi)
    return (
        beam.amplitude
        / math.sqrt(math.factorial(L))
        * transverse
        * np.exp(1j * (beam.k_w0 * z - pt.omega_t))
    )


def _solid_prefactor(beam: BeamConfig) -> float:
    L, l = beam.abs_l, beam.winding
    return (-1) ** ((l + L) // 2) * 2**L * math.sqrt(math.factorial(L))


def field_solid_form(beam: BeamConfig, pt: FieldPoint) -> complex:
    x, y, z = pt.position
    L, l = beam.abs_l, beam.winding
    solid = regular_solid_harmonic(L, l, (x, y, 0.0))
    return beam.amplitude * _solid_prefactor(beam) * solid * np.exp(1j * (beam.k_w0 * z - pt.omega_t))


def _branch(branch: int, atom: AtomSpec) -> tuple[int, float]:
    if branch == 1:
        return 1, atom.mass_fraction_n
    if branch == 2:
        return -1, atom.mass_fraction_e
    raise DomainError(f"branch must be 1 or 2, got {branch}")


def displaced_point(R, r, lam: float, branch: int, atom: AtomSpec) -> np.ndarray:
    """R + lam m_n/m_t r (branch 1) or R - lam m_e/m_t r (branch 2)."""
    sign, mu = _branch(branch, atom)
    return np.asarray(R, dtype=float) + sign * lam * mu * np.asarray(r, dtype=float)


def field_translated(
    beam: BeamConfig,
    R,
    r,
    lam: float,
    branch: int = 1,
    form: str = "single_sum",
    atom: AtomSpec | None = None,
    omega_t: float = 0.0,
) -> complex:
    """Field at the displaced point, expanded into internal x CM factors."""
    if not 0.0 <= lam <= 1.0:
        raise DomainError("lambda must lie in [0, 1]")
    atom = atom or AtomSpec()
    sign, mu = _branch(branch, atom)
    R = np.asarray(R, dtype=float)
    r = np.asarray(r, dtype=float)
    L, l, s = beam.abs_l, beam.winding, beam.sign
    k = beam.k_w0

    plane = np.exp(1j * (k * (R[2] + sign * lam * mu * r[2]) - omega_t)) * beam.amplitude
    rho_int = lam * mu * math.hypot(r[0], r[1])
    phi_int = math.atan2(r[1], r[0])
    rho_cm = math.hypot(R[0], R[1])
    phi_cm = math.atan2(R[1], R[0])

    total = 0j
    if form == "double_sum":
        for lp in range(L + 1):
            for mp in range(-lp, lp + 1):
                if abs(l - mp) > L - lp:
                    continue
                total += (
                    sign**lp
                    * c_coefficient(lp, mp)
                    * c_coefficient(L - lp, l - mp)
                    * rho_int**lp
                    * rho_cm ** (L - lp)
                    * spherical_harmonic(lp, mp, HALF_PI, phi_int)
                    * spherical_harmonic(L - lp, l - mp, HALF_PI, phi_cm)
                )
        return _solid_prefactor(beam) * total * plane
    if form == "double_factorial":
        for lp in range(L + 1):
            for mp in range(-lp, lp + 1):
                w = form10_coefficient(l, lp, mp)
                if w == 0:
                    continue
                total += (
                    sign**lp
                    * float(w)
                    * rho_int**lp
                    * rho_cm ** (L - lp)
                    * np.exp(1j * (mp * phi_int + (l - mp) * phi_cm))
                )
        return 2**L * math.sqrt(math.factorial(L)) * total * plane
    if form == "single_sum":
        for lp in range(L + 1):
            w = double_factorial_reciprocal(2 * lp) * double_factorial_reciprocal(2 * (L - lp))
            total += (
                sign**lp
                * float(w)
                * rho_int**lp
                * rho_cm ** (L - lp)
                * np.exp(1j * s * (lp * phi_int + (L - lp) * phi_cm))
            )
        return 2**L * math.sqrt(math.factorial(L)) * total * plane
    raise DomainError(f"form must be one of {FORMS}, got {form!r}")
