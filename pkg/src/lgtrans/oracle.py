"""Brute-force verifiers, deliberately independent of the closed forms.

* exact CM radial integrals by expanding both Laguerre polynomials and
  integrating x^s e^-x term by term (pure rational arithmetic)
* sphere quadrature: Gauss-Legendre in cos(theta) times a uniform phi rule
* the lambda integral behind the 1F2 channel kernel, by adaptive quadrature
  of spherical Bessel functions from scipy
* 2D transverse quadrature of CM wavefunctions
* the displacement-integrated interaction evaluated straight from the field
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NumericError
from .harmonics import FieldPoint, displaced_point, field_raw
from .model import AtomSpec, BeamConfig, CMState, cm_wavefunction
from .specfun import assoc_laguerre

__all__ = [
    "QuadratureSpec",
    "ExactScalar",
    "exact_cm_radial",
    "sphere_quadrature",
    "lambda_channel_integral",
    "lambda_channel_closed_form",
    "transverse_overlap",
    "direct_interaction",
]


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: tuple[int, ...]
    bounds: tuple[tuple[float, float], ...] = ()
    scheme: str = "gauss-legendre"
    tol: float = 1e-10

    def __post_init__(self):
        if any(n < 2 for n in self.nodes):
            raise DomainError("need at least two nodes per axis")
        if not self.tol > 0:
            raise DomainError("tolerance must be positive")


SPHERE_DEFAULT = QuadratureSpec(nodes=(64, 128), bounds=((-1.0, 1.0), (0.0, 2 * math.pi)))


@dataclass(frozen=True)
class ExactScalar:
    """rational * sqrt(radicand), both exact."""

    rational: Fraction
    radicand: Fraction

    def __float__(self) -> float:
        return float(self.rational) * math.sqrt(self.radicand)

    @property
    def square(self) -> Fraction:
        return self.rational * self.rational * self.radicand


def exact_cm_radial(cm_i: CMState, cm_f: CMState, exponent: int) -> ExactScalar:
    """<G_f | (R_perp / w_R)^exponent | G_i> exactly.

    Multiply by (k w_R / 4)^exponent for the bracket with (k R_perp / 4).
    """
    al, be = abs(cm_i.M), abs(cm_f.M)
    if (al + be + exponent) % 2:
        raise AssertionError(
            f"|M_i| + |M_f| + exponent is odd ({al}, {be}, {exponent}); "
            "this indicates an upstream selection-rule bug"
        )
    s = (al + be + exponent) // 2
    li = assoc_laguerre(cm_i.n_minus, al).coeffs
    lf = assoc_laguerre(cm_f.n_minus, be).coeffs
    integral = Fraction(0)
    for a, ca in enumerate(li):
        for b, cb in enumerate(lf):
            integral += ca * cb * math.factorial(s + a + b)
    radicand = Fraction(
        math.factorial(cm_i.n_minus) * math.factorial(cm_f.n_minus),
        math.factorial(cm_i.n_plus) * math.factorial(cm_f.n_plus),
    )
    return ExactScalar(integral, radicand)


def sphere_quadrature(f: Callable, spec: QuadratureSpec = SPHERE_DEFAULT) -> complex:
    """Integrate f(theta, phi) over the unit sphere; f must accept arrays."""
    n_t, n_p = spec.nodes
    x, w = np.polynomial.legendre.leggauss(n_t)
    phi = np.arange(n_p) * (2 * math.pi / n_p)
    theta = np.arccos(x)
    T, P = np.meshgrid(theta, phi, indexing="ij")
    vals = np.asarray(f(T, P))
    return complex(np.sum(w[:, None] * vals) * (2 * math.pi / n_p))


def lambda_channel_integral(p: int, l_prime: int, a: float, rtol: float = 1e-13) -> float:
    """Integral over lambda in [0, 1] of lambda^l' j_p(a lambda)."""
    if a < 0:
        raise DomainError("a must be non-negative")
    val, err = integrate.quad(
        lambda t: t**l_prime * special.spherical_jn(p, a * t), 0.0, 1.0, epsabs=0.0, epsrel=rtol, limit=200
    )
    if err > 1e3 * rtol * max(abs(val), 1e-300):
        raise NumericError(f"lambda quadrature did not converge (p={p}, l'={l_prime}, a={a})")
    return val


def lambda_channel_closed_form(p: int, l_prime: int, a: float) -> float:
    """a^p / ((l'+p+1)(2p+1)!!) 1F2((p+l'+1)/2; p+3/2, (p+l'+3)/2; -(a/2)^2)."""
    from .specfun import double_factorial, hyp1f2

    f12 = hyp1f2(Fraction(p + l_prime + 1, 2), Fraction(2 * p + 3, 2), Fraction(p + l_prime + 3, 2), -(a / 2) ** 2)
    return a**p / ((l_prime + p + 1) * double_factorial(2 * p + 1)) * f12


def transverse_overlap(
    cm_f: CMState,
    cm_g: CMState,
    weight: Callable | None = None,
    azimuthal: int = 0,
    n_radial: int = 160,
    n_phi: int = 64,
) -> complex:
    """2 pi * integral of conj(Psi_f) weight(R_perp) exp(i azimuthal Phi) Psi_g
    over the transverse plane.

    The 2 pi absorbs the axial plane-wave normalisation, so identical states
    with unit weight give 1.
    """
    w_R = cm_f.w_R
    r_max = w_R * (math.sqrt(2.0 * max(cm_f.N, cm_g.N) + 2.0) + 12.0)
    x, wx = np.polynomial.legendre.leggauss(n_radial)
    R = 0.5 * r_max * (x + 1.0)
    wR = 0.5 * r_max * wx
    Phi = np.arange(n_phi) * (2 * math.pi / n_phi)
    RR, PP = np.meshgrid(R, Phi, indexing="ij")
    integrand = np.conj(cm_wavefunction(cm_f, RR, PP)) * cm_wavefunction(cm_g, RR, PP)
    if weight is not None:
        integrand = integrand * weight(RR)
    if azimuthal:
        integrand = integrand * np.exp(1j * azimuthal * PP)
    total = np.sum(wR[:, None] * RR * integrand) * (2 * math.pi / n_phi)
    return complex(2 * math.pi * total)


def direct_interaction(atom: AtomSpec, beam: BeamConfig, R, r, branch: int, rtol: float = 1e-12) -> complex:
    """charge * mu * (r . E0) * integral over lambda of the field at the displaced point.

    R and r in units of w0; the Cartesian E0 is rebuilt from eps_sigma.
    """
    mu = atom.mass_fraction(branch)
    e0 = beam.cartesian()
    r = np.asarray(r, dtype=float)
    dot = complex(np.dot(e0, r))

    def field_at(lam):
        return field_raw(beam, FieldPoint(tuple(displaced_point(R, r, lam, branch, atom))))

    re, _ = integrate.quad(lambda t: field_at(t).real, 0.0, 1.0, epsabs=0.0, epsrel=rtol, limit=200)
    im, _ = integrate.quad(lambda t: field_at(t).imag, 0.0, 1.0, epsabs=0.0, epsrel=rtol, limit=200)
    return atom.charge * mu * dot * complex(re, im)
