"""State and configuration types.

Lengths are measured in units of the beam waist w0, except the electronic
radial coordinate, which is measured in units of its own scale ``a`` (for
the hydrogenic default, the Bohr radius). The dimensionless knobs are then
k*w0, w_R/w0 and k*a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DomainError
from .specfun import assoc_laguerre

__all__ = [
    "HYDROGEN_ELECTRON_FRACTION",
    "CMState",
    "ElectronicState",
    "BeamConfig",
    "AtomSpec",
    "HydrogenicRadial",
    "cm_wavefunction",
    "cm_energy",
    "hydrogenic_radial",
]

HYDROGEN_ELECTRON_FRACTION = 1.0 / 1837.15


def _is_int(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


@dataclass(frozen=True)
class CMState:
    """Eigenstate of the 2D trap with a plane wave along the beam axis.

    ``N`` is the trap energy number, ``M`` the CM angular momentum, ``K``
    the axial wavenumber (1/w0) and ``w_R`` the trap spread (units of w0).
    """

    N: int
    M: int
    K: float = 0.0
    w_R: float = 1e-4

    def __post_init__(self):
        if not (_is_int(self.N) and _is_int(self.M)):
            raise DomainError("N and M must be integers")
        if self.N < 0:
            raise DomainError(f"N must be non-negative, got {self.N}")
        if abs(self.M) > self.N:
            raise DomainError(f"|M| must not exceed N (N={self.N}, M={self.M})")
        if (self.N - self.M) % 2:
            raise DomainError(f"N and M must share parity (N={self.N}, M={self.M})")
        if not self.w_R > 0:
            raise DomainError("w_R must be positive")

    @property
    def n_minus(self) -> int:
        return (self.N - abs(self.M)) // 2

    @property
    def n_plus(self) -> int:
        return (self.N + abs(self.M)) // 2

    @property
    def norm(self) -> float:
        return math.sqrt(2 * math.factorial(self.n_minus) / math.factorial(self.n_plus)) / self.w_R

    def radial(self, R_perp):
        """G_{N,M}(R_perp / w_R), normalised so that int G^2 R dR = 1."""
        x = np.asarray(R_perp, dtype=float) / self.w_R
        lag = assoc_laguerre(self.n_minus, abs(self.M))
        out = self.norm * x ** abs(self.M) * lag(x * x) * np.exp(-0.5 * x * x)
        return out if np.ndim(out) else float(out)


def cm_wavefunction(state: CMState, R_perp, Phi, R_z=0.0):
    """(1/2pi) G_{N,M}(R_perp/w_R) exp[i(K R_z + M Phi)]."""
    phase = np.exp(1j * (state.K * np.asarray(R_z) + state.M * np.asarray(Phi)))
    out = state.radial(R_perp) * phase / (2 * math.pi)
    return out if np.ndim(out) else complex(out)


def cm_energy(state: CMState) -> float:
    """Trap energy in units of hbar^2 / (w_R^2 m_t)."""
    return float(state.N + 1)


@dataclass(frozen=True)
class HydrogenicRadial:
    """Normalised hydrogen-like radial function R_{n,l}(r); Bohr radius = ``scale``."""

    n: int
    l: int
    scale: float = 1.0

    def __post_init__(self):
        if self.n < 1 or self.l < 0 or self.l >= self.n:
            raise DomainError(f"need 0 <= l < n, got n={self.n}, l={self.l}")
        if not self.scale > 0:
            raise DomainError("scale must be positive")

    def __call__(self, r):
        n, l, a = self.n, self.l, self.scale
        rho = 2.0 * np.asarray(r, dtype=float) / (n * a)
        norm = math.sqrt(
            (2.0 / (n * a)) ** 3 * math.factorial(n - l - 1) / (2 * n * math.factorial(n + l))
        )
        out = norm * np.exp(-0.5 * rho) * rho**l * assoc_laguerre(n - l - 1, 2 * l + 1)(rho)
        return out if np.ndim(out) else float(out)


def hydrogenic_radial(n: int, l: int, scale: float = 1.0) -> HydrogenicRadial:
    return HydrogenicRadial(n, l, scale)


def radial_norm(radial: Callable[[float], float]) -> float:
    val, _ = integrate.quad(lambda r: radial(r) ** 2 * r * r, 0, np.inf, epsabs=0, epsrel=1e-12, limit=200)
    return val


@dataclass(frozen=True)
class ElectronicState:
    """Internal state F_{n,l}(r) Y_l^m with a pluggable radial profile."""

    n: int
    l: int
    m: int
    radial: Callable[[float], float] = field(default=None, compare=False, repr=False)
    check_norm: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.n < 1 or self.l < 0 or self.l >= self.n:
            raise DomainError(f"need 0 <= l < n, got n={self.n}, l={self.l}")
        if abs(self.m) > self.l:
            raise DomainError(f"need |m| <= l, got l={self.l}, m={self.m}")
        if self.radial is None:
            object.__setattr__(self, "radial", HydrogenicRadial(self.n, self.l))
        if self.check_norm:
            norm = radial_norm(self.radial)
            if abs(norm - 1.0) > 1e-8:
                raise DomainError(f"radial profile is not normalised: int F^2 r^2 dr = {norm}")

    @classmethod
    def hydrogenic(cls, n: int, l: int, m: int, scale: float = 1.0) -> "ElectronicState":
        return cls(n, l, m, HydrogenicRadial(n, l, scale))


@dataclass(frozen=True)
class BeamConfig:
    """Near-axis LG beam without off-axis radial nodes.

    ``eps`` holds the spherical polarization amplitudes ordered
    (eps_-1, eps_0, eps_+1), defined through
    r . E0 = r sqrt(4pi/3) sum_sigma eps_sigma Y_1^sigma.
    """

    winding: int
    k_w0: float = 40.0
    eps: tuple[complex, complex, complex] = (0j, 0j, 1 + 0j)
    amplitude: float = 1.0

    def __post_init__(self):
        if not _is_int(self.winding):
            raise DomainError("winding number must be an integer")
        if not self.k_w0 > 0:
            raise DomainError("k_w0 must be positive")
        if not self.amplitude > 0:
            raise DomainError("amplitude must be positive")
        if len(self.eps) != 3:
            raise DomainError("eps needs three components (eps_-1, eps_0, eps_+1)")
        object.__setattr__(self, "eps", tuple(complex(e) for e in self.eps))

    @property
    def sign(self) -> int:
        return (self.winding > 0) - (self.winding < 0)

    @property
    def abs_l(self) -> int:
        return abs(self.winding)

    def eps_of(self, sigma: int) -> complex:
        return self.eps[sigma + 1]

    def normalized(self) -> "BeamConfig":
        total = math.sqrt(sum(abs(e) ** 2 for e in self.eps))
        if total == 0:
            raise DomainError("all polarization amplitudes are zero")
        return BeamConfig(self.winding, self.k_w0, tuple(e / total for e in self.eps), self.amplitude)

    @classmethod
    def from_cartesian(cls, winding: int, Ex: complex, Ey: complex, Ez: complex = 0.0, **kw) -> "BeamConfig":
        """Build eps_sigma so that the Y_1 expansion reproduces Ex x + Ey y + Ez z."""
        s2 = math.sqrt(2.0)
        eps = ((Ex + 1j * Ey) / s2, complex(Ez), -(Ex - 1j * Ey) / s2)
        return cls(winding, eps=eps, **kw)

    def cartesian(self) -> np.ndarray:
        """Polarization vector E0 (complex Cartesian components)."""
        em, e0, ep = self.eps
        s2 = math.sqrt(2.0)
        return np.array([(em - ep) / s2, -1j * (em + ep) / s2, e0])


@dataclass(frozen=True)
class AtomSpec:
    """Two spinless charges +e (mass m_n) and -e (mass m_e).

    The nuclear fraction is stored as ``1 - mass_fraction_e`` so the two
    fractions sum to one exactly.
    """

    mass_fraction_e: float = HYDROGEN_ELECTRON_FRACTION
    mass_fraction_n: float | None = None
    charge: float = 1.0

    def __post_init__(self):
        fe = float(self.mass_fraction_e)
        if not 0 < fe < 1:
            raise DomainError("mass_fraction_e must lie in (0, 1)")
        fn = self.mass_fraction_n
        if fn is not None:
            if not 0 < fn < 1:
                raise DomainError("mass_fraction_n must lie in (0, 1)")
            if abs(fe + fn - 1.0) > 1e-12:
                raise DomainError(f"mass fractions must sum to 1, got {fe} + {fn} = {fe + fn}")
        object.__setattr__(self, "mass_fraction_e", fe)
        object.__setattr__(self, "mass_fraction_n", 1.0 - fe)

    def mass_fraction(self, branch: int) -> float:
        """m_n/m_t for branch 1 (nuclear displacement), m_e/m_t for branch 2."""
        if branch == 1:
            return self.mass_fraction_n
        if branch == 2:
            return self.mass_fraction_e
        raise DomainError(f"branch must be 1 or 2, got {branch}")
