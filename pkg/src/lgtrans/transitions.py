"""Channels, selection rules, radial factors, matrix elements and CM
transition probabilities.

Amplitudes are in reduced units: the dimensional prefactor
2 pi^2 e w0 / sqrt(3) is replaced by ``REDUCED_PREFACTOR * atom.charge``
(lengths in units of w0). Reported probabilities are therefore only
meaningful as ratios.

A channel (p, l', sigma, branch) is one term of the interaction sums:
p is the plane-wave expansion order, l' the share of the beam OAM taken by
the internal motion, sigma the polarization component and branch selects
the nuclear (1) or electronic (2) displacement term.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from scipy import integrate

from .angular import AngularBraKet, multi_harmonic_integral, parity_allowed
from .errors import DomainError, NumericError
from .model import AtomSpec, BeamConfig, CMState, ElectronicState
from .specfun import (
    factorial,
    gamma_half,
    hyp1f2,
    hyp3f2_terminating_exact,
    pochhammer,
    spherical_harmonic,
)

__all__ = [
    "REDUCED_PREFACTOR",
    "TransitionChannel",
    "SelectionRuleRow",
    "TransitionResult",
    "ConservationReport",
    "enumerate_channels",
    "selection_table",
    "cm_radial_element",
    "cm_radial_closed_form",
    "electronic_radial_element",
    "channel_coefficient",
    "channel_density",
    "matrix_element",
    "cm_amplitude",
    "cm_probability",
    "conservation_check",
    "cm_spectrum",
    "scan",
]

REDUCED_PREFACTOR = 1.0
# 2 pi^2 / sqrt(3): converts reduced amplitudes back to e * w0 units
DIMENSIONAL_PREFACTOR = 2 * math.pi**2 / math.sqrt(3)

_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


@dataclass(frozen=True)
class TransitionChannel:
    p: int
    l_prime: int
    sigma: int
    branch: int = 1

    def __post_init__(self):
        if self.p < 0 or self.l_prime < 0:
            raise DomainError("p and l_prime must be non-negative")
        if self.sigma not in (-1, 0, 1):
            raise DomainError("sigma must be -1, 0 or +1")
        if self.branch not in (1, 2):
            raise DomainError("branch must be 1 or 2")

    @property
    def multipole(self) -> int:
        """1 for dipole, 2 for quadrupole, ..."""
        return self.l_prime + self.p + 1

    def sort_key(self) -> tuple[int, int, int, int, int]:
        return (self.multipole, self.l_prime, self.p, self.sigma, self.branch)


def enumerate_channels(l: int, max_multipole: int = 2) -> list[TransitionChannel]:
    if max_multipole < 1:
        raise DomainError("max_multipole must be >= 1")
    out = [
        TransitionChannel(p, lp, sigma, branch)
        for lp in range(min(abs(l), max_multipole - 1) + 1)
        for p in range(max_multipole - lp)
        for sigma in (-1, 0, 1)
        for branch in (1, 2)
    ]
    return sorted(out, key=TransitionChannel.sort_key)


# --------------------------------------------------------------------------
# Selection rules


@dataclass(frozen=True)
class SelectionRuleRow:
    p: int
    l_prime: int
    sign_l: int  # 0 when the row does not depend on sgn(l)
    delta_l: tuple[int, ...]
    delta_m: tuple[int, int, int]  # for sigma = -1, 0, +1
    delta_M: int
    delta_M_expr: str

    @property
    def label(self) -> str:
        if self.l_prime == 0:
            return "CM transition"
        kind = {1: "dipole", 2: "quadrupole", 3: "octupole"}.get(self.l_prime + self.p + 1, "multipole")
        return f"CM and electronic {kind}"


def _delta_M_expr(lp: int, s: int) -> str:
    if lp == 0:
        return "l"
    if s > 0:
        return f"l-{lp}"
    return f"-|l|+{lp}"


def selection_table(l: int, max_multipole: int = 2) -> list[SelectionRuleRow]:
    """Electronic (Delta l, Delta m) and CM (Delta M) rules per (p, l') row."""
    s = (l > 0) - (l < 0)
    L = abs(l)
    rows = []
    seen = set()
    for ch in enumerate_channels(l, max_multipole):
        key = (ch.p, ch.l_prime)
        if key in seen:
            continue
        seen.add(key)
        n = ch.multipole
        rows.append(
            SelectionRuleRow(
                p=ch.p,
                l_prime=ch.l_prime,
                sign_l=s if ch.l_prime else 0,
                delta_l=tuple(d for d in range(-n, n + 1) if (d - n) % 2 == 0),
                delta_m=tuple(sigma + s * ch.l_prime for sigma in (-1, 0, 1)),
                delta_M=s * (L - ch.l_prime),
                delta_M_expr=_delta_M_expr(ch.l_prime, s),
            )
        )
    return rows


# --------------------------------------------------------------------------
# CM radial integral


def _radial_parameters(cm_i: CMState, cm_f: CMState, exponent: int):
    if exponent < 0:
        raise DomainError("exponent must be non-negative")
    if abs(cm_f.M - cm_i.M) != exponent:
        raise DomainError(
            f"|M_f - M_i| must equal the exponent (M_i={cm_i.M}, M_f={cm_f.M}, exponent={exponent})"
        )
    if cm_i.w_R != cm_f.w_R:
        raise DomainError("initial and final CM states must share w_R")
    al, be = abs(cm_i.M), abs(cm_f.M)
    twice_s = al + be + exponent
    if twice_s % 2:
        raise DomainError("|M_i| + |M_f| + exponent must be even")
    return al, be, cm_i.n_minus, cm_f.n_minus, twice_s // 2


def cm_radial_closed_form(cm_i: CMState, cm_f: CMState, exponent: int) -> tuple[float, bool]:
    """<G_f | (R_perp/w_R)^exponent | G_i> from the terminating-3F2 closed form.

    Returns ``(value, regularized)``. Some parameter combinations make a
    denominator Pochhammer of the 3F2 vanish inside the sum while the
    prefactor (|M_f|-s)_{n_f} vanishes too; those removable singularities are
    resolved by cancelling the two Pochhammers against each other, and the
    flag reports that this path was taken.
    """
    al, be, m, n, s = _radial_parameters(cm_i, cm_f, exponent)
    c = s - be
    norm_sq = factorial(m) * factorial(n) * factorial(cm_i.n_plus) * factorial(cm_f.n_plus)
    try:
        f32 = hyp3f2_terminating_exact(-m, s + 1, c + 1, al + 1, c - n + 1)
        exact = pochhammer(al + 1, m) * pochhammer(-c, n) * factorial(s) * f32
        regularized = False
    except DomainError:
        exact = pochhammer(al + 1, m) * factorial(s) * _regularized_sum(al, m, n, s, c)
        regularized = True
    return float(exact) / math.sqrt(norm_sq), regularized


def _regularized_sum(al: int, m: int, n: int, s: int, c: int) -> Fraction:
    # (-c)_n / (c-n+1)_k rewritten without the vanishing denominator
    total = Fraction(0)
    sgn = (-1) ** n
    for k in range(m + 1):
        if k <= n:
            paired = sgn * pochhammer(c + 1, k) * pochhammer(c - n + 1 + k, n - k)
        else:
            paired = sgn * pochhammer(c + 1 + k - n, n)
        total += pochhammer(-m, k) * pochhammer(s + 1, k) * paired / (pochhammer(al + 1, k) * factorial(k))
    return total


def cm_radial_element(cm_i: CMState, cm_f: CMState, exponent: int, k_wR: float) -> float:
    """<G_f | (k R_perp / 4)^exponent | G_i> with k_wR = k * w_R."""
    value, _ = cm_radial_closed_form(cm_i, cm_f, exponent)
    return (k_wR / 4.0) ** exponent * value


# --------------------------------------------------------------------------
# Electronic radial integral


def _branch_sign(branch: int) -> int:
    return 1 if branch == 1 else -1


def electronic_kernel(channel: TransitionChannel, u: float) -> float:
    """(+/- u)^(l'+p+1) 1F2((p+l'+1)/2; p+3/2, (p+l'+3)/2; -u^2), u = k r mu / 2."""
    p, lp = channel.p, channel.l_prime
    n = channel.multipole
    f12 = hyp1f2(Fraction(p + lp + 1, 2), Fraction(2 * p + 3, 2), Fraction(p + lp + 3, 2), -u * u)
    return (_branch_sign(channel.branch) * u) ** n * f12


def _radial_support(e_i: ElectronicState, e_f: ElectronicState, rel: float = 1e-40) -> float:
    """Radius beyond which |F_f F_i| r^2 stays below ``rel`` times its peak.

    The kernel grows at most polynomially, so the tail past this point is
    negligible and the 1F2 argument stays bounded.
    """
    grid = np.geomspace(1e-3, 1e5, 2000)
    try:
        prod = np.asarray(e_f.radial(grid) * e_i.radial(grid), dtype=float)
    except (TypeError, ValueError):
        prod = np.asarray([e_f.radial(r) * e_i.radial(r) for r in grid])
    dens = np.abs(prod) * grid**2
    peak = dens.max()
    if not peak > 0:
        raise NumericError("radial functions vanish on the sampling grid")
    above = np.nonzero(dens > rel * peak)[0]
    if above[-1] == len(grid) - 1:
        raise NumericError("radial functions do not decay within r = 1e5")
    return float(grid[above[-1] + 1])


def electronic_radial_element(
    e_i: ElectronicState,
    e_f: ElectronicState,
    channel: TransitionChannel,
    k_scale: float,
    atom: AtomSpec | None = None,
    rtol: float = 1e-11,
) -> float:
    """<F_f | (+/- k r mu/2)^(l'+p+1) 1F2(...) | F_i> by adaptive quadrature.

    ``k_scale`` is k*a, with the radial functions expressed in units of a.
    """
    if not k_scale > 0:
        raise DomainError("k_scale must be positive")
    atom = atom or AtomSpec()
    mu = atom.mass_fraction(channel.branch)
    half = 0.5 * k_scale * mu

    def integrand(r):
        return e_f.radial(r) * e_i.radial(r) * electronic_kernel(channel, half * r) * r * r

    r_max = _radial_support(e_i, e_f)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(integrand, 0.0, r_max, epsabs=0.0, epsrel=rtol, limit=400)
        except integrate.IntegrationWarning as exc:
            raise NumericError(
                f"electronic radial quadrature failed for {channel} "
                f"(n,l) {e_i.n, e_i.l} -> {e_f.n, e_f.l}: {exc}"
            ) from exc
    if err > 1e-9 * max(abs(value), 1e-300) and err > 1e-300:
        raise NumericError(f"electronic radial quadrature error estimate {err:g} exceeds tolerance (value {value:g})")
    return value


# --------------------------------------------------------------------------
# Matrix element


def channel_coefficient(beam: BeamConfig, channel: TransitionChannel, charge: float = 1.0) -> complex:
    """Numerical coefficient of one channel, excluding eps_sigma and all brackets."""
    L, s = beam.abs_l, beam.sign
    p, lp = channel.p, channel.l_prime
    if lp > L:
        return 0j
    phase = _I_POWERS[(p + lp * (1 + s)) % 4]
    mag = (
        (4.0 / beam.k_w0) ** (L + 1)
        * math.sqrt(factorial(L))
        * math.sqrt((2 * p + 1) / factorial(2 * lp + 1))
        / ((lp + p + 1) * gamma_half(2 * p + 3) * factorial(L - lp))
    )
    return _branch_sign(channel.branch) * REDUCED_PREFACTOR * charge * beam.amplitude * mag * phase


def channel_density(atom: AtomSpec, beam: BeamConfig, channel: TransitionChannel, R, r) -> complex:
    """One term of the interaction operator as a function of positions.

    R (CM) and r (internal) are 3-vectors in units of w0. Summed over p, l'
    and sigma it reproduces the displacement-integrated interaction of the
    given branch, up to DIMENSIONAL_PREFACTOR.
    """
    R = np.asarray(R, dtype=float)
    r = np.asarray(r, dtype=float)
    L, s = beam.abs_l, beam.sign
    p, lp, sigma = channel.p, channel.l_prime, channel.sigma
    if lp > L:
        return 0j
    k = beam.k_w0
    rr = float(np.linalg.norm(r))
    theta = math.atan2(math.hypot(r[0], r[1]), r[2])
    phi = math.atan2(r[1], r[0])
    R_perp = math.hypot(R[0], R[1])
    Phi = math.atan2(R[1], R[0])
    mu = atom.mass_fraction(channel.branch)
    u = 0.5 * k * rr * mu
    angular = (
        spherical_harmonic(lp, s * lp, theta, phi)
        * spherical_harmonic(1, sigma, theta, phi)
        * spherical_harmonic(p, 0, theta, phi)
    )
    return (
        channel_coefficient(beam, channel, atom.charge)
        * beam.eps_of(sigma)
        * np.exp(1j * k * R[2])
        * (k * R_perp / 4.0) ** (L - lp)
        * np.exp(1j * s * (L - lp) * Phi)
        * electronic_kernel(channel, u)
        * angular
    )


@dataclass(frozen=True)
class TransitionResult:
    amplitude: complex
    channel: TransitionChannel
    winding: int
    initial: tuple[int, int, int, int]  # (l_e, m_e, N, M)
    final: tuple[int, int, int, int]
    emission: bool = False
    axial_momentum: bool = True
    angular_momentum: bool = True
    parity: bool = True
    radial_regularized: bool = False
    factors: dict = field(default_factory=dict, compare=False)

    @property
    def probability(self) -> float:
        return abs(self.amplitude) ** 2

    def to_dict(self) -> dict:
        ch = self.channel
        return {
            "channel": {"p": ch.p, "l_prime": ch.l_prime, "sigma": ch.sigma, "branch": ch.branch},
            "amplitude": [self.amplitude.real, self.amplitude.imag],
            "probability": self.probability,
            "initial": dict(zip(("l", "m", "N", "M"), self.initial)),
            "final": dict(zip(("l", "m", "N", "M"), self.final)),
            "conserved": {
                "axial_momentum": self.axial_momentum,
                "angular_momentum": self.angular_momentum,
                "parity": self.parity,
            },
            "radial_regularized": self.radial_regularized,
        }


def _absorption(atom, beam, e_i, e_f, cm_i, cm_f, channel, k_scale) -> TransitionResult:
    L, s = beam.abs_l, beam.sign
    lp, p, sigma = channel.l_prime, channel.p, channel.sigma
    dM = cm_f.M - cm_i.M
    dm = e_f.m - e_i.m
    axial = math.isclose(cm_f.K, cm_i.K + beam.k_w0, rel_tol=1e-12, abs_tol=1e-12)
    ang_ok = dm + dM == beam.winding + sigma
    par_ok = parity_allowed(e_f.l, e_i.l, lp, p)
    common = dict(
        channel=channel,
        winding=beam.winding,
        initial=(e_i.l, e_i.m, cm_i.N, cm_i.M),
        final=(e_f.l, e_f.m, cm_f.N, cm_f.M),
        axial_momentum=axial,
        angular_momentum=ang_ok,
        parity=par_ok,
    )
    if lp > L or not axial or dM != s * (L - lp):
        return TransitionResult(0j, **common)
    eps = beam.eps_of(sigma)
    ang = multi_harmonic_integral(
        AngularBraKet((e_f.l, e_f.m), ((lp, s * lp), (1, sigma), (p, 0)), (e_i.l, e_i.m))
    )
    if eps == 0 or ang == 0.0:
        return TransitionResult(0j, **common, factors={"angular": ang})
    cm_val, regularized = cm_radial_closed_form(cm_i, cm_f, L - lp)
    cm_val *= (beam.k_w0 * cm_i.w_R / 4.0) ** (L - lp)
    el_val = electronic_radial_element(e_i, e_f, channel, k_scale, atom)
    coeff = channel_coefficient(beam, channel, atom.charge)
    amp = coeff * eps * cm_val * el_val * ang
    factors = {"coefficient": coeff, "eps": eps, "cm_radial": cm_val, "electronic_radial": el_val, "angular": ang}
    return TransitionResult(complex(amp), radial_regularized=regularized, factors=factors, **common)


def matrix_element(
    atom: AtomSpec,
    beam: BeamConfig,
    e_i: ElectronicState,
    e_f: ElectronicState,
    cm_i: CMState,
    cm_f: CMState,
    channel: TransitionChannel,
    k_scale: float = 1e-3,
    emission: bool = False,
) -> TransitionResult:
    """<f| H_int^(branch) |i> for one channel.

    Absorption requires K_f = K_i + k; otherwise the axial delta function
    vanishes and the amplitude is exactly zero. Emission uses the hermitian
    conjugate term: <f|H^dagger|i> = conj(<i|H|f>).
    """
    if not emission:
        return _absorption(atom, beam, e_i, e_f, cm_i, cm_f, channel, k_scale)
    res = _absorption(atom, beam, e_f, e_i, cm_f, cm_i, channel, k_scale)
    return replace(
        res,
        amplitude=res.amplitude.conjugate(),
        initial=res.final,
        final=res.initial,
        emission=True,
    )


# --------------------------------------------------------------------------
# CM-only probability


def cm_amplitude(beam: BeamConfig, cm_i: CMState, n_f: int, l_prime: int, w_ratio: float) -> complex:
    """Amplitude whose modulus squared is the CM transition probability."""
    if not w_ratio > 0:
        raise DomainError("w_ratio must be positive")
    L, s = beam.abs_l, beam.sign
    if l_prime < 0 or l_prime > L:
        return 0j
    M_f = cm_i.M + s * (L - l_prime)
    if n_f < 0 or abs(M_f) > n_f or (n_f - M_f) % 2:
        return 0j
    ci = replace(cm_i, w_R=w_ratio)
    cf = CMState(n_f, M_f, ci.K + beam.k_w0, w_ratio)
    phase = _I_POWERS[(l_prime * (1 + s)) % 4]
    coeff = (
        phase
        / ((1 + l_prime) * factorial(L - l_prime))
        * (4.0 / beam.k_w0) ** (L + 1)
        * math.sqrt(factorial(L) / factorial(2 * l_prime + 1))
    )
    return coeff * cm_radial_element(ci, cf, L - l_prime, beam.k_w0 * w_ratio)


def cm_probability(beam: BeamConfig, cm_i: CMState, n_f: int, order: int, w_ratio: float) -> float:
    """CM transition probability for the dipole (order 1, l'=0) or the
    quadrupole (order 2, l'=1) electronic channel; zero if the final state
    (n_f, M_i + sgn(l)(|l|-l')) does not exist."""
    if order not in (1, 2):
        raise DomainError("order must be 1 (dipole) or 2 (quadrupole)")
    return abs(cm_amplitude(beam, cm_i, n_f, order - 1, w_ratio)) ** 2


# --------------------------------------------------------------------------
# Conservation checks


@dataclass
class ConservationReport:
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"checked": self.checked, "ok": self.ok, "violations": list(self.violations)}


def conservation_check(results) -> ConservationReport:
    """Re-check the conservation laws on every nonzero amplitude.

    Total z angular momentum: Delta m + Delta M = l + sigma (negated for
    emission). |Delta M| <= |l| and the OAM given to the internal motion
    |Delta m - sigma| <= |l|. Parity: l_f + l_i + l' + p + 1 even. Dipole
    channels (l' = 0) leave Delta m = sigma.
    """
    report = ConservationReport()
    for res in results:
        if res.amplitude == 0:
            continue
        report.checked += 1
        ch = res.channel
        d = -1 if res.emission else 1
        l_i, m_i, _, M_i = res.initial
        l_f, m_f, _, M_f = res.final
        dm, dM = d * (m_f - m_i), d * (M_f - M_i)
        tag = f"{ch} {res.initial}->{res.final}"
        if dm + dM != res.winding + ch.sigma:
            report.violations.append(f"{tag}: dm + dM = {dm + dM} != l + sigma = {res.winding + ch.sigma}")
        if abs(dM) > abs(res.winding):
            report.violations.append(f"{tag}: |dM| = {abs(dM)} exceeds |l| = {abs(res.winding)}")
        if abs(dm - ch.sigma) > abs(res.winding):
            report.violations.append(f"{tag}: internal OAM transfer {dm - ch.sigma} exceeds |l|")
        if ch.l_prime == 0 and dm != ch.sigma:
            report.violations.append(f"{tag}: dipole-type channel changed m by {dm} != sigma")
        if not parity_allowed(l_f, l_i, ch.l_prime, ch.p):
            report.violations.append(f"{tag}: parity l_f + l_i + l' + p + 1 is odd")
    return report


# --------------------------------------------------------------------------
# Tabulations behind the CLI


@dataclass(frozen=True)
class SpectrumRow:
    N_f: int
    M_f: int
    l_prime: int
    P_cm: float


def cm_spectrum(
    beam: BeamConfig, cm_i: CMState, w_ratio: float, nf_max: int, max_multipole: int = 2
) -> list[SpectrumRow]:
    """P_CM for every existing final state N_f <= nf_max and every l'."""
    rows = []
    L, s = beam.abs_l, beam.sign
    for n_f in range(nf_max + 1):
        for lp in range(min(L, max_multipole - 1) + 1):
            M_f = cm_i.M + s * (L - lp)
            if abs(M_f) > n_f or (n_f - M_f) % 2:
                continue
            amp = cm_amplitude(beam, cm_i, n_f, lp, w_ratio)
            rows.append(SpectrumRow(n_f, M_f, lp, abs(amp) ** 2))
    return rows


@dataclass(frozen=True)
class ScanRow:
    l: int
    w_ratio: float
    l_prime: int
    P_cm: float


def _scan_point(args):
    l, w, lp, n_i, m_i, n_f, k_w0 = args
    beam = BeamConfig(l, k_w0=k_w0)
    amp = cm_amplitude(beam, CMState(n_i, m_i, w_R=w), n_f, lp, w)
    return ScanRow(l, w, lp, abs(amp) ** 2)


def scan(
    n_i: int,
    m_i: int,
    n_f: int,
    windings,
    w_ratios,
    k_w0: float = 40.0,
    max_multipole: int = 2,
    workers: int = 1,
) -> list[ScanRow]:
    """P_CM over a (winding, w_R/w0) grid; rows ordered by l, then w, then l'.

    Grid points may be evaluated concurrently; the output order does not
    depend on ``workers``.
    """
    CMState(n_i, m_i)  # validate
    tasks = [
        (l, float(w), lp, n_i, m_i, n_f, k_w0)
        for l in sorted(windings)
        for w in sorted(w_ratios)
        for lp in range(min(abs(l), max_multipole - 1) + 1)
    ]
    if workers <= 1:
        return [_scan_point(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_scan_point, tasks))
