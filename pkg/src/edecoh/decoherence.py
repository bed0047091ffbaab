"""Decoherence exponents and fringe contrast for electron interferometers.

Two exponents modify the fringe term of a two-path interference pattern by
a factor e^W with W = W_vacuum + W_photon: the vacuum term is the
fluctuation average of the relative phase along the two paths (finite only
for extended wavepackets, whence the shape constant kappa and size ell),
and the photon term accounts for which-path information carried away by
emitted radiation.  Two benchmark geometries are assembled here.

Parallel paths, separation r0, flight time T (rest frame):

    W_vacuum = (alpha/pi) [2 - kappa + 2 ln(T/ell)]
    W_photon = (alpha/pi) K(T, r0)   ~   -2 (alpha/pi) [1 + ln(T/r0)]

so for T >> r0 the total plateaus at (alpha/pi) [2 ln(r0/ell) - kappa],
independent of flight time.

Intersecting paths forming a V of half-opening angle theta, short arms L1
meeting at the vertex and long arms L2 at speed v:

    W_vacuum = -(alpha/2 pi) [2 J_aa + J_bb + 4 J_ab]
    W_photon = +(alpha/2 pi) [2 I_aa + I_bb + 4 I_ab]

With the asymptotic cross term the static sum telescopes to
(alpha/2 pi) [3 (2 - kappa) + 2 ln(L2/(ell v^3))], the radiation sum to
-(alpha/pi) [1 - ln 2 + ln(L2/(ell v sin(theta)))], and their total to

    W = (alpha/2 pi) [2 ln(2 sin(theta)/v^2) + 4 - 3 kappa]

in which both ell and L2 cancel identically; the closed branch realizes
that cancellation to rounding, while the assembled branch keeps the exact
cross term and the numeric radiation integrals for cross-checks.

Positive W (possible here: vacuum fluctuations can recohere an initially
fuzzy phase) is reported as-is, never clamped.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .kernels import (
    DegenerateInputError,
    RegimeWarning,
    SegmentPairInput,
    kernel_K_closed,
    segment_I_aa,
    segment_I_ab,
    segment_I_bb,
    segment_J_ab_closed,
    segment_J_straight,
)
from .quadrature import QuadratureConfig
from .wavepacket import KappaResult, Wavepacket, characteristic_length, kappa

__all__ = [
    "PhysicalConstants",
    "ParallelGeometry",
    "IntersectingGeometry",
    "DecoherenceResult",
    "ValidityInput",
    "RelativisticRegimeWarning",
    "w_vacuum_parallel",
    "w_photon_parallel",
    "w_total_parallel",
    "w_vacuum_intersecting",
    "w_photon_intersecting",
    "w_total_intersecting",
    "interference_pattern",
    "max_flight_distance",
    "check_regime",
]

# hbar*c in eV*m, used to convert the spreading bound to meters
_HBAR_C_EV_M = 1.973269804e-7


class RelativisticRegimeWarning(RegimeWarning):
    """Kinetic energy is no longer small against the rest mass."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Couplings entering the exponents; alpha_fs is the only one."""

    alpha_fs: float = 7.2973525693e-3

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha_fs < 1.0:
            raise ValueError("alpha_fs must lie in (0, 1)")


@dataclass(frozen=True)
class ParallelGeometry:
    """Two parallel paths: separation r0, rest-frame flight time T."""

    r0: float
    T: float
    v: float

    def __post_init__(self) -> None:
        if not self.r0 > 0.0:
            raise ValueError("r0 must be positive")
        if not self.T > 0.0:
            raise ValueError("T must be positive")
        if not 0.0 < self.v < 1.0:
            raise ValueError("speed v must lie in (0, 1)")


@dataclass(frozen=True)
class IntersectingGeometry:
    """V-shaped paths: arms L1 before the vertex, L2 after, half-angle theta."""

    L1: float
    L2: float
    theta: float
    v: float

    def __post_init__(self) -> None:
        if not self.L1 > 0.0:
            raise ValueError("L1 must be positive")
        if not self.L2 > self.L1:
            raise ValueError("L2 must exceed L1")
        if not 0.0 < self.theta < 0.5 * math.pi:
            raise ValueError("theta must lie in (0, pi/2)")
        if not 0.0 < self.v < 1.0:
            raise ValueError("speed v must lie in (0, 1)")


@dataclass(frozen=True)
class DecoherenceResult:
    w_vacuum: float
    w_photon: float
    w_total: float
    contrast: float
    breakdown: dict[str, float] = field(default_factory=dict)
    regime_warnings: list[str] = field(default_factory=list)


def _result(wv: float, wg: float, breakdown: dict[str, float], notes: list[str]) -> DecoherenceResult:
    total = wv + wg
    return DecoherenceResult(wv, wg, total, math.exp(total), breakdown, notes)


@dataclass(frozen=True)
class ValidityInput:
    """Kinetic energy (eV) and initial wavepacket size (meters)."""

    energy: float
    dx0: float
    electron_mass: float = 510998.95

    def __post_init__(self) -> None:
        if not self.energy > 0.0:
            raise ValueError("energy must be positive")
        if not self.dx0 > 0.0:
            raise ValueError("dx0 must be positive")
        if not self.electron_mass > 0.0:
            raise ValueError("electron_mass must be positive")


def w_vacuum_parallel(
    geom: ParallelGeometry,
    kap: KappaResult,
    constants: PhysicalConstants = PhysicalConstants(),
) -> float:
    """Vacuum exponent of the parallel geometry (rest-frame flight time)."""
    if geom.T < 10.0 * kap.ell:
        warnings.warn(
            "flight time T is within a factor 10 of the wavepacket size",
            RegimeWarning,
            stacklevel=2,
        )
    a = constants.alpha_fs / math.pi
    return a * (2.0 - kap.kappa + 2.0 * math.log(geom.T / kap.ell))


def w_photon_parallel(
    geom: ParallelGeometry,
    mode: str = "exact-kernel",
    constants: PhysicalConstants = PhysicalConstants(),
) -> float:
    """Photon exponent of the parallel geometry.

    exact-kernel keeps the full coincident kernel K(T, r0) and so is valid
    at any T/r0 away from T = r0; asymptotic keeps only the long-time form
    -2 [1 + ln(T/r0)], good to 1% for T/r0 of a few tens.
    """
    a = constants.alpha_fs / math.pi
    if mode == "exact-kernel":
        return a * kernel_K_closed(geom.T, geom.r0)
    if mode == "asymptotic":
        return -2.0 * a * (1.0 + math.log(geom.T / geom.r0))
    raise ValueError(f"unknown mode: {mode!r}")


def w_total_parallel(
    geom: ParallelGeometry,
    wp: Wavepacket,
    cfg: QuadratureConfig | None = None,
    constants: PhysicalConstants = PhysicalConstants(),
) -> DecoherenceResult:
    """Total exponent and contrast for parallel paths, exact kernel branch.

    For T >> r0 >> ell the total approaches the flight-time-independent
    plateau (alpha/pi) [2 ln(r0/ell) - kappa].
    """
    notes = check_regime(geom, wp)
    kap = kappa(wp, cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        wv = w_vacuum_parallel(geom, kap, constants)
    K = kernel_K_closed(geom.T, geom.r0)
    wg = constants.alpha_fs / math.pi * K
    return _result(wv, wg, {"kappa": kap.kappa, "K": K}, notes)


def _pair_input(geom: IntersectingGeometry, ell: float) -> SegmentPairInput:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        return SegmentPairInput(L1=geom.L1, L2=geom.L2, ell=ell, v=geom.v, theta=geom.theta)


def w_vacuum_intersecting(
    geom: IntersectingGeometry,
    wp: Wavepacket,
    cfg: QuadratureConfig | None = None,
    *,
    j_ab: str = "exact",
    constants: PhysicalConstants = PhysicalConstants(),
) -> float:
    """Vacuum exponent of the V geometry, -(alpha/2 pi)[2 J_aa + J_bb + 4 J_ab].

    j_ab selects the cross-term branch ("exact" or "asymptotic"); with the
    asymptotic branch the sum collapses to
    (alpha/2 pi) [3 (2 - kappa) + 2 ln(L2/(ell v^3))], in which the short
    length L1 has cancelled.
    """
    if j_ab not in ("exact", "asymptotic"):
        raise ValueError(f"unknown j_ab branch: {j_ab!r}")
    kap = kappa(wp, cfg)
    inp = _pair_input(geom, kap.ell)
    J_aa = segment_J_straight(geom.L1, kap.ell, geom.v, kap.kappa)
    J_bb = segment_J_straight(geom.L2, kap.ell, geom.v, kap.kappa)
    J_ab = segment_J_ab_closed(inp, asymptotic=(j_ab == "asymptotic"))
    J = 2.0 * J_aa + J_bb + 4.0 * J_ab
    return -0.5 * constants.alpha_fs / math.pi * J


def w_photon_intersecting(
    geom: IntersectingGeometry,
    wp: Wavepacket,
    cfg: QuadratureConfig | None = None,
    constants: PhysicalConstants = PhysicalConstants(),
) -> float:
    """Photon exponent of the V geometry, (alpha/2 pi)[2 I_aa + I_bb + 4 I_ab].

    Uses the small-v closed kernels; the sum telescopes to
    -(alpha/pi) [1 - ln 2 + ln(L2/(ell v sin(theta)))].
    """
    ell = characteristic_length(wp)
    inp = _pair_input(geom, ell)
    I = 2.0 * segment_I_aa(inp) + segment_I_bb(inp) + 4.0 * segment_I_ab(inp)
    return 0.5 * constants.alpha_fs / math.pi * I


def w_total_intersecting(
    geom: IntersectingGeometry,
    wp: Wavepacket,
    cfg: QuadratureConfig | None = None,
    *,
    branch: str = "closed",
    constants: PhysicalConstants = PhysicalConstants(),
) -> DecoherenceResult:
    """Total exponent and contrast for the V geometry.

    closed: asymptotic cross term and closed radiation kernels, realizing
    the exact cancellation of ell and L2; the total equals
    (alpha/2 pi) [2 ln(2 sin(theta)/v^2) + 4 - 3 kappa] to rounding.
    assembled: exact cross term and principal-value radiation integrals
    (the bb piece keeps the full coincident kernel); slower, carries the
    quadrature error budget, and retains the O(ell/L1, L1/L2) remainders
    that the closed branch drops.
    """
    if branch not in ("closed", "assembled"):
        raise ValueError(f"unknown branch: {branch!r}")
    notes = check_regime(geom, wp)
    kap = kappa(wp, cfg)
    inp = _pair_input(geom, kap.ell)
    J_aa = segment_J_straight(geom.L1, kap.ell, geom.v, kap.kappa)
    J_bb = segment_J_straight(geom.L2, kap.ell, geom.v, kap.kappa)
    if branch == "closed":
        J_ab = segment_J_ab_closed(inp, asymptotic=True)
        I_aa = segment_I_aa(inp)
        I_ab = segment_I_ab(inp)
        I_bb = segment_I_bb(inp)
    else:
        J_ab = segment_J_ab_closed(inp)
        I_aa = segment_I_aa(inp, cfg, method="numeric")
        I_ab = segment_I_ab(inp, cfg, method="numeric")
        I_bb = kernel_K_closed(inp.T2, 2.0 * geom.L1 * math.sin(geom.theta))
    J = 2.0 * J_aa + J_bb + 4.0 * J_ab
    I = 2.0 * I_aa + I_bb + 4.0 * I_ab
    half_a = 0.5 * constants.alpha_fs / math.pi
    breakdown = {
        "kappa": kap.kappa,
        "J_aa": J_aa,
        "J_bb": J_bb,
        "J_ab": J_ab,
        "I_aa": I_aa,
        "I_bb": I_bb,
        "I_ab": I_ab,
    }
    return _result(-half_a * J, half_a * I, breakdown, notes)


def interference_pattern(
    psi1_sq: float, psi2_sq: float, phase: float, result: DecoherenceResult
) -> float:
    """Number density of the two-path pattern with the contrast factor applied.

    n = |psi1|^2 + |psi2|^2 + 2 e^W sqrt(|psi1|^2 |psi2|^2) cos(phase).
    Never negative when w_total <= 0; a positive w_total can in principle
    overshoot, which is reported as-is.
    """
    if psi1_sq < 0.0 or psi2_sq < 0.0:
        raise ValueError("intensities must be nonnegative")
    cross = 2.0 * result.contrast * math.sqrt(psi1_sq * psi2_sq)
    return psi1_sq + psi2_sq + cross * math.cos(phase)


def max_flight_distance(inp: ValidityInput) -> float:
    """Spreading bound on the flight distance, in meters.

    A minimum-uncertainty packet of initial size dx0 disperses negligibly
    only while the flight distance stays well below
    2 sqrt(2 m E) dx0^2 (converted via hbar c).  Nonrelativistic; warns
    once kinetic energy passes 5% of the rest mass.
    """
    if inp.energy > 0.05 * inp.electron_mass:
        warnings.warn(
            "kinetic energy above 5% of the rest mass; the nonrelativistic "
            "spreading bound is unreliable",
            RelativisticRegimeWarning,
            stacklevel=2,
        )
    p = math.sqrt(2.0 * inp.electron_mass * inp.energy)
    return 2.0 * p * inp.dx0 * inp.dx0 / _HBAR_C_EV_M


def check_regime(
    geom: ParallelGeometry | IntersectingGeometry,
    wp: Wavepacket,
    validity: ValidityInput | None = None,
    unit_m: float = 1e-6,
) -> list[str]:
    """Separation-of-scales audit; returns human-readable violation notes.

    Geometry lengths are interpreted in multiples of unit_m (micrometers by
    default) only when a spreading-bound comparison is requested via
    `validity`; the scale-ratio checks themselves are unit-free.
    """
    ell = characteristic_length(wp)
    notes: list[str] = []
    if isinstance(geom, ParallelGeometry):
        if geom.r0 < 10.0 * ell:
            notes.append("separation r0 is within a factor 10 of the wavepacket size")
        if geom.T < 10.0 * geom.r0:
            notes.append("flight time T is within a factor 10 of the separation r0")
        if geom.T < 10.0 * ell:
            notes.append("flight time T is within a factor 10 of the wavepacket size")
        flight = geom.v * geom.T
    elif isinstance(geom, IntersectingGeometry):
        if geom.L1 < 10.0 * ell:
            notes.append("L1 is within a factor 10 of the wavepacket size")
        if geom.L2 < 10.0 * geom.L1:
            notes.append("L2 is within a factor 10 of L1")
        if geom.v * math.sin(geom.theta) > 0.2:
            notes.append("v sin(theta) exceeds 0.2; small-speed kernels lose accuracy")
        flight = geom.L1 + geom.L2
    else:
        raise TypeError(f"unsupported geometry type: {type(geom).__name__}")
    if geom.v > 0.3:
        notes.append("speed v exceeds 0.3; treatment is nonrelativistic")
    if validity is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RelativisticRegimeWarning)
            bound = max_flight_distance(validity)
        if validity.energy > 0.05 * validity.electron_mass:
            notes.append("kinetic energy above 5% of the rest mass")
        if flight * unit_m > 0.1 * bound:
            notes.append(
                f"flight distance {flight * unit_m:.3g} m exceeds 10% of the "
                f"spreading bound {bound:.3g} m"
            )
    return notes
