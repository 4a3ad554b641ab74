"""Forward impedance model of the lumped battery equivalent circuit.

The circuit is a series resistance R0, a Randles branch (C1 in parallel
with the series pair R1 + Warburg), and a second parallel RC branch
(R2 || C2). Impedances are plain Python complex numbers with the
mathematical sign convention: capacitive behavior gives a negative
imaginary part. The reactance X used by the extraction formulas is the
negated imaginary part.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

FEATURE_NAMES = ("R0", "R1", "R2", "Aw", "C1", "C2")


class Regime(enum.IntEnum):
    """Frequency regime of the reduced circuits, in descending frequency
    order HIGH > MID2 > MID1 > LOW."""

    LOW = 0
    MID1 = 1
    MID2 = 2
    HIGH = 3


def _check_positive(name: str, value: float) -> None:
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class EcmParams:
    """The six circuit parameters, which double as the regression feature
    vector in the order R0, R1, R2, Aw, C1, C2."""

    r0_ohm: float
    r1_ohm: float
    r2_ohm: float
    aw_ohm_sqrt_rad_s: float
    c1_f: float
    c2_f: float

    def __post_init__(self):
        for name in ("r0_ohm", "r1_ohm", "r2_ohm", "aw_ohm_sqrt_rad_s", "c1_f", "c2_f"):
            _check_positive(name, getattr(self, name))

    def as_features(self) -> tuple[float, float, float, float, float, float]:
        """Feature-vector ordering: R0, R1, R2, Aw, C1, C2."""
        return (
            self.r0_ohm,
            self.r1_ohm,
            self.r2_ohm,
            self.aw_ohm_sqrt_rad_s,
            self.c1_f,
            self.c2_f,
        )

    @classmethod
    def from_features(cls, feats) -> "EcmParams":
        r0, r1, r2, aw, c1, c2 = (float(v) for v in feats)
        return cls(r0, r1, r2, aw, c1, c2)


@dataclass(frozen=True)
class ImpedanceSample:
    """One impedance point at an angular frequency in rad/s."""

    omega_rad_s: float
    z: complex

    def __post_init__(self):
        if not (math.isfinite(self.omega_rad_s) and self.omega_rad_s > 0.0):
            raise ValueError(f"omega_rad_s must be positive, got {self.omega_rad_s!r}")
        if not (math.isfinite(self.z.real) and math.isfinite(self.z.imag)):
            raise ValueError(f"impedance components must be finite, got {self.z!r}")

    @property
    def reactance(self) -> float:
        """X = -Im(Z); positive for capacitive behavior."""
        return -self.z.imag


def warburg_impedance(aw: float, omega: float) -> complex:
    """Diffusion impedance Aw/sqrt(j*omega): magnitude Aw/sqrt(omega) at a
    constant -45 degree phase, so Re == -Im exactly."""
    _check_positive("aw", aw)
    _check_positive("omega", omega)
    m = aw / math.sqrt(2.0 * omega)
    return complex(m, -m)


def _parallel(a: complex, b: complex) -> complex:
    return a * b / (a + b)


def ecm_impedance(p: EcmParams, omega: float) -> complex:
    """Full-circuit impedance R0 + [(R1 + W) || C1] + [R2 || C2]."""
    _check_positive("omega", omega)
    w = warburg_impedance(p.aw_ohm_sqrt_rad_s, omega)
    zc1 = 1.0 / (1j * omega * p.c1_f)
    zc2 = 1.0 / (1j * omega * p.c2_f)
    return p.r0_ohm + _parallel(p.r1_ohm + w, zc1) + _parallel(p.r2_ohm, zc2)


def reduced_impedance(p: EcmParams, omega: float, regime: Regime) -> complex:
    """Asymptotic impedance of the regime's reduced circuit.

    HIGH: capacitors short, Warburg negligible -> R0 alone.
    LOW: capacitors open -> R0 + R1 + R2 + Warburg in series.
    MID1: Warburg negligible, C2 still open -> R0 + R2 + (R1 || C1).
    MID2: C1 branch shorted, Warburg negligible -> R0 + (R2 || C2).
    """
    _check_positive("omega", omega)
    if regime is Regime.HIGH:
        return complex(p.r0_ohm, 0.0)
    if regime is Regime.LOW:
        w = warburg_impedance(p.aw_ohm_sqrt_rad_s, omega)
        return p.r0_ohm + p.r1_ohm + p.r2_ohm + w
    if regime is Regime.MID1:
        zc1 = 1.0 / (1j * omega * p.c1_f)
        return p.r0_ohm + p.r2_ohm + _parallel(p.r1_ohm, zc1)
    if regime is Regime.MID2:
        zc2 = 1.0 / (1j * omega * p.c2_f)
        return p.r0_ohm + _parallel(p.r2_ohm, zc2)
    raise ValueError(f"unknown regime {regime!r}")


def soh_from_capacity(q_max_ah: float, q_rated_ah: float) -> float:
    """Capacity-based state of health; may exceed 1 for fresh cells."""
    _check_positive("q_max_ah", q_max_ah)
    _check_positive("q_rated_ah", q_rated_ah)
    return q_max_ah / q_rated_ah


def sweep(p: EcmParams, omegas) -> list[ImpedanceSample]:
    """Evaluate the full circuit at each frequency, preserving order."""
    out = []
    for i, omega in enumerate(omegas):
        try:
            out.append(ImpedanceSample(omega, ecm_impedance(p, omega)))
        except ValueError as exc:
            raise ValueError(f"omega[{i}]: {exc}") from exc
    return out
