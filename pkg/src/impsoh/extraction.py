"""Closed-form extraction of the six circuit parameters from four
impedance points, plus frequency selection and fit-quality scoring.

With X denoting the negated imaginary part of each point:

    R0 = R_high
    Aw = X_low * sqrt(2 * w_low)
    C1 = X_mid1 / (w_mid1 * (R_mid1 - R0) * (R_low - R0 - X_low))
    R2 = (R_mid2 - R0) * (1 + (X_mid2 / (R_mid2 - R0))^2)
    C2 = X_mid2 / (w_mid2 * (R_mid2 - R0)^2 * (1 + (X_mid2/(R_mid2-R0))^2))
    R1 = R_low - R0 - X_low - R2

The C1 expression is intentionally not the exact algebraic inverse of
the mid1 reduced circuit; it carries a small approximation error that is
part of the method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ecm import EcmParams, ImpedanceSample, ecm_impedance
from .errors import ExtractionError, SelectionError


@dataclass(frozen=True)
class FourPointSet:
    """Four impedance points ordered high > mid2 > mid1 > low in frequency.

    The mid and low points must be capacitive (X >= 0); the high point sits
    near the real-axis crossing and may have X of either tiny sign.
    """

    high: ImpedanceSample
    mid2: ImpedanceSample
    mid1: ImpedanceSample
    low: ImpedanceSample

    def __post_init__(self):
        w = (
            self.high.omega_rad_s,
            self.mid2.omega_rad_s,
            self.mid1.omega_rad_s,
            self.low.omega_rad_s,
        )
        if not (w[0] > w[1] > w[2] > w[3]):
            raise ValueError(f"frequencies must satisfy high > mid2 > mid1 > low, got {w}")
        for name in ("mid2", "mid1", "low"):
            s: ImpedanceSample = getattr(self, name)
            if s.reactance < 0.0:
                raise ValueError(f"{name} point must be capacitive (X >= 0), got X={s.reactance}")


@dataclass(frozen=True)
class FitReport:
    """Relative model-vs-measurement error, in percent of mean |Z|."""

    rmse_pct: float
    max_err_pct: float
    n_points: int


def extract_params(fp: FourPointSet) -> EcmParams:
    """Invert the reduced circuits in closed form.

    Raises ExtractionError (naming the first offending parameter) when any
    denominator or resulting parameter is non-positive; never returns a
    partially valid set.
    """
    r_high = fp.high.z.real
    r_mid1, x_mid1 = fp.mid1.z.real, fp.mid1.reactance
    r_mid2, x_mid2 = fp.mid2.z.real, fp.mid2.reactance
    r_low, x_low = fp.low.z.real, fp.low.reactance

    r0 = r_high
    if r0 <= 0.0:
        raise ExtractionError("R0", f"high-frequency resistance {r0} is not positive")

    aw = x_low * math.sqrt(2.0 * fp.low.omega_rad_s)
    if aw <= 0.0:
        raise ExtractionError("Aw", f"low-frequency reactance {x_low} is not positive")

    dr_mid1 = r_mid1 - r0
    if dr_mid1 <= 0.0:
        raise ExtractionError("C1", f"R_mid1 - R0 = {dr_mid1} is not positive")
    series_r = r_low - r0 - x_low  # equals R1 + R2 on the low-frequency asymptote
    if series_r <= 0.0:
        raise ExtractionError("C1", f"R_low - R0 - X_low = {series_r} is not positive")
    c1 = x_mid1 / (fp.mid1.omega_rad_s * dr_mid1 * series_r)
    if c1 <= 0.0:
        raise ExtractionError("C1", f"computed C1 = {c1} is not positive")

    dr_mid2 = r_mid2 - r0
    if dr_mid2 <= 0.0:
        raise ExtractionError("R2", f"R_mid2 - R0 = {dr_mid2} is not positive")
    ratio_sq = (x_mid2 / dr_mid2) ** 2
    r2 = dr_mid2 * (1.0 + ratio_sq)
    c2 = x_mid2 / (fp.mid2.omega_rad_s * dr_mid2**2 * (1.0 + ratio_sq))
    if c2 <= 0.0:
        raise ExtractionError("C2", f"computed C2 = {c2} is not positive")

    r1 = series_r - r2
    if r1 <= 0.0:
        raise ExtractionError("R1", f"computed R1 = {r1} is not positive")

    try:
        return EcmParams(r0, r1, r2, aw, c1, c2)
    except ValueError as exc:
        raise ExtractionError("params", str(exc)) from exc


def select_four_frequencies(spectrum, targets=None) -> FourPointSet:
    """Pick four well-separated measured points from a spectrum.

    Defaults: the high point is the sample with minimal |Im| within the top
    decade (closest approach to the real axis); the remaining targets are
    0.063, 6.3, and 630 rad/s (0.01, 1, and 100 Hz), clipped into the
    spectrum's span and a decade under their upper neighbor. Explicit
    `targets` gives the four target angular frequencies (any order). The
    chosen points must be pairwise at least a decade apart.
    """
    samples = list(spectrum.samples)
    if len(samples) < 4:
        raise SelectionError(f"need at least 4 points, got {len(samples)}")
    w_min = samples[0].omega_rad_s
    w_max = samples[-1].omega_rad_s
    if w_max / w_min < 1e3:
        raise SelectionError(
            f"spectrum spans {math.log10(w_max / w_min):.2f} decades, need at least 3"
        )

    if targets is None:
        top = [s for s in samples if s.omega_rad_s >= w_max / 10.0 and s.reactance >= 0.0]
        if not top:
            raise SelectionError("no capacitive point near the high-frequency end")
        high = min(top, key=lambda s: abs(s.z.imag))
        w_high = high.omega_rad_s
        t_low = min(max(0.063, w_min), w_high / 1e3)
        t_mid1 = min(max(6.3, 10.0 * t_low), w_high / 1e2)
        t_mid2 = min(max(630.0, 10.0 * t_mid1), w_high / 10.0)
        targets = (w_high, t_mid2, t_mid1, t_low)

    targets = sorted((float(t) for t in targets), reverse=True)
    if len(targets) != 4:
        raise SelectionError(f"need exactly 4 target frequencies, got {len(targets)}")

    chosen: list[ImpedanceSample] = []
    for t in targets:
        pool = [s for s in samples if s not in chosen]
        chosen.append(min(pool, key=lambda s: abs(math.log(s.omega_rad_s / t))))
    chosen.sort(key=lambda s: s.omega_rad_s, reverse=True)

    for a, b in zip(chosen, chosen[1:]):
        if a.omega_rad_s / b.omega_rad_s < 10.0:
            raise SelectionError(
                f"selected frequencies {a.omega_rad_s:.3g} and {b.omega_rad_s:.3g} rad/s "
                "are less than a decade apart"
            )
    return FourPointSet(high=chosen[0], mid2=chosen[1], mid1=chosen[2], low=chosen[3])


def fit_rmse(p: EcmParams, spectrum) -> FitReport:
    """Score the model against a measured spectrum.

    rmse_pct = 100 * sqrt(mean |Z_model - Z_meas|^2) / mean |Z_meas|;
    max_err_pct is the worst per-point error relative to that point's |Z|.
    """
    samples = list(spectrum.samples)
    if not samples:
        raise ValueError("spectrum is empty")
    sq_sum = 0.0
    mag_sum = 0.0
    max_rel = 0.0
    for s in samples:
        zm = ecm_impedance(p, s.omega_rad_s)
        err = abs(zm - s.z)
        sq_sum += err * err
        mag_sum += abs(s.z)
        max_rel = max(max_rel, err / abs(s.z))
    n = len(samples)
    rmse = math.sqrt(sq_sum / n) / (mag_sum / n)
    return FitReport(rmse_pct=100.0 * rmse, max_err_pct=100.0 * max_rel, n_points=n)
