"""Synthetic aging-data generator.

Anchored on measured parameter sets at three SoH levels (94.6%, 85.6%,
76.8%); parameters between anchors follow log-linear interpolation with
optional lognormal noise. Everything is deterministic in the seed.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, replace

import numpy as np

from .dataset import FeatureTable, Spectrum
from .ecm import EcmParams, sweep
from .errors import RangeError
from .regression import FeatureRow

# Measured ECM parameter sets at SoC 35% used as default anchors,
# strictly decreasing SoH.
TABLE_ANCHORS = (
    (0.946, EcmParams(r0_ohm=14.7e-3, r1_ohm=1.9e-3, r2_ohm=2.1e-3,
                      aw_ohm_sqrt_rad_s=2.5e-3, c1_f=1.2, c2_f=0.24)),
    (0.856, EcmParams(r0_ohm=15.9e-3, r1_ohm=4.7e-3, r2_ohm=1.8e-3,
                      aw_ohm_sqrt_rad_s=2.7e-3, c1_f=1.7, c2_f=0.27)),
    (0.768, EcmParams(r0_ohm=17.9e-3, r1_ohm=11.5e-3, r2_ohm=3.7e-3,
                      aw_ohm_sqrt_rad_s=4.1e-3, c1_f=5.2, c2_f=0.34)),
)

DEFAULT_FREQ_GRID = tuple(np.logspace(-2, 4, 60))


@dataclass(frozen=True)
class AgingTrend:
    anchors: tuple
    noise_rel: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "anchors", tuple(self.anchors))
        if len(self.anchors) < 2:
            raise ValueError("need at least 2 anchors")
        sohs = [a[0] for a in self.anchors]
        if any(b >= a for a, b in zip(sohs, sohs[1:])):
            raise ValueError("anchor SoH values must be strictly decreasing")
        if not 0.0 <= self.noise_rel <= 0.2:
            raise ValueError(f"noise_rel must be in [0, 0.2], got {self.noise_rel}")

    @property
    def soh_span(self) -> tuple[float, float]:
        return self.anchors[-1][0], self.anchors[0][0]


def default_trend(noise_rel: float = 0.0, seed: int = 0) -> AgingTrend:
    return AgingTrend(anchors=TABLE_ANCHORS, noise_rel=noise_rel, seed=seed)


def _noise_rng(seed: int, soh_frac: float) -> np.random.Generator:
    # Deterministic per (seed, soh): fold the soh bit pattern into the seed.
    (bits,) = struct.unpack("<Q", struct.pack("<d", soh_frac))
    return np.random.default_rng(np.random.SeedSequence([seed, bits >> 32, bits & 0xFFFFFFFF]))


def params_at(trend: AgingTrend, soh_frac: float) -> EcmParams:
    """Interpolate parameters at a SoH within the anchor span.

    Interpolation is linear in log-parameter vs SoH; noise multiplies each
    parameter by an independent lognormal factor of the configured level.
    """
    lo, hi = trend.soh_span
    if not lo <= soh_frac <= hi:
        raise RangeError(f"soh {soh_frac} outside anchor span [{lo}, {hi}]")
    anchors = trend.anchors
    upper = anchors[0]
    lower = anchors[-1]
    for (s_a, p_a), (s_b, p_b) in zip(anchors, anchors[1:]):
        if s_b <= soh_frac <= s_a:
            upper, lower = (s_a, p_a), (s_b, p_b)
            break
    s_hi, p_hi = upper
    s_lo, p_lo = lower
    frac = 0.0 if s_hi == s_lo else (soh_frac - s_lo) / (s_hi - s_lo)
    logs = [
        (1.0 - frac) * math.log(v_lo) + frac * math.log(v_hi)
        for v_lo, v_hi in zip(p_lo.as_features(), p_hi.as_features())
    ]
    values = np.exp(logs)
    if trend.noise_rel > 0.0:
        rng = _noise_rng(trend.seed, soh_frac)
        values = values * np.exp(rng.normal(0.0, trend.noise_rel, size=len(values)))
    return EcmParams.from_features(values)


def cell_trend(trend: AgingTrend, cell_index: int) -> AgingTrend:
    """Derive an independently seeded copy of the trend for one cell."""
    child_seed = int(np.random.SeedSequence([trend.seed, cell_index]).generate_state(1)[0])
    return replace(trend, seed=child_seed)


def gen_dataset(trend: AgingTrend, n_cells: int, soh_points: int, freq_grid=None):
    """Generate spectra and the matching ground-truth feature table.

    Returns (spectra, truth_table); the truth table carries the exact
    parameters used so tests can score extraction and regression against
    known values.
    """
    if n_cells < 1:
        raise ValueError(f"n_cells must be >= 1, got {n_cells}")
    if soh_points < 3:
        raise ValueError(f"soh_points must be >= 3, got {soh_points}")
    grid = DEFAULT_FREQ_GRID if freq_grid is None else tuple(freq_grid)
    lo, hi = trend.soh_span
    soh_values = np.linspace(hi, lo, soh_points)
    spectra = []
    truth_rows = []
    for c in range(n_cells):
        cid = f"synth{c:02d}"
        ct = cell_trend(trend, c)
        for soh in soh_values:
            p = params_at(ct, float(soh))
            spectra.append(
                Spectrum(samples=tuple(sweep(p, grid)), cell_id=cid, soh_frac=float(soh))
            )
            truth_rows.append(FeatureRow(params=p, soh_frac=float(soh), cell_id=cid))
    truth = FeatureTable(
        rows=tuple(truth_rows),
        provenance={
            "generator": "synthetic-aging-trend",
            "seed": trend.seed,
            "noise_rel": trend.noise_rel,
            "n_cells": n_cells,
            "soh_points": soh_points,
        },
    )
    return spectra, truth
