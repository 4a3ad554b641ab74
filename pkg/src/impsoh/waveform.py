"""Online impedance estimation from sampled voltage/current waveforms.

Pipeline: pulsed (square-wave) excitation at a target frequency, biquad
bandpass on both channels, quadrature demodulation to phasors, then
Z = V / I at the fundamental.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ecm import ImpedanceSample
from .errors import SettlingError, SignalError
from .kernels import biquad_filter

DEFAULT_Q = 10.0
SETTLE_CYCLES_PER_Q = 10.0
MIN_MEASURE_CYCLES = 8
MIN_CURRENT_AMP = 1e-9


@dataclass(frozen=True)
class SignalFrame:
    """Synchronously sampled voltage and current, fixed sample rate."""

    v: np.ndarray
    i: np.ndarray
    fs_hz: float

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=np.float64))
        object.__setattr__(self, "i", np.asarray(self.i, dtype=np.float64))
        if len(self.v) != len(self.i) or len(self.v) < 1:
            raise ValueError(f"v and i must have equal length >= 1, got {len(self.v)}/{len(self.i)}")
        if not self.fs_hz > 0:
            raise ValueError(f"fs_hz must be positive, got {self.fs_hz}")


@dataclass(frozen=True)
class Phasor:
    amplitude: float
    phase_rad: float

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")


@dataclass(frozen=True)
class BandpassSpec:
    """Second-order bandpass: unit gain at f_center, bandwidth f_center/q."""

    f_center_hz: float
    q: float
    fs_hz: float

    def __post_init__(self):
        if not 0 < self.f_center_hz < self.fs_hz / 2:
            raise ValueError(
                f"f_center_hz must lie in (0, fs/2), got {self.f_center_hz} at fs={self.fs_hz}"
            )
        if not self.q > 0:
            raise ValueError(f"q must be positive, got {self.q}")


def design_bandpass(spec: BandpassSpec):
    """Biquad coefficients via bilinear transform with pre-warping,
    normalized to exactly unit gain at f_center."""
    k = math.tan(math.pi * spec.f_center_hz / spec.fs_hz)
    norm = 1.0 / (1.0 + k / spec.q + k * k)
    b0 = k / spec.q * norm
    b1 = 0.0
    b2 = -b0
    a1 = 2.0 * (k * k - 1.0) * norm
    a2 = (1.0 - k / spec.q + k * k) * norm
    return b0, b1, b2, a1, a2


def make_excitation(f_hz: float, amp_a: float, n_cycles: int, fs_hz: float) -> np.ndarray:
    """Square-wave current of +/- amp_a at f_hz, whole number of cycles.

    Exactly zero-mean whenever fs/f is an even integer (the recommended
    sampling arrangement).
    """
    if fs_hz < 20.0 * f_hz:
        raise ValueError(f"sample rate {fs_hz} Hz too low for {f_hz} Hz (need >= 20x)")
    if n_cycles < MIN_MEASURE_CYCLES:
        raise ValueError(f"need at least {MIN_MEASURE_CYCLES} cycles, got {n_cycles}")
    n = int(round(n_cycles * fs_hz / f_hz))
    phase = (np.arange(n) * (f_hz / fs_hz)) % 1.0
    return np.where(phase < 0.5, amp_a, -amp_a)


def bandpass(x, spec: BandpassSpec) -> np.ndarray:
    """Filter a sequence through the bandpass biquad; input is not mutated."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    return biquad_filter(x, *design_bandpass(spec))


def demodulate(x, f_hz: float, fs_hz: float) -> Phasor:
    """Quadrature demodulation at f_hz over whole cycles.

    amplitude = 2*sqrt(I^2 + Q^2), phase = atan2(-Q, I) where I and Q are
    the means of x*cos and x*sin over the largest whole number of cycles.
    """
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    cycles = math.floor(n * f_hz / fs_hz)
    if cycles < 4:
        raise ValueError(f"need at least 4 whole cycles of {f_hz} Hz, got {cycles}")
    n_use = min(n, int(round(cycles * fs_hz / f_hz)))
    t = np.arange(n_use) / fs_hz
    wt = 2.0 * math.pi * f_hz * t
    i_comp = float(np.mean(x[:n_use] * np.cos(wt)))
    q_comp = float(np.mean(x[:n_use] * np.sin(wt)))
    amp = 2.0 * math.hypot(i_comp, q_comp)
    phase = math.atan2(-q_comp, i_comp)
    if phase <= -math.pi:
        phase += 2.0 * math.pi
    return Phasor(amplitude=amp, phase_rad=phase)


def estimate_impedance(frame: SignalFrame, f_hz: float, q: float = DEFAULT_Q) -> ImpedanceSample:
    """Bandpass both channels at f_hz, discard the settling prefix,
    demodulate, and form Z = V/I at the fundamental."""
    spec = BandpassSpec(f_center_hz=f_hz, q=q, fs_hz=frame.fs_hz)
    n_settle = math.ceil(SETTLE_CYCLES_PER_Q * q / f_hz * frame.fs_hz)
    n_measure = math.ceil(MIN_MEASURE_CYCLES * frame.fs_hz / f_hz)
    if len(frame.v) < n_settle + n_measure:
        raise SettlingError(
            f"frame of {len(frame.v)} samples too short: need {n_settle} for settling "
            f"plus {n_measure} for measurement at {f_hz} Hz"
        )
    vf = bandpass(frame.v, spec)[n_settle:]
    if_ = bandpass(frame.i, spec)[n_settle:]
    pv = demodulate(vf, f_hz, frame.fs_hz)
    pi = demodulate(if_, f_hz, frame.fs_hz)
    if pi.amplitude < MIN_CURRENT_AMP:
        raise SignalError(
            f"current fundamental amplitude {pi.amplitude:.3g} A below {MIN_CURRENT_AMP} A"
        )
    mag = pv.amplitude / pi.amplitude
    phase = pv.phase_rad - pi.phase_rad
    omega = 2.0 * math.pi * f_hz
    return ImpedanceSample(omega, mag * complex(math.cos(phase), math.sin(phase)))
