#!/usr/bin/env python3
"""Compare the compiled biquad kernel against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--samples N] [--repeats R]
"""

import argparse
import timeit

import numpy as np

from impsoh import _kernels_py
from impsoh.kernels import USING_COMPILED, biquad_filter
from impsoh.waveform import BandpassSpec, design_bandpass


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    x = rng.standard_normal(args.samples)
    coeffs = design_bandpass(BandpassSpec(f_center_hz=1.0, q=10.0, fs_hz=100.0))

    y_fast = np.asarray(biquad_filter(x, *coeffs))
    y_ref = np.asarray(_kernels_py.biquad_filter(x, *coeffs))
    max_diff = float(np.max(np.abs(y_fast - y_ref)))

    t_fast = min(timeit.repeat(lambda: biquad_filter(x, *coeffs),
                               number=1, repeat=args.repeats))
    t_py = min(timeit.repeat(lambda: _kernels_py.biquad_filter(x, *coeffs),
                             number=1, repeat=args.repeats))

    label = "compiled" if USING_COMPILED else "pure-python (compiled unavailable)"
    print(f"samples:          {args.samples}")
    print(f"active kernel:    {label}")
    print(f"active kernel:    {t_fast * 1e3:8.2f} ms")
    print(f"pure-python:      {t_py * 1e3:8.2f} ms")
    print(f"speedup:          {t_py / t_fast:8.1f}x")
    print(f"max |difference|: {max_diff:.3e}")


if __name__ == "__main__":
    main()
