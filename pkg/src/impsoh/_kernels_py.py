"""Pure-Python fallback for the compiled filter kernel.

Kept numerically identical to the Cython version: same direct form II
transposed recurrence, same zero initial state.
"""

import numpy as np


def biquad_filter(x, b0, b1, b2, a1, a2):
    """Run a second-order IIR section over x with zero initial state."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.empty_like(x)
    z1 = 0.0
    z2 = 0.0
    xs = x.tolist()
    for i, xn in enumerate(xs):
        yn = b0 * xn + z1
        z1 = b1 * xn - a1 * yn + z2
        z2 = b2 * xn - a2 * yn
        y[i] = yn
    return y
