"""Kernel selection: compiled extension when built, pure Python otherwise.

Set IMPSOH_PURE_PYTHON=1 to force the fallback (used by the benchmark and
the parity tests).
"""

import os

if os.environ.get("IMPSOH_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

biquad_filter = _impl.biquad_filter
USING_COMPILED = _impl.__name__.endswith("._kernels")
