"""Kernel backend selection.

Prefers the compiled Cython extension; falls back to the pure-Python
reference implementation when the extension is unavailable or when the
environment variable BIPCORE_PURE is set to a nonempty value.  Both backends
implement the same algorithms with identical floating-point evaluation
order.
"""

import os

from . import pykernels

if os.environ.get("BIPCORE_PURE"):
    _impl = pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = pykernels

BACKEND = _impl.BACKEND_NAME
is_sum_real = _impl.is_sum_real
is_sum_complex = _impl.is_sum_complex
ursell_edge_sum = _impl.ursell_edge_sum

__all__ = [
    "BACKEND",
    "is_sum_real",
    "is_sum_complex",
    "ursell_edge_sum",
    "pykernels",
]
