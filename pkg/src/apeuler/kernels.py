"""Kernel backend selection.

The compiled extension ``apeuler._ckernels`` is used when it imports and
``APEULER_PURE_PYTHON`` is unset; otherwise the NumPy fallback is used.
``BACKEND`` names the active choice.
"""
import os

from apeuler import _kernels_py

smoothstep_table = _kernels_py.smoothstep_table
radial_terms = _kernels_py.radial_terms

if os.environ.get("APEULER_PURE_PYTHON"):
    _ext = None
else:
    try:
        from apeuler import _ckernels as _ext
    except ImportError:
        _ext = None

if _ext is not None:
    radial_derivative = _ext.radial_derivative
    power_profile_table = _ext.power_profile_table
    BACKEND = "cython"
else:
    radial_derivative = _kernels_py.radial_derivative
    power_profile_table = _kernels_py.power_profile_table
    BACKEND = "python"


def available_backends():
    """Return a ``{name: module}`` map of the importable kernel backends."""
    out = {"python": _kernels_py}
    try:
        from apeuler import _ckernels
    except ImportError:
        return out
    out["cython"] = _ckernels
    return out
