"""Backend selection for the hot recurrences.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``DLAGUERRE_PURE_PYTHON`` is set to a non-empty value,
the pure-Python implementations are used. ``BACKEND`` names the active one.
"""
import os

from dlaguerre import _pykernels

if os.environ.get("DLAGUERRE_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from dlaguerre import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

sturm_count = _impl.sturm_count
stieltjes_cf = _impl.stieltjes_cf
minimal_ratios = _impl.minimal_ratios
forward_three_term = _impl.forward_three_term

__all__ = [
    "BACKEND",
    "sturm_count",
    "stieltjes_cf",
    "minimal_ratios",
    "forward_three_term",
]
