"""Hot kernels, compiled when the Cython extension is available.

Set ``MASKFREE_PURE_PYTHON=1`` to force the numpy fallback.  ``BACKEND`` tells
which implementation was picked at import time.
"""
import os

from . import _fallback

try:
    if os.environ.get("MASKFREE_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure Python requested")
    from . import _core as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _fallback
    BACKEND = "python"

orbit_weight_count = _impl.orbit_weight_count
tred2 = _impl.tred2
tql2 = _impl.tql2

__all__ = ["BACKEND", "orbit_weight_count", "tred2", "tql2"]
