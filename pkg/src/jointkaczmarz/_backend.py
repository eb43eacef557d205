"""Selects the kernel implementation at import time.

The compiled extension is preferred. Setting ``JOINTKACZMARZ_BACKEND=python``
forces the pure-Python fallback.
"""

import logging
import os

from . import _fallback

log = logging.getLogger(__name__)

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def get_kernels(name=None):
    """Return the kernel module for ``name`` ("cython", "python" or None=auto)."""
    if name is None:
        name = os.environ.get("JOINTKACZMARZ_BACKEND", "auto").lower()
    if name == "python":
        return _fallback
    if name in ("cython", "compiled"):
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    if name != "auto":
        raise ValueError(f"unknown backend {name!r}")
    if _compiled is None:
        log.warning("compiled kernels unavailable, using the pure-Python fallback")
        return _fallback
    return _compiled


kernels = get_kernels()
BACKEND = "python" if kernels is _fallback else "cython"
