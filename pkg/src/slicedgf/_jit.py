"""Numba selection.

Set ``SLICEDGF_DISABLE_NUMBA=1`` to run every kernel through its pure-numpy
fallback.  The flag is read once at import time.
"""

from __future__ import annotations

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

DISABLED = os.environ.get("SLICEDGF_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}
HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not DISABLED


def njit(fn):
    """Compile ``fn`` in nopython mode with the GIL released.

    Returns ``fn`` unchanged when numba is unavailable.
    """
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
