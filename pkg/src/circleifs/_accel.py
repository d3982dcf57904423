"""Kernel backend selection.

Set ``CIRCLEIFS_NUMBA=0`` to force the pure-numpy kernels. Otherwise numba
kernels are used whenever numba imports.
"""

from __future__ import annotations

import logging
import os

from . import _kernels_numpy

log = logging.getLogger(__name__)

_FLAG = os.environ.get("CIRCLEIFS_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in {"0", "false", "off", "no"}

kernels = _kernels_numpy
if _WANT_NUMBA:
    try:
        from . import _kernels_numba

        kernels = _kernels_numba
    except ImportError:  # pragma: no cover - numba missing
        log.warning("numba not importable; falling back to numpy kernels")

USE_NUMBA = kernels is not _kernels_numpy
BACKEND = "numba" if USE_NUMBA else "numpy"
