"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``CHROMATCH_PURE_PYTHON=1``
to force the pure-Python versions.  Both expose the same functions.
"""

import os

from . import _pykernels

python = _pykernels

try:
    if os.environ.get("CHROMATCH_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure Python requested")
    from . import _ckernels as compiled
except ImportError:
    compiled = None

active = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

rpm_fill = active.rpm_fill
color_counts = active.color_counts
swap_delta = active.swap_delta
swap_scan = active.swap_scan
nth_zero_swap = active.nth_zero_swap
enumerate_stats = active.enumerate_stats
