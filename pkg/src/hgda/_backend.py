"""Solver backend selection.

The compiled kernel is preferred when its extension module built; the
pure-Python mirror is used otherwise.  ``HGDA_BACKEND=python`` forces the
fallback (useful for benchmarking and cross-checking the two kernels).
"""

from __future__ import annotations

import os

from . import _kkcore_py

if os.environ.get("HGDA_BACKEND", "").lower() == "python":
    kernel = _kkcore_py
else:
    try:
        from . import _kkcore as kernel  # type: ignore[no-redef]
    except ImportError:
        kernel = _kkcore_py

BACKEND = kernel.BACKEND_NAME
solve_layout = kernel.solve_layout
