"""Backend selection: compiled kernels when available, pure Python otherwise.

Set FANCOLOUR_PURE=1 to force the pure backend. Both backends are
behaviourally identical; `BACKEND` records which one is live.
"""

from __future__ import annotations

import os

if os.environ.get("FANCOLOUR_PURE"):
    from . import _purecore as _backend

    BACKEND = "pure"
else:
    try:
        from . import _fastcore as _backend  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _purecore as _backend

        BACKEND = "pure"

Engine = _backend.Engine
size_histogram = _backend.size_histogram
