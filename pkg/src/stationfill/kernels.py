"""Backend selection for the hot kernels.

The compiled extension is preferred when it imported cleanly; the numpy
fallback keeps everything working (more slowly) when it did not. Set
``STATIONFILL_PURE=1`` before import to force the fallback, e.g. for
benchmarking or debugging.
"""

from __future__ import annotations

import os

if os.environ.get("STATIONFILL_PURE", "0") not in ("", "0"):
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from . import _pykernels as _impl  # type: ignore[no-redef]

        BACKEND = "python"

best_split = _impl.best_split
svr_pass = _impl.svr_pass


def backend() -> str:
    """Which kernel implementation is active: 'compiled' or 'python'."""
    return BACKEND
