"""Hot loops, compiled when the extension is available.

Set ``DISTOPT_PURE_PYTHON=1`` to force the NumPy fallback.  ``BACKEND``
tells which implementation was selected.
"""

import os

from . import _fallback

if os.environ.get("DISTOPT_PURE_PYTHON"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

quad_sgd = _impl.quad_sgd
sliding_l1 = _impl.sliding_l1

__all__ = ["quad_sgd", "sliding_l1", "BACKEND"]
