"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
fallback. Setting ``TENSEGRITY_PTM_PURE=1`` forces the fallback.
"""
import os

if os.environ.get("TENSEGRITY_PTM_PURE", "") not in ("", "0"):
    from ._kernels_py import *  # noqa: F401,F403
    from ._kernels_py import BACKEND
else:
    try:
        from ._kernels import *  # noqa: F401,F403
        from ._kernels import BACKEND
    except ImportError:
        from ._kernels_py import *  # noqa: F401,F403
        from ._kernels_py import BACKEND

from . import _kernels_py as python_backend  # noqa: E402


def compiled_backend():
    """The compiled kernel module, or None if the extension is not built."""
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels
