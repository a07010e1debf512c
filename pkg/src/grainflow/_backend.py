"""Pick the kernel implementation at import time.

The compiled ``_ckernels`` extension is preferred. Setting the environment
variable ``GRAINFLOW_PURE_PYTHON=1`` forces the pure-Python fallback.
"""
import os

from . import _pykernels

kernels = _pykernels
if not os.environ.get("GRAINFLOW_PURE_PYTHON"):
    try:
        from . import _ckernels as kernels  # noqa: F811
    except ImportError:
        kernels = _pykernels

BACKEND = kernels.NAME


def available():
    """All importable kernel modules, compiled first."""
    mods = []
    try:
        from . import _ckernels

        mods.append(_ckernels)
    except ImportError:
        pass
    mods.append(_pykernels)
    return mods
