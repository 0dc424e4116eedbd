"""Kernel backend selection.

The compiled extension is used when importable; set ``CSRGAME_BACKEND=python``
to force the numpy fallback.
"""
import os

from . import _pykernels

BACKENDS = {"python": _pykernels}
try:
    from . import _ckernels
except ImportError:  # extension not built
    pass
else:
    BACKENDS["cython"] = _ckernels

if os.environ.get("CSRGAME_BACKEND", "").lower() == "python" or "cython" not in BACKENDS:
    BACKEND = "python"
else:
    BACKEND = "cython"
kernels = BACKENDS[BACKEND]
