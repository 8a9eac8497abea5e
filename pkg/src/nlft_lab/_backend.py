"""Kernel selection: compiled extension when importable, numpy otherwise.

Set ``NLFT_LAB_PURE=1`` to force the numpy kernel.
"""
import os

from . import _kernels_py

BACKEND = "python"
propagate_kernel = _kernels_py.propagate

if os.environ.get("NLFT_LAB_PURE") != "1":
    try:
        from . import _kernels
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "compiled"
        propagate_kernel = _kernels.propagate
