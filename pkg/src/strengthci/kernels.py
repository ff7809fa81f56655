"""Kernel backend selection: the compiled extension when available."""

import os

from . import _kernels_py

try:
    if os.environ.get("STRENGTHCI_PURE_PYTHON"):
        raise ImportError("pure Python backend requested")
    from . import _kernels as _backend

    BACKEND = "cython"
except ImportError:
    _backend = _kernels_py
    BACKEND = "python"

count_below = _backend.count_below
top_eigenvalues = _backend.top_eigenvalues
largest_eigenvalue_spiked = _backend.largest_eigenvalue_spiked
centered_secular_roots = _backend.centered_secular_roots
