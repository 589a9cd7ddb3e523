"""Select the compiled integration kernel, falling back to pure Python."""
from __future__ import annotations

try:
    from . import _kernels as kernels
except ImportError:  # extension not built on this install
    from . import _kernels_py as kernels


def backend_name() -> str:
    """Either "compiled" (Cython extension) or "python" (fallback)."""
    return kernels.BACKEND
