"""Backend selection for the hot SVD kernel.

The compiled Cython kernel is preferred; the numpy fallback implements the
same one-sided Jacobi iteration.  Set ``BERGMANLAB_BACKEND=py`` (or ``cy``)
to force a backend; the default is ``auto``.
"""

import os

from bergmanlab._kernels._jacobi_py import JacobiNonConvergence
from bergmanlab._kernels._jacobi_py import jacobi_singular_values as _jacobi_py

_forced = os.environ.get("BERGMANLAB_BACKEND", "auto").lower()

if _forced in ("cy", "cython", "auto"):
    try:
        from bergmanlab._kernels._jacobi_cy import (
            jacobi_singular_values as _jacobi_cy,
        )
    except ImportError:
        if _forced != "auto":
            raise
        _jacobi_cy = None
else:
    _jacobi_cy = None

if _forced in ("py", "python"):
    BACKEND = "py"
    jacobi_singular_values = _jacobi_py
elif _jacobi_cy is not None:
    BACKEND = "cy"
    jacobi_singular_values = _jacobi_cy
else:
    BACKEND = "py"
    jacobi_singular_values = _jacobi_py

__all__ = ["BACKEND", "JacobiNonConvergence", "jacobi_singular_values"]
