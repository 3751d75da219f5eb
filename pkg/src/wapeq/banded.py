"""Backend selection for the banded linear solver.

The compiled kernel (``wapeq._banded``) is used when it was built; otherwise
the pure-Python twin is imported.  Set ``WAPEQ_BACKEND=python`` to force the
fallback.
"""

import os

import numpy as np

from . import _banded_py
from .errors import SingularSystem

if os.environ.get("WAPEQ_BACKEND", "").lower() == "python":
    _impl = _banded_py
    BACKEND = "python"
else:
    try:
        from . import _banded as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _banded_py
        BACKEND = "python"

PIVOT_TOL = 1e-14


def solve_banded(diags, kl, ku, rhs, error=SingularSystem, backend=None):
    """Solve the banded system given by row-aligned ``diags``.

    ``diags[kl + d, i]`` holds ``A[i, i + d]``.  Raises ``error`` (a
    :class:`SingularSystem` subclass) on pivot breakdown.
    """
    impl = {"python": _banded_py, None: _impl}.get(backend)
    if impl is None:
        if backend != "compiled":
            raise ValueError(f"unknown backend {backend!r}")
        from . import _banded as impl
    x, info = impl.solve_banded(np.asarray(diags), kl, ku, np.asarray(rhs), PIVOT_TOL)
    if info >= 0:
        raise error(f"pivot breakdown in banded elimination at column {info}", index=info)
    return x


def to_dense(diags, kl, ku):
    """Expand row-aligned band storage to a dense matrix (testing aid)."""
    n = diags.shape[1]
    a = np.zeros((n, n), dtype=diags.dtype)
    for d in range(-kl, ku + 1):
        i = np.arange(max(0, -d), min(n, n - d))
        a[i, i + d] = diags[kl + d, i]
    return a
