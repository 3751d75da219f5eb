"""Uniform depth grid, the space X_h and the discrete operators on it.

Grid functions are plain complex numpy arrays of length ``J + 1`` whose first
and last entries are zero (the space X_h).  Operators act on interior nodes
``1..J-1`` and always return arrays with zero endpoints.
"""

import math
from dataclasses import dataclass

import numpy as np

from .banded import solve_banded
from .errors import SingularOperator


@dataclass(frozen=True)
class Grid:
    """``J`` depth subintervals on ``[0, 1]`` and ``N`` range steps on ``[0, R]``."""

    J: int
    N: int
    R: float

    def __post_init__(self):
        if int(self.J) != self.J or self.J < 3:
            raise ValueError(f"J must be an integer >= 3, got {self.J!r}")
        if int(self.N) != self.N or self.N < 0:
            raise ValueError(f"N must be a non-negative integer, got {self.N!r}")
        if not self.R >= 0:
            raise ValueError(f"R must be non-negative, got {self.R!r}")
        if self.N == 0 and self.R != 0:
            raise ValueError("N = 0 is only meaningful for R = 0")

    @property
    def h(self):
        return 1.0 / self.J

    @property
    def k(self):
        return self.R / self.N if self.N else 0.0

    @property
    def y(self):
        return np.arange(self.J + 1) / self.J

    def r(self, n):
        return n * self.k

    def r_mid(self, n):
        """Midpoint of range step ``n`` (between ``r^{n-1}`` and ``r^n``)."""
        return (n - 0.5) * self.k

    @classmethod
    def from_step(cls, J, R, k):
        """Grid with the smallest ``N`` such that ``R / N <= k``."""
        if R == 0:
            return cls(J, 0, 0.0)
        N = max(1, math.ceil(R / k - 1e-9))
        return cls(J, N, R)


def field_vector(values):
    """Validate and copy ``values`` as a member of X_h."""
    v = np.array(values, dtype=complex)
    if v.ndim != 1 or v.size < 4:
        raise ValueError("a grid function needs J + 1 >= 4 entries")
    if v[0] != 0 or v[-1] != 0:
        raise ValueError("grid functions in X_h must vanish at both endpoints")
    return v


def zeros(grid):
    return np.zeros(grid.J + 1, dtype=complex)


def _embed(interior):
    out = np.zeros(interior.size + 2, dtype=complex)
    out[1:-1] = interior
    return out


def delta_h(v):
    """Centered second difference."""
    J = len(v) - 1
    return _embed((v[:-2] - 2.0 * v[1:-1] + v[2:]) * J * J)


def partial_h(v):
    """Centered first difference."""
    J = len(v) - 1
    return _embed((v[2:] - v[:-2]) * (0.5 * J))


def i_h(v):
    """Average of the two neighbours."""
    return _embed(0.5 * (v[2:] + v[:-2]))


def omega(grid_or_J):
    """Weight vector with ``omega_j = y_j`` for ``j < J`` and ``omega_J = 1``."""
    J = grid_or_J.J if isinstance(grid_or_J, Grid) else int(grid_or_J)
    w = np.arange(J + 1) / J
    w[-1] = 1.0
    return w


def inner_0h(v, w):
    h = 1.0 / (len(v) - 1)
    return h * np.vdot(w[1:-1], v[1:-1])


def norm_0h(v):
    h = 1.0 / (len(v) - 1)
    return math.sqrt(h * float(np.sum(np.abs(v[1:-1]) ** 2)))


def seminorm_1h(v):
    J = len(v) - 1
    return math.sqrt(J * float(np.sum(np.abs(np.diff(v)) ** 2)))


def norm_1h(v):
    return math.hypot(norm_0h(v), seminorm_1h(v))


def norm_inf_h(v):
    return float(np.max(np.abs(v[1:-1])))


def p_h_sample(f, grid):
    """Sample ``f`` at interior nodes; endpoint values are clamped to zero."""
    v = np.zeros(grid.J + 1, dtype=complex)
    y = grid.y[1:-1]
    v[1:-1] = np.broadcast_to(np.asarray(f(y), dtype=complex), y.shape)
    return v


def lambda_h_apply(env, grid, r, v):
    """``-Delta_h v - zeta(r, .) v``."""
    zeta = env.zeta(r, grid.y)
    out = -delta_h(v)
    out[1:-1] -= zeta[1:-1] * v[1:-1]
    return out


@dataclass(frozen=True)
class TridiagonalSystem:
    """Row-aligned tridiagonal matrix on interior nodes.

    ``sub[i] = A[i, i-1]`` (``sub[0]`` unused), ``main[i] = A[i, i]``,
    ``sup[i] = A[i, i+1]`` (``sup[-1]`` unused).
    """

    sub: np.ndarray
    main: np.ndarray
    sup: np.ndarray

    def bands(self):
        return np.vstack([self.sub, self.main, self.sup])

    def dense(self):
        n = self.main.size
        a = np.diag(self.main.astype(complex))
        a[np.arange(1, n), np.arange(n - 1)] = self.sub[1:]
        a[np.arange(n - 1), np.arange(1, n)] = self.sup[:-1]
        return a


def lambda_h_system(env, grid, r):
    """Tridiagonal matrix of the discrete elliptic operator at range ``r``."""
    J = grid.J
    n = J - 1
    zeta = env.zeta(r, grid.y[1:-1])
    off = np.full(n, -float(J * J), dtype=complex)
    off_sub = off.copy()
    off_sub[0] = 0
    off_sup = off.copy()
    off_sup[-1] = 0
    main = 2.0 * J * J - np.broadcast_to(zeta, (n,)).astype(complex)
    return TridiagonalSystem(off_sub, main, off_sup)


def t_h_solve(env, grid, r, f):
    """Solve ``Lambda_h(r) v = f`` for ``v`` in X_h."""
    system = lambda_h_system(env, grid, r)
    x = solve_banded(system.bands(), 1, 1, f[1:-1], error=SingularOperator)
    return _embed(x)
