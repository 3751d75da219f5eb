"""Crank-Nicolson range stepping in pentadiagonal form.

Each step solves for ``U^n`` from

    -zeta_j G_j - (Delta_h G)_j = i xi U_j^{n-1/2} + F_j,      j = 1..J-1,

    G = (U^n - U^{n-1})/k - i (lam/q) U^{n-1/2} - delta y (d/dy)_h U^{n-1/2},

with every coefficient taken at the range midpoint ``r^{n-1/2}`` and
``G_0 = G_J = 0``.  Writing ``G = A U^n - B U^{n-1}`` with tridiagonal ``A``
and ``B``, and ``Lambda_h = -Delta_h - zeta`` (tridiagonal), the step matrix
``Lambda_h A - (i xi / 2) I`` is pentadiagonal.
"""

import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .banded import solve_banded
from .errors import SingularStep
from .grid_ops import norm_0h, p_h_sample


def initial_field(env, grid, u0):
    """Sample the initial condition; warns and clamps if ``u0`` misses the
    boundary conditions."""
    ends = np.asarray(u0(np.array([0.0, 1.0])), dtype=complex)
    if np.max(np.abs(ends)) > 1e-12:
        warnings.warn(
            f"initial field does not vanish at y=0 and y=1 ({ends[0]:.3g}, {ends[1]:.3g}); "
            "endpoint values are clamped to zero",
            RuntimeWarning,
            stacklevel=2,
        )
    return p_h_sample(u0, grid)


@dataclass
class StepSystem:
    """Pentadiagonal system for one range step.

    ``diags[2 + d, i]`` is the coefficient of ``U^n_{i+1+d}`` in interior row
    ``i``; out-of-matrix slots are zero.
    """

    diags: np.ndarray
    rhs: np.ndarray
    r_mid: float

    def dense(self):
        n = self.rhs.size
        a = np.zeros((n, n), dtype=complex)
        for d in range(-2, 3):
            i = np.arange(max(0, -d), min(n, n - d))
            a[i, i + d] = self.diags[2 + d, i]
        return a


def _tridiag_times(lower, diag, upper, v):
    """Row-aligned tridiagonal matrix times interior vector ``v``."""
    out = diag * v
    out[1:] += lower[1:] * v[:-1]
    out[:-1] += upper[:-1] * v[1:]
    return out


def _step_operators(env, grid, r):
    """Tridiagonal pieces of the step at midpoint ``r``.

    Returns ``(L, A, B, xi)`` where each of ``L``, ``A``, ``B`` is a
    ``(lower, diag, upper)`` triple of row-aligned interior arrays.
    """
    J = grid.J
    n = J - 1
    k = grid.k
    y = grid.y[1:-1]
    q = env.q
    half_shift = 0.5j * env.lam / q
    adv = env.delta(r) * y * (0.25 * J)  # delta * y / (4h)

    lap = float(J * J)
    zeta = env.zeta(r, y)
    L_lower = np.full(n, -lap, dtype=complex)
    L_upper = np.full(n, -lap, dtype=complex)
    L_lower[0] = 0.0
    L_upper[-1] = 0.0
    L_diag = 2.0 * lap - zeta

    A_lower = adv.astype(complex)
    A_upper = -adv.astype(complex)
    A_lower[0] = 0.0
    A_upper[-1] = 0.0
    A_diag = np.full(n, 1.0 / k - half_shift, dtype=complex)
    B_lower = -A_lower
    B_upper = -A_upper
    B_diag = np.full(n, 1.0 / k + half_shift, dtype=complex)
    return (
        (L_lower, L_diag, L_upper),
        (A_lower, A_diag, A_upper),
        (B_lower, B_diag, B_upper),
        env.xi(r),
    )


def _tridiag_product(L, A):
    """Five row-aligned diagonals of the product of two tridiagonal matrices."""
    lm, l0, lp = L
    am, a0, ap = A
    n = l0.size
    out = np.zeros((5, n), dtype=complex)
    out[0, 1:] = lm[1:] * am[:-1]
    out[1, 1:] = lm[1:] * a0[:-1]
    out[1] += l0 * am
    out[2] = l0 * a0
    out[2, 1:] += lm[1:] * ap[:-1]
    out[2, :-1] += lp[:-1] * am[1:]
    out[3] = l0 * ap
    out[3, :-1] += lp[:-1] * a0[1:]
    out[4, :-1] = lp[:-1] * ap[1:]
    out[0, :2] = 0.0
    out[1, :1] = 0.0
    out[3, -1:] = 0.0
    out[4, -2:] = 0.0
    return out


def _assemble(env, grid, n, U_prev, forcing, increment):
    if not 1 <= n <= grid.N:
        raise ValueError(f"step index {n} outside 1..{grid.N}")
    r = grid.r_mid(n)
    L, A, B, xi = _step_operators(env, grid, r)
    diags = _tridiag_product(L, A)
    diags[2] -= 0.5j * xi

    u = U_prev[1:-1]
    if increment:
        # M (U^n - U^{n-1}) = L (B - A) U^{n-1} + i xi U^{n-1} + F; B - A carries
        # no 1/k term, so nothing large cancels
        C = tuple(b - a for a, b in zip(A, B))
        rhs = _tridiag_times(*L, _tridiag_times(*C, u)) + 1j * xi * u
    else:
        rhs = _tridiag_times(*L, _tridiag_times(*B, u)) + 0.5j * xi * u
    if forcing is not None:
        rhs = rhs + np.asarray(forcing(r, grid.y[1:-1]), dtype=complex)
    return StepSystem(diags=diags, rhs=rhs, r_mid=r)


def assemble_step(env, grid, n, U_prev, forcing=None):
    """Build the pentadiagonal system advancing ``U_prev = U^{n-1}`` to ``U^n``."""
    return _assemble(env, grid, n, U_prev, forcing, increment=False)


def assemble_increment(env, grid, n, U_prev, forcing=None):
    """Same matrix as :func:`assemble_step`, right-hand side for ``U^n - U^{n-1}``."""
    return _assemble(env, grid, n, U_prev, forcing, increment=True)


def pentadiagonal_solve(system):
    """Solve a :class:`StepSystem`; returns the full grid function in X_h."""
    x = solve_banded(system.diags, 2, 2, system.rhs, error=SingularStep)
    out = np.zeros(x.size + 2, dtype=complex)
    out[1:-1] = x
    return out


def step(env, grid, n, U_prev, forcing=None):
    """Advance one range step; raises :class:`SingularStep` tagged with ``n``.

    Solves for the increment ``U^n - U^{n-1}``, which keeps rounding at the
    size of the change rather than of the field.
    """
    system = assemble_increment(env, grid, n, U_prev, forcing)
    try:
        return U_prev + pentadiagonal_solve(system)
    except SingularStep as exc:
        raise SingularStep(f"range step {n}: {exc}", index=exc.index, step=n) from exc


@dataclass
class Monitors:
    """What to record during a run.

    ``receiver`` maps ``(U, r)`` to a complex sample; it is called every
    ``stride`` steps starting at step ``stride``.
    """

    snapshot_steps: tuple = ()
    receiver: Optional[Callable] = None
    stride: int = 1


@dataclass
class Trajectory:
    final: np.ndarray
    conserved: np.ndarray
    snapshots: dict = field(default_factory=dict)
    receiver_steps: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    receiver_ranges: np.ndarray = field(default_factory=lambda: np.zeros(0))
    receiver_series: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    wall_time: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def relative_drift(self):
        c0 = self.conserved[0]
        if c0 == 0:
            return np.zeros_like(self.conserved)
        return np.abs(self.conserved - c0) / c0


def conserved_quantity(env, r, U):
    """``sqrt(s(r)) * ||U||_{0,h}``."""
    return float(np.sqrt(env.bottom.s(r))) * norm_0h(U)


def run(env, grid, u0, forcing=None, monitors=None):
    """March from ``r = 0`` to ``r = R``.

    ``u0`` is either a callable on ``[0, 1]`` or an X_h array used as ``U^0``.
    """
    monitors = monitors or Monitors()
    if callable(u0):
        U = initial_field(env, grid, u0)
    else:
        U = np.array(u0, dtype=complex)
        if U.shape != (grid.J + 1,):
            raise ValueError("initial field has the wrong length for this grid")
    snap_at = set(int(s) for s in monitors.snapshot_steps)
    snapshots = {}
    if 0 in snap_at:
        snapshots[0] = U.copy()
    conserved = np.empty(grid.N + 1)
    conserved[0] = conserved_quantity(env, 0.0, U)
    timings = np.empty(grid.N)
    rec_steps, rec_vals = [], []
    stride = max(1, int(monitors.stride))
    for n in range(1, grid.N + 1):
        t0 = time.perf_counter()
        U = step(env, grid, n, U, forcing)
        timings[n - 1] = time.perf_counter() - t0
        rn = grid.r(n)
        conserved[n] = conserved_quantity(env, rn, U)
        if n in snap_at:
            snapshots[n] = U.copy()
        if monitors.receiver is not None and n % stride == 0:
            rec_steps.append(n)
            rec_vals.append(monitors.receiver(U, rn))
    rec_steps = np.array(rec_steps, dtype=int)
    return Trajectory(
        final=U,
        conserved=conserved,
        snapshots=snapshots,
        receiver_steps=rec_steps,
        receiver_ranges=rec_steps * grid.k,
        receiver_series=np.array(rec_vals, dtype=complex),
        wall_time=timings,
    )
