"""Manufactured-solution forcing, error measurement and convergence tables."""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Callable, Optional

import numpy as np

from .errors import MissingPartial, WapeError
from .grid_ops import Grid, norm_0h, norm_inf_h, p_h_sample
from .solver import assemble_step, run


@dataclass(frozen=True)
class ManufacturedSolution:
    """Exact solution ``u(r, y)`` with the partial derivatives the forcing needs.

    All callables take ``(r, y)`` with ``y`` possibly an array.
    """

    u: Optional[Callable] = None
    u_r: Optional[Callable] = None
    u_y: Optional[Callable] = None
    u_yy: Optional[Callable] = None
    u_yyy: Optional[Callable] = None
    u_ry: Optional[Callable] = None
    u_ryy: Optional[Callable] = None

    def require_partials(self):
        missing = [f.name for f in fields(self) if getattr(self, f.name) is None]
        if missing:
            raise MissingPartial(f"manufactured solution lacks {', '.join(missing)}")

    def check_boundary(self, R, neumann=True, n_samples=100, tol=1e-10):
        """Check ``u(r,0) = u(r,1) = 0`` and, if ``neumann``, ``u_y(r,1) = 0``."""
        for r in np.linspace(0.0, R, n_samples):
            vals = [self.u(r, np.array([0.0, 1.0]))]
            if neumann:
                vals.append(self.u_y(r, np.array([1.0])))
            worst = max(float(np.max(np.abs(v))) for v in vals)
            if worst > tol:
                raise ValueError(
                    f"manufactured solution violates the boundary conditions at r={r:g} "
                    f"(|residual| = {worst:.3g})"
                )


def reference_solution():
    """``u(r, y) = exp(2r) (y - 1) sin(2 pi y)`` and its partials."""
    tau = 2.0 * math.pi

    def u(r, y):
        return np.exp(2 * r) * (y - 1.0) * np.sin(tau * y) + 0j

    def u_y(r, y):
        return np.exp(2 * r) * (np.sin(tau * y) + tau * (y - 1.0) * np.cos(tau * y)) + 0j

    def u_yy(r, y):
        return np.exp(2 * r) * (2 * tau * np.cos(tau * y) - tau**2 * (y - 1.0) * np.sin(tau * y)) + 0j

    def u_yyy(r, y):
        return np.exp(2 * r) * (
            -3 * tau**2 * np.sin(tau * y) - tau**3 * (y - 1.0) * np.cos(tau * y)
        ) + 0j

    return ManufacturedSolution(
        u=u,
        u_r=lambda r, y: 2 * u(r, y),
        u_y=u_y,
        u_yy=u_yy,
        u_yyy=u_yyy,
        u_ry=lambda r, y: 2 * u_y(r, y),
        u_ryy=lambda r, y: 2 * u_yy(r, y),
    )


def zero_solution():
    z = lambda r, y: np.zeros(np.shape(y), dtype=complex)  # noqa: E731
    return ManufacturedSolution(z, z, z, z, z, z, z)


def _has_slope(env, n_probe=100):
    r = np.linspace(0.0, env.range_R, n_probe)
    return bool(np.any(np.asarray(env.bottom.s_dot(r)) != 0))


def manufactured_forcing(env, ms):
    """Right-hand side that makes ``ms.u`` solve the forced problem.

    ``F = Lambda(r) G - i xi(r) u`` with ``G = u_r - i (lam/q) u - delta y u_y``.
    The bottom Neumann condition is only demanded when the bottom slopes.
    """
    ms.require_partials()
    ms.check_boundary(env.range_R, neumann=_has_slope(env))
    shift = 1j * env.lam / env.q

    def forcing(r, y):
        y = np.asarray(y, dtype=float)
        d = env.delta(r)
        u = ms.u(r, y)
        u_y = ms.u_y(r, y)
        u_yy = ms.u_yy(r, y)
        g = ms.u_r(r, y) - shift * u - d * y * u_y
        g_yy = ms.u_ryy(r, y) - shift * u_yy - d * (2.0 * u_yy + y * ms.u_yyy(r, y))
        return -g_yy - env.zeta(r, y) * g - 1j * env.xi(r) * u

    return forcing


def measure_errors(U_final, ms, grid, r=None):
    """Discrete L2 and max-norm errors against ``P_h u(r, .)`` (default ``r = R``)."""
    r = grid.R if r is None else r
    err = U_final - p_h_sample(lambda y: ms.u(r, y), grid)
    return norm_0h(err), norm_inf_h(err)


@dataclass(frozen=True)
class ConvergenceRow:
    J: int
    l2_error: float
    l2_rate: Optional[float]
    linf_error: float
    linf_rate: Optional[float]


def _rate(e_coarse, e_fine, J_coarse, J_fine):
    if e_coarse == 0 or e_fine == 0:
        return None
    return math.log(e_coarse / e_fine) / math.log(J_fine / J_coarse)


def mesh_step(J):
    """Default range step ``k = h = 1/J``."""
    return 1.0 / J


def convergence_study(env, ms, J_list, k_rule=mesh_step, workers=1):
    """One forced run per ``J``; rates from consecutive rows.

    Runs may execute on ``workers`` threads; rows come back ordered by ``J``.
    """
    J_list = list(J_list)
    if J_list != sorted(J_list) or len(set(J_list)) != len(J_list):
        raise ValueError("J_list must be strictly ascending")
    forcing = manufactured_forcing(env, ms)
    u0 = lambda y: ms.u(0.0, y)  # noqa: E731

    def one(J):
        grid = Grid.from_step(J, env.range_R, k_rule(J))
        try:
            traj = run(env, grid, u0, forcing)
        except WapeError as exc:
            raise type(exc)(f"J={J}: {exc}") from exc
        return measure_errors(traj.final, ms, grid)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(one, J_list))
    else:
        errors = [one(J) for J in J_list]

    rows = []
    for i, (J, (e2, einf)) in enumerate(zip(J_list, errors)):
        if i == 0:
            rows.append(ConvergenceRow(J, e2, None, einf, None))
            continue
        Jp = J_list[i - 1]
        e2p, einfp = errors[i - 1]
        rows.append(ConvergenceRow(J, e2, _rate(e2p, e2, Jp, J), einf, _rate(einfp, einf, Jp, J)))
    return rows


def step_residual(env, grid, ms, n, forcing=None):
    """Max-norm residual of the exact solution in the step-``n`` system."""
    forcing = forcing or manufactured_forcing(env, ms)
    u_prev = p_h_sample(lambda y: ms.u(grid.r(n - 1), y), grid)
    u_next = p_h_sample(lambda y: ms.u(grid.r(n), y), grid)
    system = assemble_step(env, grid, n, u_prev, forcing)
    return float(np.max(np.abs(system.dense() @ u_next[1:-1] - system.rhs)))


def _fmt(x):
    return "" if x is None else f"{x:.17g}"


def table_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["J", "l2_error", "l2_rate", "linf_error", "linf_rate"])
    for row in rows:
        w.writerow([row.J, _fmt(row.l2_error), _fmt(row.l2_rate), _fmt(row.linf_error), _fmt(row.linf_rate)])
    return buf.getvalue()


def table_text(rows):
    """Aligned plain-text table in the layout of the classic convergence table."""
    head = f"{'J':>6} | {'L2-error':>11} | {'L2-rate':>7} | {'Linf-error':>11} | {'Linf-rate':>9}"
    lines = [head, "-" * len(head)]
    for row in rows:
        r2 = "" if row.l2_rate is None else f"{row.l2_rate:.3f}"
        ri = "" if row.linf_rate is None else f"{row.linf_rate:.3f}"
        lines.append(
            f"{row.J:>6} | {row.l2_error:>11.4e} | {r2:>7} | {row.linf_error:>11.4e} | {ri:>9}"
        )
    return "\n".join(lines) + "\n"
