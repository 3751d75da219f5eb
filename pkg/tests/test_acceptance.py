"""Acceptance criteria.  Each test records a PASS/FAIL line that the
terminal summary prints after the run."""

import csv
import math
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.linalg import lu_factor, lu_solve
from scipy.ndimage import median_filter

from wapeq.acoustics import SourceSpec, propagating_mode_count
from wapeq.banded import solve_banded, to_dense
from wapeq.cli import main
from wapeq.core import (
    cos_bottom,
    exp_bottom,
    gamma_one_plus_y,
    linear_bottom,
    make_environment,
)
from wapeq.grid_ops import (
    Grid,
    delta_h,
    i_h,
    inner_0h,
    lambda_h_system,
    norm_0h,
    norm_inf_h,
    omega,
    partial_h,
    seminorm_1h,
    t_h_solve,
)
from wapeq.solver import run
from wapeq.verify import convergence_study, reference_solution

from .conftest import ACCEPTANCE, REFERENCE_Q, random_field
from .test_grid_ops import IDENTITY_J, elliptic_errors

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

# reference convergence table: J, L2 error, L2 rate, Linf error, Linf rate
REFERENCE = [
    (40, 0.2510e-1, None, 0.2493e-1, None),
    (80, 0.6424e-2, 1.966, 0.6365e-2, 1.969),
    (160, 0.1627e-2, 1.981, 0.1609e-2, 1.983),
    (320, 0.4097e-3, 1.990, 0.4048e-3, 1.991),
    (640, 0.1028e-3, 1.995, 0.1015e-3, 1.995),
]


def record(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    assert ok, detail


def manufactured_env(bottom):
    return make_environment(2.0, REFERENCE_Q + 0.5, REFERENCE_Q, bottom, gamma_one_plus_y, 1.0)


def test_1_convergence_table():
    t0 = time.perf_counter()
    rows = convergence_study(manufactured_env(exp_bottom()), reference_solution(), [r[0] for r in REFERENCE])
    elapsed = time.perf_counter() - t0
    worst_rate, worst_ratio = 0.0, 1.0
    for row, (_, e2, r2, einf, rinf) in zip(rows, REFERENCE):
        for got, want in ((row.l2_error, e2), (row.linf_error, einf)):
            worst_ratio = max(worst_ratio, got / want, want / got)
        if r2 is not None:
            worst_rate = max(worst_rate, abs(row.l2_rate - r2), abs(row.linf_rate - rinf))
    ok = worst_rate <= 0.05 and worst_ratio <= 2.0 and elapsed < 120
    record(
        "1 convergence table",
        ok,
        f"max rate gap {worst_rate:.3f} (<= 0.05), max error ratio {worst_ratio:.2f} (<= 2), {elapsed:.1f} s (< 120)",
    )


@pytest.mark.parametrize("name,bottom", [("exp(r)", exp_bottom()), ("r+2", linear_bottom(2.0, 1.0))])
def test_2_conservation(name, bottom):
    env = make_environment(10.0, 0.75, 0.25, bottom, gamma_one_plus_y, 1.0)
    traj = run(env, Grid(400, 400, 1.0), lambda y: y * y * (y - 1) + 0j)
    drift = float(traj.relative_drift.max())
    record(f"2 conservation s={name}", drift <= 5e-4, f"max relative drift {drift:.3e} (<= 5e-4)")


def test_3_flat_bottom_conservation():
    env = make_environment(10.0, 0.75, 0.25, linear_bottom(2.0, 0.0), gamma_one_plus_y, 1.0)
    traj = run(env, Grid(100, 1000, 1.0), lambda y: y * y * (y - 1) + 0j)
    drift = float(traj.relative_drift.max())
    record("3 flat-bottom conservation", drift <= 1e-11, f"max relative drift {drift:.2e} over 1000 steps (<= 1e-11)")


def test_4_discrete_identities(rng):
    worst_identity = 0.0
    violations = 0
    checked = 0
    slack = 1 + 1e-12
    for J in IDENTITY_J:
        h = 1.0 / J
        w = omega(J)
        for _ in range(100):
            v = random_field(rng, J)
            n0, n1, ninf = norm_0h(v), seminorm_1h(v), norm_inf_h(v)
            # summation by parts
            worst_identity = max(worst_identity, abs(inner_0h(delta_h(v), v) + n1**2) / n1**2)
            # weighted advection term against the averaging operator
            avg = inner_0h(v, i_h(v))
            ref = max(abs(avg), n0**2)
            worst_identity = max(worst_identity, abs(inner_0h(w * partial_h(v), v).real + 0.5 * avg.real) / ref)
            bounds = [
                n0 <= math.sqrt(2) / 2 * n1 * slack,
                norm_0h(i_h(v)) <= n0 * slack,
                ninf <= n1 * slack,
                ninf <= h**-0.5 * n0 * slack,
                ninf <= math.sqrt(2) * (n0 + norm_0h(partial_h(v))) * slack,
            ]
            violations += bounds.count(False)
            checked += 1
    ok = worst_identity <= 1e-13 and violations == 0
    record(
        "4 discrete identities",
        ok,
        f"{checked} vectors over J={list(IDENTITY_J)}; worst identity residual {worst_identity:.1e} (<= 1e-13), "
        f"{violations} inequality violations",
    )


def test_5_elliptic_consistency():
    env = manufactured_env(exp_bottom())
    errs = elliptic_errors(env, 0.7, [20, 40, 80, 160, 320])
    rates = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    ok = all(abs(rate - 2.0) <= 0.1 for rate in rates)
    record("5 elliptic consistency", ok, "H1 rates " + ", ".join(f"{rate:.3f}" for rate in rates) + " (2.0 +- 0.1)")


def test_6_solver_oracles(rng):
    worst_penta = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 51))
        diags = rng.normal(size=(5, n)) + 1j * rng.normal(size=(5, n))
        for d in range(-2, 3):
            if d < 0:
                diags[2 + d, : min(-d, n)] = 0
            elif d > 0:
                diags[2 + d, max(n - d, 0):] = 0
        rhs = rng.normal(size=n) + 1j * rng.normal(size=n)
        want = lu_solve(lu_factor(to_dense(diags, 2, 2)), rhs)
        worst_penta = max(worst_penta, np.linalg.norm(solve_banded(diags, 2, 2, rhs) - want) / np.linalg.norm(want))

    worst_tri = 0.0
    env = manufactured_env(exp_bottom())
    for _ in range(100):
        J = int(rng.integers(3, 52))
        r = float(rng.uniform(0, 1))
        g = Grid(J, 1, 1.0)
        f = random_field(rng, J)
        want = lu_solve(lu_factor(lambda_h_system(env, g, r).dense()), f[1:-1])
        got = t_h_solve(env, g, r, f)[1:-1]
        worst_tri = max(worst_tri, np.linalg.norm(got - want) / np.linalg.norm(want))
    ok = worst_penta <= 1e-12 and worst_tri <= 1e-12
    record(
        "6 solver oracles",
        ok,
        f"pentadiagonal {worst_penta:.1e}, tridiagonal {worst_tri:.1e} relative to dense LU (<= 1e-12)",
    )


def _tl_curve(tmp_path, J):
    text = (CONFIGS / "tl_downslope.ini").read_text()
    text = "\n".join(f"J = {J}" if line.startswith("J =") else line for line in text.splitlines())
    cfg = tmp_path / f"tl{J}.ini"
    cfg.write_text(text)
    out = tmp_path / f"out{J}"
    t0 = time.perf_counter()
    code = main(["tl", "--config", str(cfg), "--out-dir", str(out)])
    elapsed = time.perf_counter() - t0
    with open(out / "tl.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    data = np.array(rows, dtype=float)
    return code, elapsed, data[:, 0], data[:, 1]


def _nulls(tl, window=101, depth=10.0):
    """Samples more than ``depth`` dB above the running median."""
    return tl - median_filter(tl, size=window, mode="nearest") > depth


def test_7_transmission_loss(tmp_path):
    modes = propagating_mode_count(SourceSpec(25.0, 1500.0, 100.0, 6), 200.0)
    code, elapsed, r_fine, tl_fine = _tl_curve(tmp_path, 4000)
    code_c, _, r_coarse, tl_coarse = _tl_curve(tmp_path, 1000)
    finite = bool(np.all(np.isfinite(tl_fine)) and np.all(np.isfinite(tl_coarse)))
    same_ranges = np.allclose(r_fine, r_coarse)
    keep = ~(_nulls(tl_fine) | _nulls(tl_coarse))
    gap = float(np.max(np.abs(tl_fine - tl_coarse)[keep]))
    ok = code == 0 and code_c == 0 and elapsed < 300 and finite and same_ranges and gap <= 1.0 and modes == 6
    record(
        "7 transmission loss",
        ok,
        f"fine run {elapsed:.1f} s (< 300), finite={finite}, {modes} propagating modes (== 6), "
        f"coarse/fine max gap {gap:.3f} dB away from {int((~keep).sum())} null samples (<= 1)",
    )


PROFILES = {
    "r+2": linear_bottom(2.0, 1.0),
    "-r+2": linear_bottom(2.0, -1.0),
    "exp(-r)": exp_bottom(1.0, -1.0),
    "cos(2 pi r)+2": cos_bottom(2.0, 1.0, 1.0),
}


@pytest.mark.parametrize("name", list(PROFILES))
def test_8_profile_resilience(name):
    rows = convergence_study(manufactured_env(PROFILES[name]), reference_solution(), [40, 80, 160, 320])
    rates = [rate for row in rows[1:] for rate in (row.l2_rate, row.linf_rate)]
    ok = all(abs(rate - 2.0) <= 0.1 for rate in rates)
    record(
        f"8 profile s={name}",
        ok,
        f"rates {min(rates):.3f}..{max(rates):.3f} (2.0 +- 0.1)",
    )
