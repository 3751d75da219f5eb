"""Command-line front end.

    wapeq verify   --config run.ini [--out-dir DIR]
    wapeq conserve --config run.ini [--out-dir DIR]
    wapeq tl       --config run.ini [--out-dir DIR]

Exit status: 0 success, 1 run completed but its pass criterion failed,
2 bad usage or configuration, 3 solver failure.
"""

import argparse
import csv
import logging
import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .acoustics import (
    ReceiverSpec,
    SourceSpec,
    normal_mode_starter,
    read_starter_csv,
    receiver_probe,
    to_computational,
    transmission_loss,
)
from .banded import BACKEND
from .config import RunConfig, render_sections
from .core import (
    check_invertibility,
    cos_bottom,
    exp_bottom,
    gamma_one_plus_y,
    gamma_zero,
    linear_bottom,
    make_environment,
    read_bottom_csv,
    read_gamma_csv,
)
from .errors import ConfigError, WapeError
from .grid_ops import Grid
from .solver import Monitors, run
from .verify import convergence_study, reference_solution, table_csv, table_text, zero_solution

log = logging.getLogger("wapeq")

RATE_FLOOR = 1.9
DRIFT_LIMIT = 5e-4


def _alpha(cfg):
    env = cfg.environment
    if env.alpha is not None:
        return env.alpha
    f, c0 = env.frequency, env.c0
    if f is None and cfg.source is not None:
        f, c0 = cfg.source.frequency, cfg.source.c0
    if f is None or c0 is None:
        raise ConfigError("[environment] needs alpha, or frequency and c0")
    return c0 / (2.0 * math.pi * f)


def build_environment(cfg):
    env = cfg.environment
    q = env.q
    p = env.p if env.p_rule == "explicit" else q + 0.5
    if env.gamma == "zero":
        gamma = gamma_zero
    elif env.gamma == "one-plus-y":
        gamma = gamma_one_plus_y
    else:
        gamma = read_gamma_csv(env.gamma[len("csv:"):])
    prm = env.bottom_params
    if env.bottom == "exp":
        bottom = exp_bottom(prm["s0"], prm["rate"])
    elif env.bottom == "linear":
        bottom = linear_bottom(prm["s0"], prm["slope"])
    elif env.bottom == "cos":
        bottom = cos_bottom(prm["mean"], prm["amplitude"], prm["period"])
    else:
        bottom = read_bottom_csv(env.bottom_csv)
    return make_environment(_alpha(cfg), p, q, bottom, gamma, env.R)


def build_grid(cfg, J=None):
    """Grid for one run.  A requested ``k`` that does not divide ``R`` is
    shrunk to ``R / ceil(R / k)``."""
    g = cfg.grid
    J = J if J is not None else g.J
    R = cfg.environment.R
    if g.N is not None:
        if R == 0:
            return Grid(J, 0, 0.0)
        return Grid(J, g.N, R)
    if g.k is not None:
        return Grid.from_step(J, R, g.k)
    return Grid.from_step(J, R, 1.0 / J)


def _fmt(x):
    return f"{x:.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def _timing_section(traj_or_none, total):
    out = {"total_s": total}
    if traj_or_none is not None and traj_or_none.wall_time.size:
        wt = traj_or_none.wall_time
        out.update(steps=int(wt.size), mean_step_s=float(wt.mean()), max_step_s=float(wt.max()))
    return out


def write_manifest(path, cfg, timing, report, extra=None):
    manifest = {"version": __version__, "mode": cfg.mode, "backend": BACKEND}
    manifest.update(extra or {})
    inv = {
        "c_deb": report.c_deb,
        "c_dbb_plus": report.c_dbb_plus,
        "c_dbb_minus": report.c_dbb_minus,
        "holds": report.holds,
        "samples_r": report.samples_r,
        "samples_y": report.samples_y,
    }
    text = cfg.to_text() + render_sections(
        {"manifest": manifest, "timing": timing, "invertibility": inv}
    )
    Path(path).write_text(text)


def _invertibility(env):
    report = check_invertibility(env)
    if not report.holds:
        log.warning("invertibility conditions not verified: %s", report.summary())
    return report


def cmd_verify(cfg, out_dir):
    env = build_environment(cfg)
    report = _invertibility(env)
    ms = reference_solution() if cfg.solution == "reference" else zero_solution()
    J_list = cfg.grid.J_list or (cfg.grid.J,)
    k_rule = (lambda J: cfg.grid.k) if cfg.grid.k is not None else (lambda J: 1.0 / J)
    t0 = time.perf_counter()
    rows = convergence_study(env, ms, J_list, k_rule, workers=cfg.workers)
    total = time.perf_counter() - t0
    (out_dir / "convergence.csv").write_text(table_csv(rows))
    text = table_text(rows)
    (out_dir / "convergence.txt").write_text(text)
    sys.stdout.write(text)
    rates = [
        rate
        for row in rows
        if row.J >= 80
        for rate in (row.l2_rate, row.linf_rate)
        if rate is not None
    ]
    ok = all(rate >= RATE_FLOOR for rate in rates)
    write_manifest(
        out_dir / "manifest.ini",
        cfg,
        {"runs": len(rows), "total_s": total},
        report,
        {"passed": ok, "rate_floor": RATE_FLOOR},
    )
    return 0 if ok else 1


def cmd_conserve(cfg, out_dir):
    env = build_environment(cfg)
    if env.q.imag != 0 or cfg.environment.gamma not in ("zero", "one-plus-y"):
        log.warning("conservation is only expected for real q and real gamma")
    report = _invertibility(env)
    grid = build_grid(cfg)
    if cfg.initial == "cubic":
        u0 = lambda y: y * y * (y - 1.0) + 0j  # noqa: E731
    else:
        u0 = lambda y: np.zeros(np.shape(y), dtype=complex)  # noqa: E731
    t0 = time.perf_counter()
    traj = run(env, grid, u0)
    total = time.perf_counter() - t0
    drift = traj.relative_drift
    _write_csv(
        out_dir / "conserved.csv",
        ["n", "r", "conserved", "relative_drift"],
        ([n, _fmt(grid.r(n)), _fmt(c), _fmt(d)] for n, (c, d) in enumerate(zip(traj.conserved, drift))),
    )
    max_drift = float(drift.max())
    ok = max_drift <= DRIFT_LIMIT
    print(f"max relative drift {max_drift:.3e} over {grid.N} steps ({'ok' if ok else 'FAIL'})")
    write_manifest(
        out_dir / "manifest.ini",
        cfg,
        _timing_section(traj, total),
        report,
        {"N": grid.N, "k_used": grid.k, "max_relative_drift": max_drift, "passed": ok},
    )
    return 0 if ok else 1


def cmd_tl(cfg, out_dir):
    env = build_environment(cfg)
    report = _invertibility(env)
    grid = build_grid(cfg)
    s0 = float(env.bottom.s(0.0))
    src = SourceSpec(cfg.source.frequency, cfg.source.c0, cfg.source.z_s, cfg.source.M)
    src.validate(s0)
    rec = ReceiverSpec(cfg.receiver.z_rec, cfg.receiver.stride)
    rec.validate(env)
    if cfg.source.starter == "modes":
        v0 = normal_mode_starter(src, s0)
    else:
        v0 = read_starter_csv(cfg.source.starter)
    monitors = Monitors(receiver=receiver_probe(rec.z_rec, env, grid), stride=rec.stride)
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # starter sampled at the surface/bottom
        traj = run(env, grid, to_computational(v0, env), monitors=monitors)
    total = time.perf_counter() - t0
    tl = [transmission_loss(v, r) for v, r in zip(traj.receiver_series, traj.receiver_ranges)]
    _write_csv(
        out_dir / "tl.csv",
        ["r_meters", "TL_dB"],
        ([_fmt(r), _fmt(t)] for r, t in zip(traj.receiver_ranges, tl)),
    )
    finite = bool(np.all(np.isfinite(tl)))
    print(f"TL at z_rec={rec.z_rec:g} m: {len(tl)} points, N={grid.N}, k={grid.k:.6g} m")
    extra = {"N": grid.N, "k_used": grid.k, "points": len(tl), "finite": finite}
    if cfg.grid.k is not None:
        extra["k_requested"] = cfg.grid.k
    write_manifest(out_dir / "manifest.ini", cfg, _timing_section(traj, total), report, extra)
    return 0


COMMANDS = {"verify": cmd_verify, "conserve": cmd_conserve, "tl": cmd_tl}


def main(argv=None):
    parser = argparse.ArgumentParser(prog="wapeq", description=__doc__.split("\n\n")[0])
    parser.add_argument("mode", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="run configuration (INI text)")
    parser.add_argument("--out-dir", help="output directory (overrides [output] dir)")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")

    try:
        cfg = RunConfig.from_file(args.config)
        if cfg.mode != args.mode:
            raise ConfigError(f"config is for mode {cfg.mode!r}, not {args.mode!r}")
    except (OSError, ConfigError) as exc:
        print(f"wapeq: error: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(args.out_dir or cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.mode](cfg, out_dir)
    except ConfigError as exc:
        print(f"wapeq: error: {exc}", file=sys.stderr)
        return 2
    except (WapeError, ValueError, OSError) as exc:
        print(f"wapeq: {args.mode} failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
