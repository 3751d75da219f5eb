"""Model parameters, coefficient functions and invertibility checks.

The transformed problem lives on the strip ``0 <= y <= 1`` where
``y = z / s(r)``.  Everything the discretisation needs from the physics is
collected in :class:`Environment` and reduced to three coefficients::

    delta(r)  = s'(r) / s(r)
    zeta(r,y) = (1 + q gamma(r,y)) s(r)**2 / (alpha**2 q)
    xi(r)     = lam s(r)**2 / (alpha**2 q**2)

with ``lam = (p - q) / alpha``.
"""

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline, RegularGridInterpolator

from .errors import NonpositiveDepth, ZeroQ

#: Upper bound of the discrete Poincare-Friedrichs constant on X_h.
C_DPF = math.sqrt(2.0) / 2.0

BOTTOM_KINDS = ("analytic-exp", "analytic-linear", "analytic-cos", "tabulated")


@dataclass(frozen=True)
class BottomProfile:
    """Bottom depth ``s(r)`` (meters) and its slope ``s_dot(r)``.

    Both callables must accept scalars and numpy arrays.  ``params`` is kept
    for bookkeeping (config echo, manifests) and has no numerical role.
    """

    s: Callable
    s_dot: Callable
    kind: str
    params: dict = field(default_factory=dict, compare=False)
    r_min: float = -math.inf
    r_max: float = math.inf

    def __post_init__(self):
        if self.kind not in BOTTOM_KINDS:
            raise ValueError(f"unknown bottom kind {self.kind!r}")
        if self.kind == "tabulated":
            _check_slope_consistency(self)


def _check_slope_consistency(bottom, n_points=100, rtol=1e-6):
    lo, hi = bottom.r_min, bottom.r_max
    span = hi - lo
    eps = 1e-5 * span
    r = np.linspace(lo + eps, hi - eps, n_points)
    fd = (bottom.s(r + eps) - bottom.s(r - eps)) / (2.0 * eps)
    exact = np.asarray(bottom.s_dot(r), dtype=float)
    scale = np.maximum(np.abs(exact), 1.0)
    bad = np.abs(fd - exact) > rtol * scale
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ValueError(
            f"s_dot inconsistent with s at r={r[i]:g}: "
            f"supplied {exact[i]:g}, centered difference {fd[i]:g}"
        )


def exp_bottom(s0=1.0, rate=1.0):
    """``s(r) = s0 * exp(rate * r)``; ``rate=-1`` gives the upsloping exp(-r)."""
    return BottomProfile(
        s=lambda r: s0 * np.exp(rate * np.asarray(r, dtype=float)),
        s_dot=lambda r: s0 * rate * np.exp(rate * np.asarray(r, dtype=float)),
        kind="analytic-exp",
        params={"s0": s0, "rate": rate},
    )


def linear_bottom(s0, slope):
    """``s(r) = s0 + slope * r``."""
    return BottomProfile(
        s=lambda r: s0 + slope * np.asarray(r, dtype=float),
        s_dot=lambda r: slope + 0.0 * np.asarray(r, dtype=float),
        kind="analytic-linear",
        params={"s0": s0, "slope": slope},
    )


def cos_bottom(mean=2.0, amplitude=1.0, period=1.0):
    """``s(r) = mean + amplitude * cos(2 pi r / period)``."""
    w = 2.0 * math.pi / period
    return BottomProfile(
        s=lambda r: mean + amplitude * np.cos(w * np.asarray(r, dtype=float)),
        s_dot=lambda r: -amplitude * w * np.sin(w * np.asarray(r, dtype=float)),
        kind="analytic-cos",
        params={"mean": mean, "amplitude": amplitude, "period": period},
    )


def tabulated_bottom(r, depth):
    """Piecewise-cubic bottom through ``(r, depth)`` samples.

    The slope is the exact derivative of the interpolating spline.
    """
    r = np.asarray(r, dtype=float)
    depth = np.asarray(depth, dtype=float)
    if r.ndim != 1 or r.shape != depth.shape or r.size < 2:
        raise ValueError("tabulated bottom needs matching 1-D arrays of length >= 2")
    if np.any(np.diff(r) <= 0):
        raise ValueError("tabulated bottom ranges must be strictly increasing")
    spline = CubicSpline(r, depth)
    slope = spline.derivative()
    return BottomProfile(
        s=lambda x: spline(np.asarray(x, dtype=float)),
        s_dot=lambda x: slope(np.asarray(x, dtype=float)),
        kind="tabulated",
        params={"points": len(r)},
        r_min=float(r[0]),
        r_max=float(r[-1]),
    )


def read_bottom_csv(path):
    """Read a two-column ``r_meters, depth_meters`` CSV into a bottom profile."""
    rows = _read_numeric_csv(path, 2)
    profile = tabulated_bottom(rows[:, 0], rows[:, 1])
    profile.params["path"] = str(path)
    return profile


def _read_numeric_csv(path, ncols):
    values = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                values.append([float(x) for x in row[:ncols]])
            except ValueError:
                if values:
                    raise
                continue  # header line
    arr = np.array(values, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != ncols:
        raise ValueError(f"{path}: expected {ncols} numeric columns")
    return arr


def gamma_zero(r, y):
    """Homogeneous, lossless medium."""
    return np.zeros(np.shape(y), dtype=complex)


def gamma_one_plus_y(r, y):
    return 1.0 + np.asarray(y, dtype=complex)


def tabulated_gamma(r_nodes, y_nodes, values):
    """Bilinear interpolant of complex ``values[i, j]`` at ``(r_nodes[i], y_nodes[j])``."""
    values = np.asarray(values, dtype=complex)
    re = RegularGridInterpolator((r_nodes, y_nodes), values.real, method="linear")
    im = RegularGridInterpolator((r_nodes, y_nodes), values.imag, method="linear")

    def gamma(r, y):
        y = np.asarray(y, dtype=float)
        pts = np.stack(np.broadcast_arrays(np.full_like(y, r), y), axis=-1)
        return re(pts) + 1j * im(pts)

    return gamma


def read_gamma_csv(path):
    """Read ``r, y, re, im`` rows covering a full rectangular lattice."""
    rows = _read_numeric_csv(path, 4)
    r_nodes = np.unique(rows[:, 0])
    y_nodes = np.unique(rows[:, 1])
    if len(rows) != len(r_nodes) * len(y_nodes):
        raise ValueError(f"{path}: gamma table is not a full (r, y) lattice")
    grid = np.full((len(r_nodes), len(y_nodes)), np.nan + 0j)
    ir = np.searchsorted(r_nodes, rows[:, 0])
    iy = np.searchsorted(y_nodes, rows[:, 1])
    grid[ir, iy] = rows[:, 2] + 1j * rows[:, 3]
    return tabulated_gamma(r_nodes, y_nodes, grid)


@dataclass(frozen=True)
class Environment:
    """Immutable bundle of model parameters.  Build it with :func:`make_environment`."""

    alpha: float
    p: complex
    q: complex
    lam: complex
    bottom: BottomProfile
    gamma: Callable
    range_R: float

    def delta(self, r):
        return self.bottom.s_dot(r) / self.bottom.s(r)

    def zeta(self, r, y):
        s = self.bottom.s(r)
        g = np.broadcast_to(self.gamma(r, y), np.shape(y))
        return (1.0 + self.q * g) * s * s / (self.alpha**2 * self.q)

    def xi(self, r):
        s = self.bottom.s(r)
        return self.lam * s * s / (self.alpha**2 * self.q**2)


def make_environment(alpha, p, q, bottom, gamma, R, n_probe=1000):
    """Validate parameters and return an :class:`Environment`.

    ``R == 0`` is accepted as a degenerate range interval (only ``r = 0``).
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if not R >= 0:
        raise ValueError(f"range R must be non-negative, got {R!r}")
    p, q = complex(p), complex(q)
    if q == 0:
        raise ZeroQ("Pade coefficient q must be nonzero")
    if bottom.r_min > 0 or bottom.r_max < R:
        raise ValueError(
            f"bottom profile covers [{bottom.r_min:g}, {bottom.r_max:g}], "
            f"which does not contain [0, {R:g}]"
        )
    r = np.linspace(0.0, R, n_probe)
    depth = np.asarray(bottom.s(r), dtype=float)
    if not np.all(depth > 0):
        i = int(np.argmin(depth > 0))
        raise NonpositiveDepth(f"bottom depth s({r[i]:g}) = {depth[i]:g} is not positive")
    return Environment(
        alpha=float(alpha),
        p=p,
        q=q,
        lam=(p - q) / alpha,
        bottom=bottom,
        gamma=gamma,
        range_R=float(R),
    )


@dataclass(frozen=True)
class CoefficientSample:
    delta: float
    zeta: complex
    xi: complex


def coefficients(env, r, y):
    """Evaluate delta, zeta and xi at ``(r, y)``; ``y`` may be an array."""
    return CoefficientSample(
        delta=env.delta(r),
        zeta=env.zeta(r, y),
        xi=env.xi(r),
    )


@dataclass(frozen=True)
class InvertibilityReport:
    """Sampled infima of the sufficient conditions for invertibility of the
    discrete elliptic operator.

    ``c_deb`` bounds the real part of the form from below (coercive case);
    ``c_dbb_plus``/``c_dbb_minus`` bound the imaginary part with sign +1/-1.
    Any positive entry suffices.
    """

    c_deb: float
    c_dbb_plus: float
    c_dbb_minus: float
    holds: bool
    samples_r: int
    samples_y: int

    def summary(self):
        return (
            f"c_deb={self.c_deb:.6g} c_dbb_plus={self.c_dbb_plus:.6g} "
            f"c_dbb_minus={self.c_dbb_minus:.6g} holds={self.holds} "
            f"samples={self.samples_r}x{self.samples_y}"
        )


def check_invertibility(env, n_r_samples=256, n_y_samples=256):
    """Sample the sufficient invertibility conditions on a lattice over
    ``[0, R] x [0, 1]``.

    The conditions are sufficient only, so ``holds=False`` is reported rather
    than raised; callers decide whether to warn.
    """
    if n_r_samples < 2 or n_y_samples < 2:
        raise ValueError("sample counts must be at least 2")
    r = np.linspace(0.0, env.range_R, n_r_samples)
    y = np.linspace(0.0, 1.0, n_y_samples)
    q = env.q
    q2 = abs(q) ** 2
    c_deb = math.inf
    c_plus = math.inf
    c_minus = math.inf
    for rr in r:
        s = float(env.bottom.s(rr))
        g = np.asarray(env.gamma(rr, y), dtype=complex)
        scale = s * s / (env.alpha**2 * q2)
        coercive = 1.0 / C_DPF**2 - scale * (q.real + q2 * g.real)
        damping = scale * (q.imag - q2 * g.imag)
        c_deb = min(c_deb, float(coercive.min()))
        c_plus = min(c_plus, float(damping.min()))
        c_minus = min(c_minus, float((-damping).min()))
    return InvertibilityReport(
        c_deb=c_deb,
        c_dbb_plus=c_plus,
        c_dbb_minus=c_minus,
        holds=bool(c_deb > 0 or c_plus > 0 or c_minus > 0),
        samples_r=n_r_samples,
        samples_y=n_y_samples,
    )


def warn_if_not_invertible(report):
    if not report.holds:
        warnings.warn(
            "sufficient invertibility conditions fail on the sample lattice "
            f"({report.summary()}); proceeding anyway",
            RuntimeWarning,
            stacklevel=2,
        )
