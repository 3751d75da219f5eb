"""Physical-space helpers: source and receiver specs, the normal-mode starter,
depth-coordinate maps, receiver sampling and transmission loss."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import _read_numeric_csv
from .errors import EvanescentMode, OutOfWater, ZeroRange


@dataclass(frozen=True)
class SourceSpec:
    frequency_hz: float
    c0: float
    z_s: float
    M: int

    def __post_init__(self):
        if not (self.frequency_hz > 0 and self.c0 > 0):
            raise ValueError("frequency and reference sound speed must be positive")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"mode count M must be a positive integer, got {self.M!r}")

    @property
    def k0(self):
        return 2.0 * math.pi * self.frequency_hz / self.c0

    @property
    def alpha(self):
        return 1.0 / self.k0

    def validate(self, D):
        """Check the source against a waveguide of depth ``D``."""
        if not 0 < self.z_s < D:
            raise ValueError(f"source depth {self.z_s:g} m outside the water column (0, {D:g})")
        available = propagating_mode_count(self, D)
        if self.M > available:
            warnings.warn(
                f"{self.M} modes requested but only {available} propagate",
                RuntimeWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class ReceiverSpec:
    z_rec: float
    stride: int = 1

    def validate(self, env, n_probe=1000):
        r = np.linspace(0.0, env.range_R, n_probe)
        shallowest = float(np.min(env.bottom.s(r)))
        if not 0 < self.z_rec < shallowest:
            raise OutOfWater(
                f"receiver depth {self.z_rec:g} m not inside (0, {shallowest:g}) along the track"
            )
        if int(self.stride) != self.stride or self.stride < 1:
            raise ValueError("receiver stride must be a positive integer")


def propagating_mode_count(src, D):
    """Number of modes ``m`` with vertical wavenumber ``m pi / D`` below ``k0``."""
    if not D > 0:
        raise ValueError("waveguide depth must be positive")
    return max(0, math.ceil(src.k0 * D / math.pi) - 1)


def normal_mode_starter(src, D):
    """Modal starter of an ideal waveguide of depth ``D`` with soft boundaries.

    ``v0(z) = sum_m c_m sin(g_m z)`` with ``g_m = m pi / D``,
    ``k_m = sqrt(k0**2 - g_m**2)`` and
    ``c_m = exp(i pi/4) sqrt(2 pi / k_m) (2/D) sin(g_m z_s)``.
    """
    count = propagating_mode_count(src, D)
    if src.M > count:
        raise EvanescentMode(
            f"mode {count + 1} is evanescent at {src.frequency_hz:g} Hz in {D:g} m of water"
        )
    m = np.arange(1, src.M + 1)
    g = m * math.pi / D
    km = np.sqrt(src.k0**2 - g**2)
    coeffs = np.exp(0.25j * math.pi) * np.sqrt(2.0 * math.pi / km) * (2.0 / D) * np.sin(g * src.z_s)

    def v0(z):
        z = np.asarray(z, dtype=float)
        return np.sin(np.multiply.outer(z, g)) @ coeffs

    v0.coefficients = coeffs
    v0.wavenumbers = km
    return v0


def read_starter_csv(path):
    """Starter sampled in a three-column ``z, re, im`` CSV, linearly interpolated."""
    rows = _read_numeric_csv(path, 3)
    order = np.argsort(rows[:, 0])
    z, re, im = rows[order].T

    def v0(zq):
        zq = np.asarray(zq, dtype=float)
        return np.interp(zq, z, re) + 1j * np.interp(zq, z, im)

    return v0


def to_computational(v0, env):
    """Initial field on ``[0, 1]``: ``u0(y) = v0(y s(0))``."""
    s0 = float(env.bottom.s(0.0))
    return lambda y: v0(np.asarray(y, dtype=float) * s0)


def field_at_receiver(U_n, r_n, z_rec, env, grid):
    """Linearly interpolate ``U_n`` at depth ``z_rec`` below the surface at range ``r_n``."""
    depth = float(env.bottom.s(r_n))
    if not 0 < z_rec < depth:
        raise OutOfWater(f"receiver at {z_rec:g} m is outside the water column (0, {depth:g}) at r={r_n:g}")
    t = z_rec / depth * grid.J
    j = int(round(t))
    if abs(t - j) < 1e-9:
        return complex(U_n[j])
    j = int(math.floor(t))
    w = t - j
    return complex((1.0 - w) * U_n[j] + w * U_n[j + 1])


def receiver_probe(z_rec, env, grid):
    """Callable ``(U, r) -> complex`` suitable for :class:`wapeq.solver.Monitors`."""
    return lambda U, r: field_at_receiver(U, r, z_rec, env, grid)


def transmission_loss(v, r):
    """``-20 log10(|v| / sqrt(r))`` in dB; ``inf`` when ``v == 0``."""
    if not r > 0:
        raise ZeroRange(f"transmission loss is undefined at range {r!r}")
    a = abs(v)
    if a == 0:
        return math.inf
    return -20.0 * math.log10(a / math.sqrt(r))
