"""Crank-Nicolson finite differences for the wide-angle parabolic equation
over a range-dependent bottom, in terrain-following depth coordinates."""

__version__ = "0.1.0"

from .banded import BACKEND
from .core import (
    BottomProfile,
    Environment,
    check_invertibility,
    coefficients,
    cos_bottom,
    exp_bottom,
    gamma_one_plus_y,
    gamma_zero,
    linear_bottom,
    make_environment,
    tabulated_bottom,
)
from .grid_ops import Grid
from .solver import Monitors, Trajectory, run, step

__all__ = [
    "BACKEND",
    "BottomProfile",
    "Environment",
    "Grid",
    "Monitors",
    "Trajectory",
    "check_invertibility",
    "coefficients",
    "cos_bottom",
    "exp_bottom",
    "gamma_one_plus_y",
    "gamma_zero",
    "linear_bottom",
    "make_environment",
    "run",
    "step",
    "tabulated_bottom",
]
