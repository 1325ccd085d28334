"""Galerkin FEM + L1 time stepping for time-fractional nonlinear
parabolic problems, with the convergence/verification drivers exposed
from the C++ core."""

from ._core import (
    caputo_power,
    gronwall_verify,
    l1_weights,
    list_problems,
    mittag_leffler,
    p_sequence,
    run_single,
)

__all__ = [
    "caputo_power",
    "gronwall_verify",
    "l1_weights",
    "list_problems",
    "mittag_leffler",
    "p_sequence",
    "run_single",
]
