"""Solver and estimate checks for the time-symmetric two-body problem on a line."""

from .asymptotics import AsymptoticData, asymptote_eval, compute_etas, find_T0, strip_endpoints
from .diagnostics import DiagnosticsConfig, DiagnosticsReport, check_pair, fit_bound, run_all
from .dynamics import (force_on, integrated_velocity_residual, momentum_from_velocity,
                       velocity_from_momentum, wfint_terms)
from .lightcone import ConeQuery, ConeResult, cone_bounds_check, solve_cone
from .solver import SolverConfig, solve_conditional, solve_global
from .trajectory import Trajectory, TrajectoryPair, pair_norm_distance

__all__ = [
    "AsymptoticData", "asymptote_eval", "compute_etas", "find_T0", "strip_endpoints",
    "DiagnosticsConfig", "DiagnosticsReport", "check_pair", "fit_bound", "run_all",
    "force_on", "integrated_velocity_residual", "momentum_from_velocity",
    "velocity_from_momentum", "wfint_terms", "ConeQuery", "ConeResult", "cone_bounds_check",
    "solve_cone", "SolverConfig", "solve_conditional", "solve_global", "Trajectory",
    "TrajectoryPair", "pair_norm_distance",
]
