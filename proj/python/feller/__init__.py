"""Exact simulation and closed-form analysis of Feller diffusion."""

from ._feller import (
    NumericalError,
    absorption_probability,
    characteristic_function,
    ci_half_width,
    hitting_time_density,
    hitting_times,
    run_cli,
    simulate_paths,
    survival_probability,
    table,
    transition_density,
    truncated_mean_hitting_time,
    typical_hitting_time,
)

__all__ = [
    "NumericalError",
    "absorption_probability",
    "characteristic_function",
    "ci_half_width",
    "hitting_time_density",
    "hitting_times",
    "run_cli",
    "simulate_paths",
    "survival_probability",
    "table",
    "transition_density",
    "truncated_mean_hitting_time",
    "typical_hitting_time",
]
