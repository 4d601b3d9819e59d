"""Liouville fBm simulation, fractional annealing SDE and linearization toolkit."""

from ._core import (
    ConfigError,
    ConvergenceError,
    CouplingError,
    DivergenceError,
    Energy,
    Error,
    IoError,
    __version__,
    commands,
    derive_seed,
    eps_diff_variance,
    expm_general,
    expm_paper,
    fbm_path,
    find_steady_state,
    hurst_estimate,
    liouville_covariance,
    liouville_covariance_discrete,
    mandelbrot_covariance,
    normalize_scenario,
    quadrature_rate,
    run_command,
    sample_wiener,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "CouplingError",
    "DivergenceError",
    "Energy",
    "Error",
    "IoError",
    "__version__",
    "commands",
    "derive_seed",
    "eps_diff_variance",
    "expm_general",
    "expm_paper",
    "fbm_path",
    "find_steady_state",
    "hurst_estimate",
    "liouville_covariance",
    "liouville_covariance_discrete",
    "mandelbrot_covariance",
    "normalize_scenario",
    "quadrature_rate",
    "run_command",
    "sample_wiener",
]
