"""Floquet-based spectra of periodically driven linear Langevin systems."""

from ._core import (
    ConfigError,
    FloqspecError,
    IntegrationError,
    NonDiagonalizableError,
    PeriodicLinearSystem,
    QuadratureError,
    UnstableSystemError,
    correlation,
    decompose,
    dpo_spectral_covariance,
    find_instability,
    find_optimal_squeezing,
    fluctuation_spectrum,
    rwa_closed_form,
)

__all__ = [
    "ConfigError",
    "FloqspecError",
    "IntegrationError",
    "NonDiagonalizableError",
    "PeriodicLinearSystem",
    "QuadratureError",
    "UnstableSystemError",
    "correlation",
    "decompose",
    "dpo_spectral_covariance",
    "find_instability",
    "find_optimal_squeezing",
    "fluctuation_spectrum",
    "rwa_closed_form",
]
