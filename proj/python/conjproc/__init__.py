"""Conjugate-process simulation, lag-1 covariance estimation and spectra."""

from ._core import (
    CovKernelGrid,
    FiniteConjugateModel,
    Measure,
    QuadratureGrid,
    Spectrum,
    c1_hat,
    c1_hat_oracle,
    eigendecompose,
    fit_rate,
    generate_latent,
    hs_distance,
    hs_norm,
    mixing_report,
    psi_coefficient,
    r_hat,
    run_c1_experiment,
    run_rate_experiment,
    simulate_conjugate,
    true_c1_grid,
    true_r_grid,
)

__all__ = [
    "CovKernelGrid",
    "FiniteConjugateModel",
    "Measure",
    "QuadratureGrid",
    "Spectrum",
    "c1_hat",
    "c1_hat_oracle",
    "eigendecompose",
    "fit_rate",
    "generate_latent",
    "hs_distance",
    "hs_norm",
    "mixing_report",
    "psi_coefficient",
    "r_hat",
    "run_c1_experiment",
    "run_rate_experiment",
    "simulate_conjugate",
    "true_c1_grid",
    "true_r_grid",
]
