"""Time-varying spectral density estimation with a Bernstein-Dirichlet prior."""

from ._tvspec import (
    EvaluationError,
    InitializationError,
    __version__,
    build_grid,
    estimate,
    fourier_frequencies,
    moving_periodograms,
    prior_prob_k1_equals_1,
    simulate,
    true_tv_psd,
)

__all__ = [
    "EvaluationError",
    "InitializationError",
    "build_grid",
    "estimate",
    "fourier_frequencies",
    "moving_periodograms",
    "prior_prob_k1_equals_1",
    "simulate",
    "true_tv_psd",
]
