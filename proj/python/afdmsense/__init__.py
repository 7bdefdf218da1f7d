"""AFDM delay-Doppler sensing: transforms, special functions, and the
Monte-Carlo trial entry points from the C++ core."""

from ._core import (
    daft,
    daft_matrix,
    grid_size,
    hyp1f1,
    hyp1f1_ratio,
    idaft,
    log_gamma,
    log_hyp1f1,
    rcrb,
    rss_nakagami_range,
    run_trial,
    tilted_nakagami_moments,
    tilted_nakagami_variance,
)

__version__ = "0.1.0"

__all__ = [
    "daft",
    "daft_matrix",
    "grid_size",
    "hyp1f1",
    "hyp1f1_ratio",
    "idaft",
    "log_gamma",
    "log_hyp1f1",
    "rcrb",
    "rss_nakagami_range",
    "run_trial",
    "tilted_nakagami_moments",
    "tilted_nakagami_variance",
]
