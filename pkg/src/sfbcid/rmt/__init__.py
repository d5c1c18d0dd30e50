"""Tracy-Widom (beta=1) numerics and eigenvalue detection thresholds."""

from .tw import (
    CenteringScaling,
    TracyWidomTable,
    centering_scaling,
    corrected_cdf,
    corrected_quantile,
    load_table,
    threshold,
    threshold_table,
    tw1_cdf,
    tw1_d2cdf,
    tw1_quantile,
)

__all__ = [
    "CenteringScaling",
    "TracyWidomTable",
    "centering_scaling",
    "corrected_cdf",
    "corrected_quantile",
    "load_table",
    "threshold",
    "threshold_table",
    "tw1_cdf",
    "tw1_d2cdf",
    "tw1_quantile",
]
