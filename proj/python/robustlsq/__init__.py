"""Robust least-squares regression over corrupted mini-batches.

Thin re-export of the compiled extension. Covariates cross the boundary as
numpy arrays of shape (p, n), one column per sample.
"""

from ._core import (
    CapabilityError,
    Coefficients,
    DataError,
    DominatingSet,
    DrlrReport,
    EstimatePool,
    GroundTruth,
    HrrConfig,
    HrrResult,
    IndexSet,
    KHeavyLayout,
    MedianConfig,
    MiniBatch,
    NumericalError,
    OrlrState,
    OrlrUpdateResult,
    SynthSpec,
    UniformRatiosLayout,
    admit_estimate,
    baseline_hrr_avg,
    baseline_ols_avg,
    consolidate,
    drlr_fit,
    generate,
    geometric_median,
    hrr_fit,
    inject_corruption,
    k_heavy_gamma,
    l2_error,
    mae,
    orlr_init,
    orlr_update,
    predict,
)

__version__ = "0.1.0"

__all__ = [
    "CapabilityError",
    "Coefficients",
    "DataError",
    "DominatingSet",
    "DrlrReport",
    "EstimatePool",
    "GroundTruth",
    "HrrConfig",
    "HrrResult",
    "IndexSet",
    "KHeavyLayout",
    "MedianConfig",
    "MiniBatch",
    "NumericalError",
    "OrlrState",
    "OrlrUpdateResult",
    "SynthSpec",
    "UniformRatiosLayout",
    "admit_estimate",
    "baseline_hrr_avg",
    "baseline_ols_avg",
    "consolidate",
    "drlr_fit",
    "generate",
    "geometric_median",
    "hrr_fit",
    "inject_corruption",
    "k_heavy_gamma",
    "l2_error",
    "mae",
    "orlr_init",
    "orlr_update",
    "predict",
]
