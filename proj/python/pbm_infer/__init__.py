"""Inference from boundary-crossing times of a perturbed Wiener process.

Thin python surface over the C++ core: closed-form densities and
moments of the pre-/post-intervention intervals (S, R), exact and
path-based samplers, maximum-likelihood fits under three parameter
scenarios, the likelihood ratio test for an intervention effect, and
the Monte Carlo study harness.
"""

from ._core import (
    FitResult,
    LrtResult,
    Model,
    ParamStat,
    PbmError,
    StudySummary,
    WienerPhase,
    fit,
    fit_s_only,
    log_pdf_joint_sr,
    loglik,
    lrt_equal_drift,
    moments_s,
    moments_x0,
    oracle_sample_pairs,
    pdf_joint_sr,
    pdf_r,
    pdf_s,
    pdf_x0,
    pdf_x0_absorbed,
    proportional_model,
    run_study,
    run_sweep,
    sample_pairs,
    special_case_summaries,
    survival_fpt,
)

__all__ = [
    "FitResult",
    "LrtResult",
    "Model",
    "ParamStat",
    "PbmError",
    "StudySummary",
    "WienerPhase",
    "fit",
    "fit_s_only",
    "log_pdf_joint_sr",
    "loglik",
    "lrt_equal_drift",
    "moments_s",
    "moments_x0",
    "oracle_sample_pairs",
    "pdf_joint_sr",
    "pdf_r",
    "pdf_s",
    "pdf_x0",
    "pdf_x0_absorbed",
    "proportional_model",
    "run_study",
    "run_sweep",
    "sample_pairs",
    "special_case_summaries",
    "survival_fpt",
]

__version__ = "0.1.0"
