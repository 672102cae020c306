"""Metric entropy, packing certificates and quantized Fourier neural operators."""

from ._lipent import (
    LipentError,
    __version__,
    bit_budget_asymptotic,
    bump_family,
    code_length,
    forward,
    gilbert_varshamov,
    hat_family,
    isometry_check,
    param_count,
    param_length,
    quantize,
    run_experiment,
    theoretical_lip_bound_log2,
    zero_pad_embed,
)

__all__ = [
    "LipentError",
    "__version__",
    "bit_budget_asymptotic",
    "bump_family",
    "code_length",
    "forward",
    "gilbert_varshamov",
    "hat_family",
    "isometry_check",
    "param_count",
    "param_length",
    "quantize",
    "run_experiment",
    "theoretical_lip_bound_log2",
    "zero_pad_embed",
]
