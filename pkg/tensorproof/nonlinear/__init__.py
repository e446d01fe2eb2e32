"""
Rescaling, activations and LayerNorm
"""

# rescale first: attention.pipeline imports it while activations import attention
from .rescale import (
    RescaleStage,
    digit_widths,
    quotient_table,
    relu_prove,
    relu_table,
    relu_verify,
    rescale_prove,
    rescale_values,
    rescale_verify,
)
from .activations import (
    GELU_SLOPE,
    GeluStage,
    SigmoidStage,
    SwigluStage,
    gelu_prove,
    gelu_verify,
    sigmoid_params,
    sigmoid_prove,
    sigmoid_verify,
    swiglu_prove,
    swiglu_verify,
)
from .layernorm import (
    LayerNormStage,
    layernorm_prove,
    layernorm_verify,
    row_stats,
    rsqrt_table,
    variance_scale,
)

__all__ = [
    "RescaleStage",
    "digit_widths",
    "quotient_table",
    "relu_prove",
    "relu_table",
    "relu_verify",
    "rescale_prove",
    "rescale_values",
    "rescale_verify",
    "GELU_SLOPE",
    "GeluStage",
    "SigmoidStage",
    "SwigluStage",
    "gelu_prove",
    "gelu_verify",
    "sigmoid_params",
    "sigmoid_prove",
    "sigmoid_verify",
    "swiglu_prove",
    "swiglu_verify",
    "LayerNormStage",
    "layernorm_prove",
    "layernorm_verify",
    "row_stats",
    "rsqrt_table",
    "variance_scale",
]
