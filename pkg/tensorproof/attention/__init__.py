"""
zkAttn: verifiable fixed-point softmax and attention
"""

from .params import (
    ZkAttnParams,
    attention_error_bound,
    compose_digits,
    decompose_digits,
    derive_params,
    params_from_config,
    rounding_bound,
    segment_scales,
    target_bound,
    temperature,
)
from .mask import KeyMaskStage, key_mask, mask_fill
from .pipeline import attention_prove, attention_stages, attention_verify
from .protocol import SoftmaxStage, zkattn_prove, zkattn_verify
from .softmax import AttnWitness, row_shift, softmax_compute
from .tables import SegmentTables, build_tables, exp_column

__all__ = [
    "ZkAttnParams",
    "attention_error_bound",
    "compose_digits",
    "decompose_digits",
    "derive_params",
    "params_from_config",
    "rounding_bound",
    "segment_scales",
    "target_bound",
    "temperature",
    "KeyMaskStage",
    "key_mask",
    "mask_fill",
    "attention_prove",
    "attention_stages",
    "attention_verify",
    "SoftmaxStage",
    "zkattn_prove",
    "zkattn_verify",
    "AttnWitness",
    "row_shift",
    "softmax_compute",
    "SegmentTables",
    "build_tables",
    "exp_column",
]
