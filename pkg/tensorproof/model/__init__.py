"""
Quantized transformer and its end-to-end proof
"""

from .weights import WeightSet, committed_shapes, quantize, random_weights, weight_shapes, zero_weights
from .schedule import KEYS, LOGITS, ONEHOT, ModelSchedule, build_schedule, required_log_dim
from .forward import ModelOutput, forward, greedy_token, one_hot, padded_length
from .assembly import (
    ProofBundle,
    SetupResult,
    check_binding,
    zkllm_commit,
    zkllm_prove,
    zkllm_setup,
    zkllm_verify,
)

__all__ = [
    "WeightSet",
    "committed_shapes",
    "quantize",
    "random_weights",
    "weight_shapes",
    "zero_weights",
    "LOGITS",
    "KEYS",
    "ONEHOT",
    "ModelSchedule",
    "build_schedule",
    "required_log_dim",
    "ModelOutput",
    "forward",
    "greedy_token",
    "one_hot",
    "padded_length",
    "ProofBundle",
    "SetupResult",
    "check_binding",
    "zkllm_commit",
    "zkllm_prove",
    "zkllm_setup",
    "zkllm_verify",
]
