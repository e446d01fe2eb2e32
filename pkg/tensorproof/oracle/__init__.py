"""
Independent references for tests and the selfcheck command
"""

from .reference import (
    gelu_reference,
    layernorm_reference,
    mle_bruteforce,
    multiplicities_reference,
    naive_matmul,
    rational_identity_check,
    rational_sides,
    reference_forward,
    relu_reference,
    sigmoid_reference,
    softmax_reference,
    swiglu_reference,
)
from .selfcheck import SUITES, SelfCheckReport, SuiteResult, run_selfcheck

__all__ = [
    "gelu_reference",
    "layernorm_reference",
    "mle_bruteforce",
    "multiplicities_reference",
    "naive_matmul",
    "rational_identity_check",
    "rational_sides",
    "reference_forward",
    "relu_reference",
    "sigmoid_reference",
    "softmax_reference",
    "swiglu_reference",
    "SUITES",
    "SelfCheckReport",
    "SuiteResult",
    "run_selfcheck",
]
