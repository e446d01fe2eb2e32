"""
Multilinear extensions, the sumcheck engine and the matmul reduction
"""

from .engine import (
    Combination,
    SumcheckProof,
    SumcheckResult,
    Term,
    batch_claims,
    hypercube_sum,
    interpolate,
    poly_eval,
    sumcheck_prove,
    sumcheck_verify,
)
from .matmul import (
    MatmulClaims,
    MatmulProof,
    matmul_sumcheck_prove,
    matmul_sumcheck_verify,
    prove_matmul_at,
    verify_matmul_at,
)
from .mle import bits_of, eq_eval, eq_table, fold, mle_evaluate, mle_evaluate_flat
from .tensor import Tensor, is_pow2, log2_exact, next_pow2, pad_to_pow2

__all__ = [
    "Combination",
    "SumcheckProof",
    "SumcheckResult",
    "Term",
    "batch_claims",
    "hypercube_sum",
    "interpolate",
    "poly_eval",
    "sumcheck_prove",
    "sumcheck_verify",
    "MatmulClaims",
    "MatmulProof",
    "matmul_sumcheck_prove",
    "matmul_sumcheck_verify",
    "prove_matmul_at",
    "verify_matmul_at",
    "bits_of",
    "eq_eval",
    "eq_table",
    "fold",
    "mle_evaluate",
    "mle_evaluate_flat",
    "Tensor",
    "is_pow2",
    "log2_exact",
    "next_pow2",
    "pad_to_pow2",
]
