"""
Hyrax commitments, evaluation proofs and blinding
"""

from .blinding import BlindingSource, ZeroBlinding
from .hyrax import (
    EvalProof,
    PublicParams,
    TensorCommitment,
    combine,
    commit,
    keygen,
    layout,
    prove_eval,
    verify_eval,
)
from .ipa import InnerProductProof, fold_coefficients, prove_inner_product, verify_inner_product

__all__ = [
    "BlindingSource",
    "ZeroBlinding",
    "EvalProof",
    "PublicParams",
    "TensorCommitment",
    "combine",
    "commit",
    "keygen",
    "layout",
    "prove_eval",
    "verify_eval",
    "InnerProductProof",
    "fold_coefficients",
    "prove_inner_product",
    "verify_inner_product",
]
