"""
tensorproof
Zero-knowledge proofs of quantized transformer inference
"""

from .config import (
    CommitConfig,
    LayerNormConfig,
    LookupConfig,
    ModelConfig,
    ObservabilityConfig,
    ProverConfig,
    SoftmaxConfig,
)
from .errors import ProofRejected, TensorProofError
from .model import (
    ProofBundle,
    WeightSet,
    forward,
    zkllm_commit,
    zkllm_prove,
    zkllm_setup,
    zkllm_verify,
)

__version__ = "0.1.0"

__all__ = [
    "CommitConfig",
    "LayerNormConfig",
    "LookupConfig",
    "ModelConfig",
    "ObservabilityConfig",
    "ProverConfig",
    "SoftmaxConfig",
    "ProofRejected",
    "TensorProofError",
    "ProofBundle",
    "WeightSet",
    "forward",
    "zkllm_commit",
    "zkllm_prove",
    "zkllm_setup",
    "zkllm_verify",
]
