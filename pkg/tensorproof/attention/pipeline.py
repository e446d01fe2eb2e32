"""
Attention head: O = softmax(Q·Kᵀ/√d)·V

Scores Q·Kᵀ carry scale γ² and are rescaled to γ before zkAttn; Y·V carries
γθ and is rescaled back to γ.
"""

from typing import List, Optional, Tuple

import numpy as np

from ..algebra.transcript import Transcript
from ..nonlinear.rescale import RescaleStage
from ..polycommit.blinding import BlindingSource
from ..polycommit.hyrax import PublicParams
from ..protocol.arith import MatmulStage
from ..protocol.runner import StageProof, prove_stages, verify_stages
from ..protocol.stage import Stage, ViewStage
from ..protocol.views import AxisPermutation
from .params import ZkAttnParams
from .protocol import SoftmaxStage


def attention_stages(
    m: int,
    n: int,
    d: int,
    params: ZkAttnParams,
    budget_bits: int,
    quotient_bits: int,
    label: str = "attn",
) -> List[Stage]:
    """
    O = softmax(Q·Kᵀ/√d)·V for Q (m, d), K and V (n, d) at scale γ

    Inputs are named q, k and v; the output is o at scale γ.
    """
    gamma, theta = params.gamma, params.theta
    return [
        ViewStage(f"{label}.kt", AxisPermutation("k", (n, d), (1, 0))),
        MatmulStage(f"{label}.qk", "q", f"{label}.kt", f"{label}.scores", (m, n)),
        RescaleStage(f"{label}.rs", f"{label}.scores", f"{label}.z", (m, n), gamma, budget_bits, quotient_bits),
        SoftmaxStage(f"{label}.softmax", f"{label}.z", f"{label}.y", (m, n), params),
        MatmulStage(f"{label}.yv", f"{label}.y", "v", f"{label}.raw", (m, d)),
        RescaleStage(f"{label}.ro", f"{label}.raw", "o", (m, d), theta, budget_bits, quotient_bits),
    ]


def attention_prove(
    q: np.ndarray,
    k: np.ndarray,
    v: np.ndarray,
    params: ZkAttnParams,
    transcript: Transcript,
    pp: PublicParams,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    blinding: Optional[BlindingSource] = None,
    max_retries: int = 8,
) -> Tuple[np.ndarray, StageProof]:
    """Returns O at scale γ and the proof"""
    q, k, v = (np.asarray(a, dtype=np.int64) for a in (q, k, v))
    (m, d), n = q.shape, k.shape[0]
    stages = attention_stages(m, n, d, params, budget_bits, quotient_bits)
    proof, trace = prove_stages(
        stages, {"q": q, "k": k, "v": v}, pp, transcript, blinding=blinding, max_retries=max_retries,
    )
    return trace["o"], proof


def attention_verify(
    proof: StageProof,
    m: int,
    n: int,
    d: int,
    params: ZkAttnParams,
    transcript: Transcript,
    pp: PublicParams,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    max_retries: int = 8,
) -> bool:
    stages = attention_stages(m, n, d, params, budget_bits, quotient_bits)
    shapes = {"q": (m, d), "k": (n, d), "v": (n, d)}
    return verify_stages(stages, shapes, proof, pp, transcript, max_retries=max_retries)
