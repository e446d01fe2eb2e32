"""
Sigmoid-gated activations

Sigmoid is softmax over the pair (z, 0) at temperature γ/slope:
θ_s·σ(slope·z/γ) = θ_s·e^{z/T} / (e^{z/T} + e^0). Each input is paired with
a zero through a view, the pair goes through the zkAttn stage and the first
column is read back through another view, so sigmoid costs no tables beyond
the softmax ones.

- GELU(g) ≈ g·σ(1.702·g), rescaled by θ_s
- SwiGLU(g, u) = g·σ(g)·u, rescaled by γ·θ_s
"""

from typing import Optional, Sequence, Tuple
import logging

import numpy as np

from ..algebra.transcript import Transcript
from ..attention.params import ZkAttnParams, params_from_config
from ..attention.protocol import SoftmaxStage
from ..attention.tables import SegmentTables
from ..config import SoftmaxConfig
from ..errors import ParamError
from ..polycommit.blinding import BlindingSource
from ..polycommit.hyrax import PublicParams, TensorCommitment
from ..protocol.arith import Factor, HadamardStage
from ..protocol.runner import StageProof, prove_stages, verify_stages
from ..protocol.stage import CompositeStage, ViewStage
from ..protocol.views import PairWithZero, SelectColumn
from .rescale import RescaleStage

logger = logging.getLogger(__name__)

GELU_SLOPE = 1.702


def sigmoid_params(cfg: SoftmaxConfig, gamma: int, slope: float = 1.0) -> ZkAttnParams:
    """zkAttn parameters for rows of two at temperature γ/slope"""
    return params_from_config(cfg, gamma, 1, 2, slope)


def _grid(shape: Sequence[int]) -> Tuple[int, int]:
    shape = tuple(shape)
    return int(np.prod(shape[:-1])), shape[-1]


class SigmoidStage(CompositeStage):
    """out = θ_s·σ(slope·z/γ), flattened to one axis"""

    def __init__(
        self,
        label: str,
        z: str,
        out: str,
        shape: Sequence[int],
        params: ZkAttnParams,
        tables: Optional[SegmentTables] = None,
    ):
        super().__init__(label)
        if params.n != 2:
            raise ParamError("sigmoid parameters must be derived for rows of two")
        self.z, self.out = z, out
        self.size = int(np.prod(shape))
        self.params = params
        pair, soft = f"{label}.pair", f"{label}.soft"
        self.parts = [
            ViewStage(pair, PairWithZero(z, (self.size,))),
            SoftmaxStage(f"{label}.softmax", pair, soft, (self.size, 2), params, tables),
            ViewStage(out, SelectColumn(soft, (self.size, 2), 0)),
        ]


class GeluStage(CompositeStage):
    """out = round(g·σ_s(1.702·g) / θ_s) at the scale of g"""

    def __init__(
        self,
        label: str,
        g: str,
        out: str,
        shape: Sequence[int],
        params: ZkAttnParams,
        budget_bits: int = 10,
        quotient_bits: int = 14,
        tables: Optional[SegmentTables] = None,
    ):
        super().__init__(label)
        rows, cols = _grid(shape)
        gate, prod = f"{label}.gate", f"{label}.prod"
        self.parts = [
            SigmoidStage(f"{label}.sig", g, gate, shape, params, tables),
            HadamardStage(f"{label}.mul", prod, [Factor(g), Factor(gate)], rows, cols, tuple(shape)),
            RescaleStage(f"{label}.rs", prod, out, shape, params.theta, budget_bits, quotient_bits),
        ]


class SwigluStage(CompositeStage):
    """out = round(g·σ_s(g)·u / (γ·θ_s)) at the scale of g"""

    def __init__(
        self,
        label: str,
        g: str,
        u: str,
        out: str,
        shape: Sequence[int],
        params: ZkAttnParams,
        budget_bits: int = 10,
        quotient_bits: int = 14,
        tables: Optional[SegmentTables] = None,
    ):
        super().__init__(label)
        rows, cols = _grid(shape)
        gate, prod = f"{label}.gate", f"{label}.prod"
        self.parts = [
            SigmoidStage(f"{label}.sig", g, gate, shape, params, tables),
            HadamardStage(f"{label}.mul", prod, [Factor(g), Factor(gate), Factor(u)], rows, cols, tuple(shape)),
            RescaleStage(f"{label}.rs", prod, out, shape, params.gamma * params.theta, budget_bits, quotient_bits),
        ]


def _expected(name: str, c: Optional[TensorCommitment]):
    return {name: c} if c is not None else None


def sigmoid_prove(
    z: np.ndarray,
    params: ZkAttnParams,
    transcript: Transcript,
    pp: PublicParams,
    blinding: Optional[BlindingSource] = None,
    max_retries: int = 8,
) -> Tuple[np.ndarray, StageProof]:
    """
    Returns θ_s·σ(slope·z/γ) in the shape of z, and the proof

    Raises:
        RangeError: an input is too negative for the segment layout
    """
    z = np.asarray(z, dtype=np.int64)
    stage = SigmoidStage("sigmoid", "z", "out", z.shape, params)
    proof, trace = prove_stages([stage], {"z": z}, pp, transcript, blinding=blinding, max_retries=max_retries)
    return trace["out"].reshape(z.shape), proof


def sigmoid_verify(
    proof: StageProof,
    shape: Sequence[int],
    params: ZkAttnParams,
    transcript: Transcript,
    pp: PublicParams,
    z_commitment: Optional[TensorCommitment] = None,
    max_retries: int = 8,
) -> bool:
    stage = SigmoidStage("sigmoid", "z", "out", shape, params)
    return verify_stages(
        [stage], {"z": tuple(shape)}, proof, pp, transcript,
        expected=_expected("z", z_commitment), max_retries=max_retries,
    )


def gelu_prove(
    g: np.ndarray,
    params: ZkAttnParams,
    transcript: Transcript,
    pp: PublicParams,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    blinding: Optional[BlindingSource] = None,
    max_retries: int = 8,
) -> Tuple[np.ndarray, StageProof]:
    """params must be sigmoid parameters at slope 1.702"""
    g = np.asarray(g, dtype=np.int64)
    stage = GeluStage("gelu", "g", "out", g.shape, params, budget_bits, quotient_bits)
    proof, trace = prove_stages([stage], {"g": g}, pp, transcript, blinding=blinding, max_retries=max_retries)
    return trace["out"], proof


def gelu_verify(
    proof: StageProof,
    shape: Sequence[int],
    params: ZkAttnParams,
    transcript: Transcript,
    pp: PublicParams,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    g_commitment: Optional[TensorCommitment] = None,
    max_retries: int = 8,
) -> bool:
    stage = GeluStage("gelu", "g", "out", shape, params, budget_bits, quotient_bits)
    return verify_stages(
        [stage], {"g": tuple(shape)}, proof, pp, transcript,
        expected=_expected("g", g_commitment), max_retries=max_retries,
    )


def swiglu_prove(
    g: np.ndarray,
    u: np.ndarray,
    params: ZkAttnParams,
    transcript: Transcript,
    pp: PublicParams,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    blinding: Optional[BlindingSource] = None,
    max_retries: int = 8,
) -> Tuple[np.ndarray, StageProof]:
    g = np.asarray(g, dtype=np.int64)
    u = np.asarray(u, dtype=np.int64)
    stage = SwigluStage("swiglu", "g", "u", "out", g.shape, params, budget_bits, quotient_bits)
    proof, trace = prove_stages(
        [stage], {"g": g, "u": u}, pp, transcript, blinding=blinding, max_retries=max_retries,
    )
    return trace["out"], proof


def swiglu_verify(
    proof: StageProof,
    shape: Sequence[int],
    params: ZkAttnParams,
    transcript: Transcript,
    pp: PublicParams,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    max_retries: int = 8,
) -> bool:
    stage = SwigluStage("swiglu", "g", "u", "out", shape, params, budget_bits, quotient_bits)
    shapes = {"g": tuple(shape), "u": tuple(shape)}
    return verify_stages([stage], shapes, proof, pp, transcript, max_retries=max_retries)
