"""
Verified rescaling

Z at scale s·σ becomes Z′ = ⌊(Z + s/2)/s⌋ at scale σ, with remainder
R = Z − s·Z′ ∈ [−s/2, s/2). The prover commits Z′ and the digits of R + s/2
in base 2^budget_bits, then proves

    Z − s·Z′ − Σ_j 2^(j·budget)·D_j + s/2 = 0

at a random point, with a range lookup per digit and a lookup of Z′ in the
quotient range. A fused activation replaces the quotient range lookup with a
function lookup (Z′, f(Z′)), so ReLU costs one table of B entries plus the
remainder tables instead of a table over B·s inputs.
"""

from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from ..algebra.transcript import Transcript
from ..errors import RangeError
from ..lookup.tables import TableSpec, apply_function, function_table, range_table
from ..lookup.tlookup import LookupStage
from ..polycommit.blinding import BlindingSource
from ..polycommit.hyrax import PublicParams, TensorCommitment
from ..protocol.arith import LinearStage
from ..protocol.runner import StageProof, prove_stages, verify_stages
from ..protocol.session import Session
from ..protocol.stage import CompositeStage, Trace
from ..sumcheck.tensor import log2_exact

logger = logging.getLogger(__name__)


def digit_widths(scale: int, budget_bits: int) -> List[int]:
    """Bit widths of the remainder digits, least significant first"""
    bits = log2_exact(scale)
    widths = [budget_bits] * (bits // budget_bits)
    if bits % budget_bits:
        widths.append(bits % budget_bits)
    return widths


def quotient_table(quotient_bits: int) -> TableSpec:
    half = 1 << (quotient_bits - 1)
    return range_table(-half, half - 1)


def relu_table(quotient_bits: int) -> TableSpec:
    half = 1 << (quotient_bits - 1)
    xs = np.arange(-half, half, dtype=np.int64)
    return function_table("relu", xs, np.maximum(xs, 0))


def rescale_values(z: np.ndarray, scale: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    (Z′, R + s/2), rounding half up; object arrays stay exact

    Half up, unlike the ties-to-even `quantize`: the remainder then lies in
    [−s/2, s/2), so R + s/2 is a plain digit range in [0, s) for the table.
    Weights are quantized once in floating point and never proved.
    """
    z = np.asarray(z)
    if z.dtype != object:
        z = z.astype(np.int64)
    half = scale // 2
    q = (z + half) // scale
    return q, z - scale * q + half


class RescaleStage(CompositeStage):
    """out = round(z / scale), optionally passed through a function table"""

    def __init__(
        self,
        label: str,
        z: str,
        out: str,
        shape: Sequence[int],
        scale: int,
        budget_bits: int = 10,
        quotient_bits: int = 14,
        fn: Optional[TableSpec] = None,
    ):
        super().__init__(label)
        self.z, self.out = z, out
        self.shape = tuple(shape)
        self.scale = scale
        self.fn = fn
        self.quotient_bits = quotient_bits
        self.widths = digit_widths(scale, budget_bits)
        self.quotient = f"{label}.q" if fn is not None else out

        terms = [(1, z), (-scale, self.quotient)]
        offset = 0
        for j, w in enumerate(self.widths):
            terms.append((-(1 << offset), self.digit(j)))
            offset += w
        self.parts.append(LinearStage(f"{label}.lin", terms, constant=scale // 2))
        for j, w in enumerate(self.widths):
            self.parts.append(LookupStage(f"{label}.r{j}", [self.digit(j)], range_table(0, (1 << w) - 1)))
        if fn is not None:
            self.parts.append(LookupStage(f"{label}.fn", [self.quotient, out], fn))
        else:
            self.parts.append(LookupStage(f"{label}.range", [out], quotient_table(quotient_bits)))

    def digit(self, j: int) -> str:
        return f"{self.label}.r{j}"

    def table_sizes(self) -> List[int]:
        specs = [range_table(0, (1 << w) - 1) for w in self.widths]
        specs.append(self.fn if self.fn is not None else quotient_table(self.quotient_bits))
        return [s.raw_size for s in specs]

    def declare(self, session: Session) -> None:
        if self.fn is not None:
            session.declare(self.quotient, self.shape)
        session.declare(self.out, self.shape)
        for j in range(len(self.widths)):
            session.declare(self.digit(j), self.shape)

    def forward(self, trace: Trace) -> None:
        q, rem = rescale_values(trace[self.z].reshape(self.shape), self.scale)
        offset = 0
        for j, w in enumerate(self.widths):
            trace[self.digit(j)] = ((rem >> offset) & ((1 << w) - 1)).astype(np.int64)
            offset += w
        domain = (self.fn if self.fn is not None else quotient_table(self.quotient_bits)).columns[0]
        lo, hi = int(domain[0]), int(domain[-1])
        outside = np.flatnonzero(((q < lo) | (q > hi)).reshape(-1))
        if outside.size:
            raise RangeError(
                f"{self.label}: rescaled value {int(q.reshape(-1)[outside[0]])} outside [{lo}, {hi}]"
            )
        q = q.astype(np.int64)
        if self.fn is None:
            trace[self.out] = q
            return
        trace[self.quotient] = q
        trace[self.out] = apply_function(self.fn, q)


def rescale_prove(
    z: np.ndarray,
    scale: int,
    transcript: Transcript,
    pp: PublicParams,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    blinding: Optional[BlindingSource] = None,
    max_retries: int = 8,
) -> Tuple[np.ndarray, StageProof]:
    """
    Returns Z′ = round(Z / scale) and the proof

    Raises:
        RangeError: Z′ outside the quotient range
    """
    z = np.asarray(z, dtype=np.int64)
    stage = RescaleStage("rescale", "z", "out", z.shape, scale, budget_bits, quotient_bits)
    proof, trace = prove_stages([stage], {"z": z}, pp, transcript, blinding=blinding, max_retries=max_retries)
    return trace["out"], proof


def rescale_verify(
    proof: StageProof,
    shape: Sequence[int],
    scale: int,
    transcript: Transcript,
    pp: PublicParams,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    z_commitment: Optional[TensorCommitment] = None,
    max_retries: int = 8,
) -> bool:
    stage = RescaleStage("rescale", "z", "out", shape, scale, budget_bits, quotient_bits)
    expected = {"z": z_commitment} if z_commitment is not None else None
    return verify_stages([stage], {"z": tuple(shape)}, proof, pp, transcript, expected=expected, max_retries=max_retries)


def relu_prove(
    z: np.ndarray,
    gamma: int,
    transcript: Transcript,
    pp: PublicParams,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    blinding: Optional[BlindingSource] = None,
    max_retries: int = 8,
) -> Tuple[np.ndarray, StageProof]:
    """A = max(round(Z/γ), 0) for Z at scale γ²"""
    z = np.asarray(z, dtype=np.int64)
    stage = RescaleStage("relu", "z", "out", z.shape, gamma, budget_bits, quotient_bits, relu_table(quotient_bits))
    proof, trace = prove_stages([stage], {"z": z}, pp, transcript, blinding=blinding, max_retries=max_retries)
    return trace["out"], proof


def relu_verify(
    proof: StageProof,
    shape: Sequence[int],
    gamma: int,
    transcript: Transcript,
    pp: PublicParams,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    z_commitment: Optional[TensorCommitment] = None,
    max_retries: int = 8,
) -> bool:
    stage = RescaleStage("relu", "z", "out", shape, gamma, budget_bits, quotient_bits, relu_table(quotient_bits))
    expected = {"z": z_commitment} if z_commitment is not None else None
    return verify_stages([stage], {"z": tuple(shape)}, proof, pp, transcript, expected=expected, max_retries=max_retries)
