"""
zkAttn proof stage

For a softmax over the last axis of Z the stage commits ẑ, the K digit
tensors X_k, the K − L segment outputs Y_k, the output Y and the row sums ŷ,
then proves

- X_k ∈ [0, b_k) for every k,
- (X_k, Y_k) in the k-th segment table for k >= L,
- ŷ ∈ [θ − E, θ + E],
- Σ_k B^(k)·X_k + Z − ẑ·1ᵀ = 0, Y = Π_k Y_k and ŷ = Y·1, batched with
  powers of ρ into one sumcheck against eq(u, ·).
"""

from typing import Optional, Sequence, Tuple
import logging

import numpy as np

from ..algebra.transcript import Transcript
from ..lookup.tlookup import LookupStage
from ..polycommit.blinding import BlindingSource
from ..polycommit.hyrax import PublicParams, TensorCommitment
from ..protocol.arith import EQ, EQ_ROWS, ROWS, Factor, prove_relation, verify_relation
from ..protocol.codec import Reader, Writer
from ..protocol.runner import StageProof, prove_stages, verify_stages
from ..protocol.session import ProverSession, Session, VerifierSession
from ..protocol.stage import CompositeStage, Stage, Trace
from .params import ZkAttnParams
from .softmax import AttnWitness, softmax_compute
from .tables import SegmentTables, build_tables

logger = logging.getLogger(__name__)


class _SoftmaxRelation(Stage):
    def __init__(self, owner: "SoftmaxStage"):
        self.owner = owner
        self.label = f"{owner.label}.rel"

    def _terms(self, rho: int, p: int):
        o = self.owner
        params = o.params
        rho2 = rho * rho % p
        terms = [
            (1, (EQ, Factor(o.y))),
            (-1, (EQ,) + tuple(Factor(o.output(k)) for k in range(params.low, params.segments))),
            (rho, (EQ_ROWS, Factor(o.y))),
        ]
        for k, place in enumerate(params.cumulative[:-1]):
            terms.append((rho2 * place % p, (EQ, Factor(o.digit(k)))))
        terms.append((rho2, (EQ, Factor(o.z))))
        terms.append((-rho2 % p, (EQ, Factor(o.z_hat, ROWS))))
        return terms

    def prove(self, session: ProverSession, writer: Writer) -> None:
        rho = session.transcript.challenge(self.label.encode() + b".rho")
        terms = self._terms(rho, session.field.modulus)
        o = self.owner
        prove_relation(session, writer, self.label, o.rows, o.cols, terms, claimed=[(rho, o.y_hat)])

    def verify(self, session: VerifierSession, reader: Reader) -> None:
        rho = session.transcript.challenge(self.label.encode() + b".rho")
        terms = self._terms(rho, session.field.modulus)
        o = self.owner
        verify_relation(session, reader, self.label, o.rows, o.cols, terms, claimed=[(rho, o.y_hat)])


class SoftmaxStage(CompositeStage):
    """
    Y = θ·softmax(Z/T) over the last axis, quantized

    Z may be a view (the sigmoid reduction pairs each input with 0).
    """

    def __init__(
        self,
        label: str,
        z: str,
        y: str,
        shape: Sequence[int],
        params: ZkAttnParams,
        tables: Optional[SegmentTables] = None,
    ):
        super().__init__(label)
        self.z, self.y = z, y
        self.shape = tuple(shape)
        self.cols = self.shape[-1]
        self.rows = int(np.prod(self.shape[:-1]))
        self.params = params
        self.tables = tables or build_tables(params)
        self.z_hat = f"{label}.zhat"
        self.y_hat = f"{label}.yhat"

        for k in range(params.segments):
            self.parts.append(LookupStage(f"{label}.range{k}", [self.digit(k)], self.tables.digits[k]))
        for k in range(params.low, params.segments):
            self.parts.append(
                LookupStage(f"{label}.seg{k}", [self.digit(k), self.output(k)], self.tables.output(k, params))
            )
        self.parts.append(LookupStage(f"{label}.norm", [self.y_hat], self.tables.norm))
        self.parts.append(_SoftmaxRelation(self))

    def digit(self, k: int) -> str:
        return f"{self.label}.x{k}"

    def output(self, k: int) -> str:
        return f"{self.label}.y{k}"

    def declare(self, session: Session) -> None:
        session.declare(self.z_hat, (self.rows,))
        for k in range(self.params.segments):
            session.declare(self.digit(k), self.shape)
        for k in range(self.params.low, self.params.segments):
            session.declare(self.output(k), self.shape)
        session.declare(self.y, self.shape)
        session.declare(self.y_hat, (self.rows,))

    def witness(self, trace: Trace) -> AttnWitness:
        return softmax_compute(trace[self.z].reshape(self.rows, self.cols), self.params, self.tables)

    def forward(self, trace: Trace) -> None:
        w = self.witness(trace)
        trace[self.z_hat] = w.z_hat
        for k, d in enumerate(w.digits):
            trace[self.digit(k)] = d.reshape(self.shape)
        for k, out in zip(range(self.params.low, self.params.segments), w.outputs):
            trace[self.output(k)] = out.reshape(self.shape)
        trace[self.y] = w.y.reshape(self.shape)
        trace[self.y_hat] = w.y_hat


def zkattn_prove(
    z: np.ndarray,
    params: ZkAttnParams,
    transcript: Transcript,
    pp: PublicParams,
    tables: Optional[SegmentTables] = None,
    blinding: Optional[BlindingSource] = None,
    max_retries: int = 8,
) -> Tuple[np.ndarray, StageProof]:
    """
    Prove Y = softmax(Z) row by row; returns Y (scale θ) and the proof

    Raises:
        RangeError: Z does not fit the parameters
    """
    z = np.asarray(z, dtype=np.int64)
    stage = SoftmaxStage("zkattn", "z", "y", z.shape, params, tables)
    proof, trace = prove_stages([stage], {"z": z}, pp, transcript, blinding=blinding, max_retries=max_retries)
    return trace["y"], proof


def zkattn_verify(
    proof: StageProof,
    shape: Sequence[int],
    params: ZkAttnParams,
    transcript: Transcript,
    pp: PublicParams,
    z_commitment: Optional[TensorCommitment] = None,
    tables: Optional[SegmentTables] = None,
    max_retries: int = 8,
) -> bool:
    """
    Raises:
        ProofRejected: if the proof does not verify
    """
    stage = SoftmaxStage("zkattn", "z", "y", shape, params, tables)
    expected = {"z": z_commitment} if z_commitment is not None else None
    return verify_stages(
        [stage], {"z": tuple(shape)}, proof, pp, transcript, expected=expected, max_retries=max_retries,
    )

