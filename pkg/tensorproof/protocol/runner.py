"""
Standalone proofs over a short stage list

Commits the inputs and every declared tensor, proves the stages in reverse
and opens the ledger. Used by the per-operation prove/verify helpers; the
full model goes through model.assembly instead.
"""

from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple
import logging

import numpy as np

from ..algebra.transcript import Transcript
from ..errors import ProofRejected
from ..polycommit.blinding import BlindingSource
from ..polycommit.hyrax import PublicParams, TensorCommitment
from .codec import Reader, Writer
from .session import ProverSession, VerifierSession
from .stage import Stage, StageChain, Trace

logger = logging.getLogger(__name__)


@dataclass
class StageProof:
    """Commitments in declaration order, stage fragments and the openings"""

    commitments: List[Tuple[str, TensorCommitment]] = field(default_factory=list)
    fragments: List[Tuple[str, bytes]] = field(default_factory=list)
    openings: bytes = b""

    def commitment(self, name: str) -> TensorCommitment:
        for n, c in self.commitments:
            if n == name:
                return c
        raise KeyError(name)

    def to_bytes(self, pp: PublicParams) -> bytes:
        w = Writer(pp.field, pp.group)
        w.u32(len(self.commitments))
        for name, c in self.commitments:
            w.text(name)
            w.commitment(c)
        w.u32(len(self.fragments))
        for label, data in self.fragments:
            w.text(label)
            w.blob(data)
        w.blob(self.openings)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes, pp: PublicParams) -> "StageProof":
        r = Reader(data, pp.field, pp.group)
        commitments = [(r.text(), r.commitment()) for _ in range(r.u32())]
        fragments = [(r.text(), r.blob()) for _ in range(r.u32())]
        openings = r.blob()
        r.finish()
        return cls(commitments, fragments, openings)


def prove_stages(
    stages: Sequence[Stage],
    inputs: Mapping[str, np.ndarray],
    pp: PublicParams,
    transcript: Transcript,
    publics: Optional[Mapping[str, np.ndarray]] = None,
    blinding: Optional[BlindingSource] = None,
    max_retries: int = 8,
) -> Tuple[StageProof, Trace]:
    """
    Run the stages forward on integer inputs and prove them

    Returns the proof and the full integer trace.
    """
    session = ProverSession(pp, transcript, blinding, max_retries)
    trace: Trace = {}
    for name, values in (publics or {}).items():
        session.declare_public(name, values)
        trace[name] = np.asarray(values)
    for name, values in inputs.items():
        values = np.asarray(values)
        session.declare(name, values.shape)
        trace[name] = values
    chain = StageChain()
    chain.extend(stages)
    chain.declare(session)
    chain.forward(trace)
    for name in session.pending:
        session.set_value(name, trace[name])
    commitments = [(name, c.public()) for name, c in session.commit_pending()]
    fragments = chain.prove(session)
    writer = Writer(session.field, session.group)
    session.open_claims(writer)
    return StageProof(commitments, fragments, writer.getvalue()), trace


def verify_stages(
    stages: Sequence[Stage],
    input_shapes: Mapping[str, Tuple[int, ...]],
    proof: StageProof,
    pp: PublicParams,
    transcript: Transcript,
    publics: Optional[Mapping[str, np.ndarray]] = None,
    expected: Optional[Mapping[str, TensorCommitment]] = None,
    max_retries: int = 8,
) -> bool:
    """
    Check a StageProof

    `expected` pins commitments the caller already holds (the inputs, usually).

    Raises:
        ProofRejected: if any check fails
        DecodeError: if a fragment is malformed
    """
    session = VerifierSession(pp, transcript, max_retries)
    for name, values in (publics or {}).items():
        session.declare_public(name, values)
    for name, shape in input_shapes.items():
        session.declare(name, shape)
    chain = StageChain()
    chain.extend(stages)
    chain.declare(session)
    names = [n for n, _ in proof.commitments]
    if names != session.pending:
        raise ProofRejected(f"commitments {names} do not match the declared tensors")
    for name, c in proof.commitments:
        if expected and name in expected and expected[name] != c:
            raise ProofRejected(f"commitment to {name} is not the expected one")
        session.receive(name, c)
    chain.verify(session, proof.fragments)
    reader = Reader(proof.openings, session.field, session.group)
    session.verify_openings(reader)
    reader.finish()
    missing = session.undischarged()
    if missing:
        raise ProofRejected(f"undischarged claims on {missing}")
    return True
