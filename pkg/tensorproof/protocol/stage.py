"""
Stage architecture for proof assembly

A stage owns one step of the forward pass: it computes its outputs, declares
the tensors it produces and proves/verifies the relation between its inputs
and outputs. Stages run forward in order and are proved and verified in
reverse, each one writing a labelled fragment.
"""

from abc import ABC, abstractmethod
from contextlib import nullcontext
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from ..errors import ProofRejected
from .codec import Reader, Writer
from .session import ProverSession, Session, VerifierSession

logger = logging.getLogger(__name__)

Trace = Dict[str, np.ndarray]


class Stage(ABC):
    """
    Base class for proof stages

    Stages register their output tensors in declare(), fill them in
    forward() and produce/consume a proof fragment in prove()/verify().
    """

    label: str = "stage"
    has_fragment: bool = True

    def declare(self, session: Session) -> None:
        """
        Register output tensors and views with the session

        Args:
            session: Prover or verifier session
        """
        pass

    def forward(self, trace: Trace) -> None:
        """
        Compute output tensors from the trace, in place

        Args:
            trace: Integer tensors by name

        Raises:
            RangeError: If an intermediate value leaves its table domain
        """
        pass

    @abstractmethod
    def prove(self, session: ProverSession, writer: Writer) -> None:
        """
        Prove the stage relation and push evaluation claims

        Args:
            session: Prover session, every declared tensor committed
            writer: Fragment writer for this stage
        """
        pass

    @abstractmethod
    def verify(self, session: VerifierSession, reader: Reader) -> None:
        """
        Check the fragment and push the same claims the prover did

        Raises:
            ProofRejected: If the fragment does not verify
            DecodeError: If the fragment is malformed
        """
        pass

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.label}>"


class CompositeStage(Stage):
    """A stage whose proof is a fixed sequence of sub-stages"""

    def __init__(self, label: str, parts: Sequence[Stage] = ()):
        self.label = label
        self.parts: List[Stage] = list(parts)

    def declare(self, session: Session) -> None:
        for part in self.parts:
            part.declare(session)

    def forward(self, trace: Trace) -> None:
        for part in self.parts:
            part.forward(trace)

    def prove(self, session: ProverSession, writer: Writer) -> None:
        for part in self.parts:
            part.prove(session, writer)

    def verify(self, session: VerifierSession, reader: Reader) -> None:
        for part in self.parts:
            part.verify(session, reader)


class StageChain:
    """
    Chain of stages

    Runs forward in order; proves and verifies in reverse order, the same
    way responses unwind through a middleware chain.
    """

    def __init__(self, tracer=None):
        self.stages: List[Stage] = []
        self.tracer = tracer

    def add(self, stage: Stage) -> Stage:
        self.stages.append(stage)
        return stage

    def extend(self, stages: Sequence[Stage]) -> None:
        self.stages.extend(stages)

    def _proving(self) -> List[Stage]:
        return [s for s in reversed(self.stages) if s.has_fragment]

    @property
    def labels(self) -> List[str]:
        return [s.label for s in self.stages]

    def _span(self, label: str, phase: str):
        return self.tracer.stage(label, phase) if self.tracer is not None else nullcontext()

    def declare(self, session: Session) -> None:
        for stage in self.stages:
            stage.declare(session)

    def forward(self, trace: Trace) -> Trace:
        for stage in self.stages:
            with self._span(stage.label, "forward"):
                stage.forward(trace)
        return trace

    def prove(self, session: ProverSession) -> List[Tuple[str, bytes]]:
        fragments = []
        for stage in self._proving():
            writer = Writer(session.field, session.group)
            session.transcript.absorb(b"stage", stage.label.encode())
            with self._span(stage.label, "prove"):
                stage.prove(session, writer)
            fragments.append((stage.label, writer.getvalue()))
            logger.debug(f"proved {stage.label}", extra={"stage": stage.label, "bytes": len(writer)})
        return fragments

    def verify(self, session: VerifierSession, fragments: Sequence[Tuple[str, bytes]]) -> None:
        """
        Raises:
            ProofRejected: missing, extra or reordered fragments, or a failed stage
        """
        expected = self._proving()
        if len(fragments) != len(expected):
            raise ProofRejected(f"expected {len(expected)} fragments, got {len(fragments)}")
        for stage, (label, data) in zip(expected, fragments):
            if label != stage.label:
                raise ProofRejected(f"fragment {label!r} where {stage.label!r} was expected")
            reader = Reader(data, session.field, session.group)
            session.transcript.absorb(b"stage", stage.label.encode())
            with self._span(stage.label, "verify"):
                stage.verify(session, reader)
            reader.finish()

    def __repr__(self) -> str:
        return f"<StageChain stages={self.labels}>"


class ViewStage(Stage):
    """Declares a view; forward materializes it, there is nothing to prove"""

    has_fragment = False

    def __init__(self, name: str, view):
        self.label = f"view:{name}"
        self.name = name
        self.view = view

    def declare(self, session: Session) -> None:
        session.declare_view(self.name, self.view)

    def forward(self, trace: Trace) -> None:
        trace[self.name] = self.view.materialize(trace[self.view.parent])

    def prove(self, session: ProverSession, writer: Writer) -> None:
        pass

    def verify(self, session: VerifierSession, reader: Reader) -> None:
        pass
