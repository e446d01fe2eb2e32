"""
Proof sessions, stages, tensor views and the binary codec
"""

from .arith import (
    COLS,
    EQ,
    EQ_ROWS,
    FULL,
    ROWS,
    Factor,
    HadamardStage,
    LinearStage,
    MatmulStage,
    prove_relation,
    verify_relation,
)
from .codec import MAGIC, VERSION, Reader, Writer, read_header, write_header
from .runner import StageProof, prove_stages, verify_stages
from .session import ClaimLedger, ProverSession, Session, VerifierSession
from .stage import CompositeStage, Stage, StageChain, Trace, ViewStage
from .views import AxisPermutation, LayerSlice, PairWithZero, RowPrefix, SelectColumn, View

__all__ = [
    "COLS",
    "EQ",
    "EQ_ROWS",
    "FULL",
    "ROWS",
    "Factor",
    "HadamardStage",
    "LinearStage",
    "MatmulStage",
    "prove_relation",
    "verify_relation",
    "MAGIC",
    "VERSION",
    "Reader",
    "Writer",
    "read_header",
    "write_header",
    "StageProof",
    "prove_stages",
    "verify_stages",
    "ClaimLedger",
    "ProverSession",
    "Session",
    "VerifierSession",
    "CompositeStage",
    "Stage",
    "StageChain",
    "Trace",
    "ViewStage",
    "AxisPermutation",
    "LayerSlice",
    "PairWithZero",
    "RowPrefix",
    "SelectColumn",
    "View",
]
