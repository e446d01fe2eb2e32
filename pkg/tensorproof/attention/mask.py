"""
Key masking for right-padded prompts

Padding key columns get the score `fill`, chosen so that after the row
shift every masked entry lands in the indicator segments: its softmax
output is exactly 0 and the padded rows never reach a real position.

    Zm = Z ⊙ keep + fill · (1 − keep)

`keep` is public (it only depends on the prompt length) and is broadcast
along the key axis.
"""

from typing import Tuple
import logging
import math

import numpy as np

from ..errors import ParamError, ShapeError
from ..protocol.arith import COLS, EQ, Factor, prove_relation, verify_relation
from ..protocol.codec import Reader, Writer
from ..protocol.session import ProverSession, Session, VerifierSession
from ..protocol.stage import Stage, Trace
from .params import ZkAttnParams

logger = logging.getLogger(__name__)


def key_mask(length: int, seq: int) -> np.ndarray:
    """1 for the `length` real positions of a row of `seq`, 0 for padding"""
    if not 0 < length <= seq:
        raise ShapeError(f"prompt length {length} does not fit {seq} rows")
    keep = np.zeros(seq, dtype=np.int64)
    keep[:length] = 1
    return keep


def mask_fill(params: ZkAttnParams, quotient_bits: int) -> int:
    """
    Score for masked keys, given scores in [−S, S) with S = 2^(quotient_bits−1)

    Every row shift ẑ lies in [−S, S + T·ln n], so ẑ − fill falls in
    [B_{K−M}, B) for fill = −S − B_{K−M}.

    Raises:
        ParamError: B is too small to hold the masked entries
    """
    s = 1 << (quotient_bits - 1)
    fill = -s - params.top_start
    worst_shift = s + math.ceil(params.temperature * math.log(max(params.n, 1))) + 1
    if worst_shift - fill >= params.bound:
        raise ParamError(
            f"radices bound B={params.bound} cannot hold masked scores; "
            f"need more than {worst_shift - fill}"
        )
    logger.debug(f"masked keys score {fill}", extra={"bound": params.bound, "top_start": params.top_start})
    return fill


class KeyMaskStage(Stage):
    """Zm = Z ⊙ keep + fill · (1 − keep) over (..., rows, keys)"""

    def __init__(self, label: str, src: str, keep: str, out: str, shape: Tuple[int, ...], fill: int):
        self.label = label
        self.src, self.keep, self.out = src, keep, out
        self.out_shape = tuple(shape)
        self.fill = fill
        self.cols = self.out_shape[-1]
        self.rows = math.prod(self.out_shape[:-1])

    def declare(self, session: Session) -> None:
        session.declare(self.out, self.out_shape)

    def forward(self, trace: Trace) -> None:
        keep = np.asarray(trace[self.keep], dtype=np.int64).reshape(self.cols)
        z = np.asarray(trace[self.src], dtype=np.int64).reshape(self.out_shape)
        trace[self.out] = z * keep + self.fill * (1 - keep)

    def _terms(self):
        keep = Factor(self.keep, COLS)
        return [
            (1, (EQ, Factor(self.out))),
            (-1, (EQ, Factor(self.src), keep)),
            (self.fill, (EQ, keep)),
            (-self.fill, (EQ,)),
        ]

    def prove(self, session: ProverSession, writer: Writer) -> None:
        prove_relation(session, writer, self.label, self.rows, self.cols, self._terms())

    def verify(self, session: VerifierSession, reader: Reader) -> None:
        verify_relation(session, reader, self.label, self.rows, self.cols, self._terms())
