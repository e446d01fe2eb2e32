"""
Quantized forward pass

The forward pass is the stage schedule run forward on integer tensors, so
the trace it returns is exactly the witness the prover commits.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from ..config import ProverConfig
from ..errors import ShapeError
from ..protocol.stage import StageChain, Trace
from ..sumcheck.tensor import next_pow2
from ..attention.mask import key_mask
from .schedule import KEYS, LOGITS, ONEHOT, ModelSchedule, build_schedule
from .weights import WeightSet

logger = logging.getLogger(__name__)


@dataclass
class ModelOutput:
    """Public output of one forward pass"""

    tokens: List[int]
    logits: np.ndarray  # (R, vocab) at scale γ²
    scale_log2: int
    next_token: int

    @property
    def seq(self) -> int:
        return self.logits.shape[0]


def padded_length(num_tokens: int) -> int:
    return next_pow2(max(1, num_tokens))


def one_hot(tokens: Sequence[int], vocab: int, seq: int) -> np.ndarray:
    """(seq, vocab) indicator rows; padding rows select token 0"""
    out = np.zeros((seq, vocab), dtype=np.int64)
    padded = list(tokens) + [0] * (seq - len(tokens))
    out[np.arange(seq), padded] = 1
    return out


def check_prompt(tokens: Sequence[int], config: ProverConfig) -> None:
    """
    Raises:
        ShapeError: empty or too long prompt, or a token outside the vocabulary
    """
    m = config.model
    if not tokens:
        raise ShapeError("prompt is empty")
    if len(tokens) > m.max_seq:
        raise ShapeError(f"prompt of {len(tokens)} tokens exceeds max_seq={m.max_seq}")
    bad = [t for t in tokens if not 0 <= int(t) < m.vocab]
    if bad:
        raise ShapeError(f"token {bad[0]} outside the vocabulary of {m.vocab}")


def greedy_token(logits: np.ndarray, num_tokens: int) -> int:
    """argmax of the last real row, lowest index on ties"""
    return int(np.argmax(np.asarray(logits)[num_tokens - 1]))


def initial_trace(weights: WeightSet, tokens: Sequence[int], seq: int) -> Trace:
    trace: Trace = dict(weights.tensors)
    trace[ONEHOT] = one_hot(tokens, weights.config.vocab, seq)
    trace[KEYS] = key_mask(len(tokens), seq)
    return trace


def forward(
    weights: WeightSet,
    tokens: Sequence[int],
    config: Optional[ProverConfig] = None,
    tracer=None,
) -> Tuple[ModelOutput, Trace]:
    """
    Deterministic fixed-point forward pass

    Returns the public output and the full integer trace.

    Raises:
        ShapeError: bad prompt
        RangeError: an intermediate value leaves its table domain
    """
    config = config or ProverConfig(model=weights.config)
    tokens = [int(t) for t in tokens]
    check_prompt(tokens, config)
    schedule = build_schedule(config, padded_length(len(tokens)))
    return run_schedule(schedule, weights, tokens, tracer)


def run_schedule(schedule: ModelSchedule, weights: WeightSet, tokens: List[int], tracer=None) -> Tuple[ModelOutput, Trace]:
    trace = initial_trace(weights, tokens, schedule.seq)
    chain = StageChain(tracer)
    chain.extend(schedule.stages)
    chain.forward(trace)
    logits = np.asarray(trace[LOGITS], dtype=np.int64)
    output = ModelOutput(
        tokens=tokens,
        logits=logits,
        scale_log2=2 * schedule.config.model.gamma_log2,
        next_token=greedy_token(logits, len(tokens)),
    )
    logger.debug(
        f"forward pass over {len(tokens)} tokens",
        extra={"seq": schedule.seq, "next_token": output.next_token},
    )
    return output, trace
