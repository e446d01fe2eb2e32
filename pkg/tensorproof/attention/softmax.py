"""
Fixed-point softmax witness

Rows are shifted by ẑ = round(T·logsumexp(z/T)) so that after the shift the
exponentials already sum to about θ; nothing divides. ẑ itself is never
proved: the row-sum range check on ŷ is what keeps it honest.
"""

from dataclasses import dataclass
from typing import List
import logging

import numpy as np

from ..errors import RangeError
from .params import ZkAttnParams, decompose_digits
from .tables import SegmentTables

logger = logging.getLogger(__name__)


@dataclass
class AttnWitness:
    z: np.ndarray  # (rows, n)
    z_hat: np.ndarray  # (rows,)
    z_prime: np.ndarray  # z − ẑ, in (−B, 0]
    digits: List[np.ndarray]  # K tensors (rows, n)
    outputs: List[np.ndarray]  # K − L tensors (rows, n), segment k at index k − L
    y: np.ndarray  # (rows, n) at scale θ
    y_hat: np.ndarray  # (rows,)


def row_shift(z: np.ndarray, temp: float) -> np.ndarray:
    """round(T · logsumexp(z/T)) per row, ties to even"""
    scaled = np.asarray(z, dtype=np.float64) / temp
    top = scaled.max(axis=-1, keepdims=True)
    lse = top[..., 0] + np.log(np.exp(scaled - top).sum(axis=-1))
    return np.rint(temp * lse).astype(np.int64)


def softmax_compute(z: np.ndarray, params: ZkAttnParams, tables: SegmentTables) -> AttnWitness:
    """
    Quantized softmax of every row of z (the last axis)

    Raises:
        RangeError: a shifted logit reaches −B, or a row sum leaves [θ−E, θ+E]
    """
    z = np.asarray(z, dtype=np.int64)
    rows = z.reshape(-1, z.shape[-1])
    z_hat = row_shift(rows, params.temperature)
    z_prime = rows - z_hat[:, None]
    if z_prime.max() > 0:
        raise RangeError("row shift fell below the row maximum")
    if z_prime.min() <= -params.bound:
        raise RangeError(
            f"shifted logit {int(z_prime.min())} is outside (−{params.bound}, 0]; widen the top segments"
        )
    digits = decompose_digits(-z_prime, params.radices)
    outputs = []
    y = np.ones_like(rows)
    for k in range(params.low, params.segments):
        column = np.asarray(tables.output(k, params).columns[1], dtype=np.int64)
        out = column[digits[k]]
        outputs.append(out)
        y = y * out
    y_hat = y.sum(axis=1)
    lo, hi = params.theta - params.tolerance, params.theta + params.tolerance
    bad = np.flatnonzero((y_hat < lo) | (y_hat > hi))
    if bad.size:
        raise RangeError(f"row {int(bad[0])} sums to {int(y_hat[bad[0]])}, outside [{lo}, {hi}]")
    logger.debug(
        f"softmax over {rows.shape[0]} rows",
        extra={"rows": rows.shape[0], "cols": rows.shape[1], "min_shift": int(z_prime.min())},
    )
    return AttnWitness(
        z=rows,
        z_hat=z_hat,
        z_prime=z_prime,
        digits=digits,
        outputs=outputs,
        y=y,
        y_hat=y_hat,
    )
