"""
zkAttn segment tables

Both sides rebuild these from ZkAttnParams; they are never shipped.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from ..lookup.tables import TableSpec, function_table, range_table
from .params import ZkAttnParams


@dataclass(frozen=True)
class SegmentTables:
    digits: List[TableSpec]  # T_X^(k) for every segment
    outputs: List[TableSpec]  # (T_X^(k), T_Y^(k)) for k >= L
    norm: TableSpec  # T_R = [θ − E, θ + E]

    def output(self, k: int, params: ZkAttnParams) -> TableSpec:
        return self.outputs[k - params.low]


def exp_column(params: ZkAttnParams, k: int) -> np.ndarray:
    """round(θ_k · exp(−B^(k)·x/T)) for x in [0, b_k)"""
    xs = np.arange(params.radices[k], dtype=np.float64)
    place = params.cumulative[k]
    return np.rint(params.theta_seg[k] * np.exp(-place * xs / params.temperature)).astype(np.int64)


def build_tables(params: ZkAttnParams) -> SegmentTables:
    digits = [range_table(0, b - 1) for b in params.radices]
    outputs = []
    for k in range(params.low, params.segments):
        xs = np.arange(params.radices[k], dtype=np.int64)
        if k in params.middle:
            ys = exp_column(params, k)
            key = ("exp", params.cumulative[k], params.theta_seg[k], round(params.temperature, 9))
        else:
            ys = (xs == 0).astype(np.int64)
            key = ("indicator",)
        outputs.append(function_table("segment", xs, ys, *key))
    norm = range_table(params.theta - params.tolerance, params.theta + params.tolerance)
    return SegmentTables(digits, outputs, norm)
