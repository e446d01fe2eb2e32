"""
Lookup tables

Tables are public and deterministic: both sides rebuild them from a TableSpec.
A table with a non-power-of-two number of rows is padded by repeating its
first row, which leaves the set of rows unchanged.
"""

from dataclasses import dataclass, field
from typing import Hashable, List, Optional, Sequence, Tuple

import numpy as np

from ..algebra.field import PrimeField
from ..errors import RangeError, ShapeError
from ..polycommit.hyrax import TensorCommitment
from ..sumcheck.tensor import next_pow2


def pad_column(values: np.ndarray, size: Optional[int] = None) -> np.ndarray:
    values = np.asarray(values).reshape(-1)
    size = size or next_pow2(len(values))
    if len(values) == size:
        return values
    if len(values) > size:
        raise ShapeError(f"table of {len(values)} rows does not fit {size}")
    return np.concatenate([values, np.full(size - len(values), values[0], dtype=values.dtype)])


@dataclass
class LookupTable:
    """Table columns as field vectors of equal power-of-two length"""

    columns: List[np.ndarray]
    commitments: List[TensorCommitment] = field(default_factory=list)
    raw_size: int = 0

    @property
    def size(self) -> int:
        return len(self.columns[0])

    @property
    def width(self) -> int:
        return len(self.columns)

    @property
    def entries(self) -> np.ndarray:
        return self.columns[0]

    def combined(self, weights: Sequence[int], field: PrimeField) -> np.ndarray:
        p = field.modulus
        out = self.columns[0] * weights[0] % p
        for w, col in zip(weights[1:], self.columns[1:]):
            out = (out + col * w) % p
        return out

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], field: PrimeField) -> "LookupTable":
        raw = [np.asarray(c, dtype=object).reshape(-1) for c in columns]
        lengths = {len(c) for c in raw}
        if len(lengths) != 1 or 0 in lengths:
            raise ShapeError("table columns must be non-empty and of equal length")
        raw_size = lengths.pop()
        return cls([field.array(pad_column(c)) for c in raw], raw_size=raw_size)


@dataclass(frozen=True)
class TableSpec:
    """
    Recipe for a public table

    key identifies the table within a session; columns hold the raw integer
    rows (input column first, then outputs).
    """

    key: Hashable
    columns: Tuple[np.ndarray, ...] = field(compare=False, hash=False)

    @property
    def raw_size(self) -> int:
        return len(self.columns[0])

    @property
    def width(self) -> int:
        return len(self.columns)

    def build(self, field: PrimeField) -> LookupTable:
        return LookupTable.from_columns(self.columns, field)


def range_table(lo: int, hi: int) -> TableSpec:
    """Every integer in [lo, hi]"""
    if hi < lo:
        raise ShapeError(f"empty range [{lo}, {hi}]")
    return TableSpec(("range", lo, hi), (np.arange(lo, hi + 1, dtype=np.int64),))


def function_table(name: str, xs: np.ndarray, ys: Sequence[int], *params) -> TableSpec:
    """Rows (x, f(x)); params make the key unique per parameterization"""
    xs = np.asarray(xs)
    ys = np.asarray(ys, dtype=object)
    if xs.shape != ys.shape:
        raise ShapeError("function table columns differ in length")
    return TableSpec(("fn", name, int(xs[0]), int(xs[-1])) + tuple(params), (xs, ys))


def apply_function(spec: TableSpec, values: np.ndarray) -> np.ndarray:
    """
    Evaluate a function table on integer inputs

    Raises:
        RangeError: an input is outside the table's domain
    """
    xs, ys = spec.columns[0], spec.columns[1]
    lo = int(xs[0])
    idx = np.asarray(values, dtype=np.int64) - lo
    outside = np.flatnonzero(((idx < 0) | (idx >= len(xs))).reshape(-1))
    if outside.size:
        bad = int(np.asarray(values).reshape(-1)[outside[0]])
        raise RangeError(f"{spec.key[1]} input {bad} outside [{lo}, {int(xs[-1])}]")
    return np.asarray(ys, dtype=np.int64)[idx]
