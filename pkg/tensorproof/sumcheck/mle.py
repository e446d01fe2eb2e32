"""
Multilinear extensions and the eq kernel

Point convention: point[0] addresses the most significant bit of the
row-major flat index, so a matrix point lists its row coordinates first.
"""

from typing import Sequence, Union

import numpy as np

from ..algebra.field import PrimeField
from ..errors import ShapeError
from .tensor import Tensor, log2_exact


def fold(values: np.ndarray, r: int, p: int) -> np.ndarray:
    """Bind the leading variable to r"""
    half = len(values) // 2
    lo, hi = values[:half], values[half:]
    return (lo + r * (hi - lo)) % p


def mle_evaluate_flat(values: np.ndarray, point: Sequence[int], field: PrimeField) -> int:
    values = np.asarray(values, dtype=object).reshape(-1)
    if len(point) != log2_exact(len(values)):
        raise ShapeError(f"point has {len(point)} coordinates, tensor has {len(values)} entries")
    p = field.modulus
    acc = values % p
    for r in point:
        acc = fold(acc, int(r), p)
    return int(acc[0])


def mle_evaluate(t: Union[Tensor, np.ndarray], point: Sequence[int], field: PrimeField = None) -> int:
    """Value of the multilinear extension of t at point, in one pass"""
    if isinstance(t, Tensor):
        return mle_evaluate_flat(t.flat(), point, t.field)
    if field is None:
        raise ShapeError("a field is required for raw arrays")
    return mle_evaluate_flat(t, point, field)


def eq_eval(u: Sequence[int], v: Sequence[int], field: PrimeField) -> int:
    if len(u) != len(v):
        raise ShapeError(f"eq of points with {len(u)} and {len(v)} coordinates")
    p = field.modulus
    acc = 1
    for a, b in zip(u, v):
        acc = acc * ((a * b + (1 - a) * (1 - b)) % p) % p
    return acc


def eq_table(u: Sequence[int], field: PrimeField) -> np.ndarray:
    """eq(u, i) for every boolean i, first coordinate most significant"""
    p = field.modulus
    table = np.empty(1, dtype=object)
    table[0] = 1
    for ui in u:
        ui = int(ui) % p
        table = np.stack([table * ((1 - ui) % p) % p, table * ui % p], axis=1).reshape(-1)
    return table


def bits_of(index: int, width: int) -> list:
    """Boolean point of an index, most significant bit first"""
    return [(index >> (width - 1 - j)) & 1 for j in range(width)]
