"""
Tensor views

A view is a tensor defined by re-indexing a parent: a transpose, a slice, a
zero-padded pairing. Views are never committed. A claim Ṽ(p) = y on a view
maps to a claim on the parent: Ṽ(p) = coef · P̃(p') for a parent point p'
and a scalar coef that the view computes from p.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..algebra.field import PrimeField
from ..errors import ShapeError
from ..sumcheck.mle import bits_of
from ..sumcheck.tensor import log2_exact


class View(ABC):
    """Derived tensor over a named parent"""

    parent: str

    @property
    @abstractmethod
    def shape(self) -> Tuple[int, ...]:
        pass

    @abstractmethod
    def map_point(self, point: Sequence[int], field: PrimeField) -> Tuple[List[int], int]:
        """(parent point, coefficient) for a point on the view"""
        pass

    @abstractmethod
    def materialize(self, parent_values: np.ndarray) -> np.ndarray:
        pass


def _split_bits(point: Sequence[int], dims: Sequence[int]) -> List[List[int]]:
    groups, at = [], 0
    for d in dims:
        width = log2_exact(d)
        groups.append(list(point[at : at + width]))
        at += width
    return groups


@dataclass
class AxisPermutation(View):
    """
    Reshape the parent to parent_shape, then transpose by perm

    Axis k of the view is axis perm[k] of the reshaped parent. With `reshape`
    set the transposed tensor is viewed in that shape (merging heads back
    into a matrix); the flat order, and so every point, is unchanged.
    """

    parent: str
    parent_shape: Tuple[int, ...]
    perm: Tuple[int, ...]
    reshape: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.parent_shape))):
            raise ShapeError(f"{self.perm} is not a permutation of {len(self.parent_shape)} axes")
        if self.reshape is not None and int(np.prod(self.reshape)) != int(np.prod(self.parent_shape)):
            raise ShapeError(f"cannot view {self.permuted} as {self.reshape}")

    @property
    def permuted(self) -> Tuple[int, ...]:
        return tuple(self.parent_shape[a] for a in self.perm)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.reshape) if self.reshape is not None else self.permuted

    def map_point(self, point: Sequence[int], field: PrimeField) -> Tuple[List[int], int]:
        groups = _split_bits(point, self.permuted)
        parent_groups: List[List[int]] = [[] for _ in self.parent_shape]
        for k, axis in enumerate(self.perm):
            parent_groups[axis] = groups[k]
        return [x for g in parent_groups for x in g], 1

    def materialize(self, parent_values: np.ndarray) -> np.ndarray:
        out = parent_values.reshape(self.parent_shape).transpose(self.perm)
        return out.reshape(self.shape)


@dataclass
class RowPrefix(View):
    """The first `rows` rows of a matrix"""

    parent: str
    parent_shape: Tuple[int, int]
    rows: int

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.rows,) + tuple(self.parent_shape[1:])

    def map_point(self, point: Sequence[int], field: PrimeField) -> Tuple[List[int], int]:
        pad = log2_exact(self.parent_shape[0]) - log2_exact(self.rows)
        return [0] * pad + list(point), 1

    def materialize(self, parent_values: np.ndarray) -> np.ndarray:
        return parent_values.reshape(self.parent_shape)[: self.rows]


@dataclass
class PairWithZero(View):
    """Append a trailing axis of size 2 holding (x, 0)"""

    parent: str
    parent_shape: Tuple[int, ...]

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.parent_shape) + (2,)

    def map_point(self, point: Sequence[int], field: PrimeField) -> Tuple[List[int], int]:
        return list(point[:-1]), (1 - point[-1]) % field.modulus

    def materialize(self, parent_values: np.ndarray) -> np.ndarray:
        base = parent_values.reshape(self.parent_shape)
        return np.stack([base, np.zeros_like(base)], axis=-1)


@dataclass
class SelectColumn(View):
    """parent[..., column]"""

    parent: str
    parent_shape: Tuple[int, ...]
    column: int

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.parent_shape[:-1])

    def map_point(self, point: Sequence[int], field: PrimeField) -> Tuple[List[int], int]:
        return list(point) + bits_of(self.column, log2_exact(self.parent_shape[-1])), 1

    def materialize(self, parent_values: np.ndarray) -> np.ndarray:
        return parent_values.reshape(self.parent_shape)[..., self.column]


@dataclass
class LayerSlice(View):
    """One layer of a stacked tensor"""

    parent: str
    parent_shape: Tuple[int, ...]
    index: int

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.parent_shape[1:])

    def map_point(self, point: Sequence[int], field: PrimeField) -> Tuple[List[int], int]:
        return bits_of(self.index, log2_exact(self.parent_shape[0])) + list(point), 1

    def materialize(self, parent_values: np.ndarray) -> np.ndarray:
        return parent_values.reshape(self.parent_shape)[self.index]
