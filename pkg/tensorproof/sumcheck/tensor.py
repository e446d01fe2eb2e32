"""
Field tensors with power-of-two padded dimensions
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..algebra.field import PrimeField
from ..errors import ShapeError


def next_pow2(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


def log2_exact(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ShapeError(f"{n} is not a power of two")
    return n.bit_length() - 1


def is_pow2(n: int) -> bool:
    return n >= 1 and not n & (n - 1)


def pad_to_pow2(values: np.ndarray, fill: int = 0) -> np.ndarray:
    """Pad every axis of an integer array up to a power of two"""
    target = tuple(next_pow2(s) for s in values.shape)
    if target == values.shape:
        return values
    out = np.full(target, fill, dtype=values.dtype)
    out[tuple(slice(0, s) for s in values.shape)] = values
    return out


@dataclass
class Tensor:
    """Row-major field tensor, every dimension a power of two"""

    data: np.ndarray
    field: PrimeField
    scale_log2: int = 0

    def __post_init__(self):
        for s in self.data.shape:
            if not is_pow2(s):
                raise ShapeError(f"dimension {s} is not a power of two")

    @classmethod
    def from_ints(
        cls,
        values,
        field: PrimeField,
        scale_log2: int = 0,
        shape: Optional[Sequence[int]] = None,
    ) -> "Tensor":
        """Zero-pad integer values per dimension and map them into the field"""
        arr = np.asarray(values, dtype=object)
        if shape is not None:
            arr = arr.reshape(tuple(shape))
        if arr.ndim == 0:
            arr = arr.reshape(1)
        arr = pad_to_pow2(arr, 0)
        return cls(field.array(arr), field, scale_log2)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def num_vars(self) -> int:
        return log2_exact(self.size)

    def flat(self) -> np.ndarray:
        return self.data.reshape(-1)

    def signed(self) -> np.ndarray:
        half = self.field.modulus // 2
        p = self.field.modulus
        return np.array([v - p if v > half else v for v in self.flat().tolist()], dtype=object).reshape(self.shape)
