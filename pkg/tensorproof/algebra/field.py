"""
Prime field arithmetic

Field elements are plain Python ints kept in canonical form [0, p). Vectors
and tensors of field elements are numpy arrays with dtype=object so that the
arithmetic stays exact at any modulus size.
"""

from dataclasses import dataclass
from random import Random
from typing import Iterable, Sequence, Union

import numpy as np

from ..errors import DecodeError, DivisionByZero

BN254_SCALAR = 21888242871839275222246405745257275088548364400416034343698204186575808495617
TEST_PRIME = 2**61 - 1

ArrayLike = Union[np.ndarray, Sequence[int]]


@dataclass(frozen=True)
class PrimeField:
    """The field F_p"""

    modulus: int
    name: str = "custom"

    @property
    def bits(self) -> int:
        return self.modulus.bit_length()

    @property
    def byte_width(self) -> int:
        return (self.bits + 7) // 8

    def __call__(self, value: int) -> int:
        return int(value) % self.modulus

    # Scalar operations

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def neg(self, a: int) -> int:
        return (-a) % self.modulus

    def inv(self, a: int) -> int:
        a %= self.modulus
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return pow(a, -1, self.modulus)

    def div(self, a: int, b: int) -> int:
        return (a * self.inv(b)) % self.modulus

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.modulus)

    def signed(self, a: int) -> int:
        """Centered lift into (-p/2, p/2]"""
        a %= self.modulus
        return a - self.modulus if a > self.modulus // 2 else a

    def random(self, rng: Random) -> int:
        return rng.randrange(self.modulus)

    def random_nonzero(self, rng: Random) -> int:
        return rng.randrange(1, self.modulus)

    # Vector operations

    def array(self, values: Union[ArrayLike, Iterable[int]]) -> np.ndarray:
        """Canonical object array, shape preserved"""
        arr = np.asarray(values)
        flat = [int(v) % self.modulus for v in arr.reshape(-1).tolist()]
        out = np.empty(len(flat), dtype=object)
        out[:] = flat
        return out.reshape(arr.shape)

    def zeros(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=object)
        out[:] = [0] * n
        return out

    def batch_inverse(self, values: ArrayLike) -> np.ndarray:
        """
        Invert every entry with one field inversion (prefix-product trick)

        Raises:
            DivisionByZero: on the first zero entry, carrying its index
        """
        flat = [int(v) % self.modulus for v in np.asarray(values, dtype=object).reshape(-1).tolist()]
        p = self.modulus
        prefix = [1] * (len(flat) + 1)
        for i, v in enumerate(flat):
            if v == 0:
                raise DivisionByZero("batch inverse of zero", index=i)
            prefix[i + 1] = prefix[i] * v % p

        out = [0] * len(flat)
        running = pow(prefix[-1], -1, p) if flat else 1
        for i in range(len(flat) - 1, -1, -1):
            out[i] = running * prefix[i] % p
            running = running * flat[i] % p

        result = np.empty(len(flat), dtype=object)
        result[:] = out
        return result.reshape(np.asarray(values).shape)

    def dot(self, a: np.ndarray, b: np.ndarray) -> int:
        return int(np.dot(a, b)) % self.modulus

    # Encoding

    def encode(self, a: int) -> bytes:
        return (int(a) % self.modulus).to_bytes(self.byte_width, "little")

    def decode(self, data: bytes) -> int:
        if len(data) != self.byte_width:
            raise DecodeError(f"field element needs {self.byte_width} bytes, got {len(data)}")
        value = int.from_bytes(data, "little")
        if value >= self.modulus:
            raise DecodeError("non-canonical field element")
        return value

    def encode_many(self, values: Iterable[int]) -> bytes:
        return b"".join(self.encode(v) for v in values)


DEFAULT_FIELD = PrimeField(BN254_SCALAR, "bn254-fr")
TEST_FIELD = PrimeField(TEST_PRIME, "m61")


def field_add(a: int, b: int, field: PrimeField = DEFAULT_FIELD) -> int:
    return field.add(a, b)


def field_mul(a: int, b: int, field: PrimeField = DEFAULT_FIELD) -> int:
    return field.mul(a, b)


def field_neg(a: int, field: PrimeField = DEFAULT_FIELD) -> int:
    return field.neg(a)


def field_inv(a: int, field: PrimeField = DEFAULT_FIELD) -> int:
    return field.inv(a)


def batch_inverse(values: ArrayLike, field: PrimeField = DEFAULT_FIELD) -> np.ndarray:
    return field.batch_inverse(values)
