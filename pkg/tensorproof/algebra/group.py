"""
Prime-order groups behind one interface

Bn254Group is the default (G1 of BN254 through py_ecc). SchnorrGroup is a
small multiplicative subgroup whose order is the 61-bit test prime; it exists
so that commitment-heavy tests stay fast.
"""

from abc import ABC, abstractmethod
from hashlib import sha256
from typing import Any, List, Sequence

from py_ecc import optimized_bn128 as bn128

from ..errors import DecodeError, ShapeError
from .field import BN254_SCALAR, TEST_PRIME, PrimeField

GroupElement = Any


class Group(ABC):
    """Cyclic group of prime order written additively"""

    name: str
    order: int
    element_size: int

    @property
    def scalar_field(self) -> PrimeField:
        return PrimeField(self.order, f"{self.name}-scalars")

    @abstractmethod
    def identity(self) -> GroupElement:
        pass

    @abstractmethod
    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        pass

    @abstractmethod
    def neg(self, a: GroupElement) -> GroupElement:
        pass

    @abstractmethod
    def mul(self, a: GroupElement, k: int) -> GroupElement:
        pass

    @abstractmethod
    def eq(self, a: GroupElement, b: GroupElement) -> bool:
        pass

    @abstractmethod
    def encode(self, a: GroupElement) -> bytes:
        pass

    @abstractmethod
    def decode(self, data: bytes) -> GroupElement:
        pass

    @abstractmethod
    def hash_to_group(self, seed: bytes, tag: bytes, index: int) -> GroupElement:
        """Nothing-up-my-sleeve element derived from (seed, tag, index)"""
        pass

    def double(self, a: GroupElement) -> GroupElement:
        return self.add(a, a)

    def sub(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return self.add(a, self.neg(b))

    def sum(self, elements: Sequence[GroupElement]) -> GroupElement:
        acc = self.identity()
        for e in elements:
            acc = self.add(acc, e)
        return acc

    def is_identity(self, a: GroupElement) -> bool:
        return self.eq(a, self.identity())

    def msm(self, scalars: Sequence[int], bases: Sequence[GroupElement]) -> GroupElement:
        from .msm import pippenger_msm

        return pippenger_msm(self, scalars, bases)

    def encode_many(self, elements: Sequence[GroupElement]) -> bytes:
        return b"".join(self.encode(e) for e in elements)

    def decode_many(self, data: bytes, count: int) -> List[GroupElement]:
        if len(data) != count * self.element_size:
            raise DecodeError(f"expected {count} group elements")
        size = self.element_size
        return [self.decode(data[i * size:(i + 1) * size]) for i in range(count)]

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.name}>"


def _seed_hash(seed: bytes, tag: bytes, index: int, counter: int) -> bytes:
    return sha256(
        b"tensorproof.generator"
        + len(seed).to_bytes(4, "little") + seed
        + len(tag).to_bytes(4, "little") + tag
        + index.to_bytes(8, "little")
        + counter.to_bytes(4, "little")
    ).digest()


class Bn254Group(Group):
    """
    BN254 G1 with 32-byte compressed points

    Encoding: big-endian x coordinate; bit 7 of the first byte carries the
    parity of y, bit 6 marks the point at infinity.
    """

    name = "bn254"
    order = BN254_SCALAR
    element_size = 32

    _Q = bn128.field_modulus
    _FLAG_ODD = 0x80
    _FLAG_INF = 0x40

    def identity(self) -> GroupElement:
        return bn128.Z1

    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return bn128.add(a, b)

    def double(self, a: GroupElement) -> GroupElement:
        return bn128.double(a)

    def neg(self, a: GroupElement) -> GroupElement:
        return bn128.neg(a)

    def mul(self, a: GroupElement, k: int) -> GroupElement:
        k %= self.order
        if k == 0 or bn128.is_inf(a):
            return bn128.Z1
        return bn128.multiply(a, k)

    def eq(self, a: GroupElement, b: GroupElement) -> bool:
        return bn128.eq(a, b)

    def is_identity(self, a: GroupElement) -> bool:
        return bn128.is_inf(a)

    def generator(self) -> GroupElement:
        return bn128.G1

    def encode(self, a: GroupElement) -> bytes:
        if bn128.is_inf(a):
            out = bytearray(32)
            out[0] = self._FLAG_INF
            return bytes(out)
        x, y = bn128.normalize(a)
        out = bytearray(int(x.n).to_bytes(32, "big"))
        if int(y.n) & 1:
            out[0] |= self._FLAG_ODD
        return bytes(out)

    def decode(self, data: bytes) -> GroupElement:
        if len(data) != 32:
            raise DecodeError("bn254 point needs 32 bytes")
        flags = data[0] & 0xC0
        body = bytes([data[0] & 0x3F]) + data[1:]
        x = int.from_bytes(body, "big")
        if flags & self._FLAG_INF:
            if x != 0 or flags & self._FLAG_ODD:
                raise DecodeError("malformed point at infinity")
            return bn128.Z1
        if x >= self._Q:
            raise DecodeError("x coordinate out of range")
        y = self._lift_x(x)
        if y is None:
            raise DecodeError("x is not on the curve")
        if (y & 1) != bool(flags & self._FLAG_ODD):
            y = self._Q - y
        return (bn128.FQ(x), bn128.FQ(y), bn128.FQ.one())

    def _lift_x(self, x: int):
        q = self._Q
        rhs = (pow(x, 3, q) + 3) % q
        y = pow(rhs, (q + 1) // 4, q)
        if y * y % q != rhs:
            return None
        return y

    def hash_to_group(self, seed: bytes, tag: bytes, index: int) -> GroupElement:
        counter = 0
        while True:
            x = int.from_bytes(_seed_hash(seed, tag, index, counter), "big") % self._Q
            y = self._lift_x(x)
            if y is not None and y != 0:
                if y & 1:
                    y = self._Q - y
                return (bn128.FQ(x), bn128.FQ(y), bn128.FQ.one())
            counter += 1


class SchnorrGroup(Group):
    """
    Order-p subgroup of Z_q^* with q = k*p + 1

    Only meant for tests: the discrete log is easy at this size.
    """

    def __init__(self, name: str, order: int, modulus: int, cofactor: int):
        if cofactor * order + 1 != modulus:
            raise ShapeError("modulus must equal cofactor * order + 1")
        self.name = name
        self.order = order
        self.modulus = modulus
        self.cofactor = cofactor
        self.element_size = (modulus.bit_length() + 7) // 8

    def identity(self) -> GroupElement:
        return 1

    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return a * b % self.modulus

    def neg(self, a: GroupElement) -> GroupElement:
        return pow(a, -1, self.modulus)

    def mul(self, a: GroupElement, k: int) -> GroupElement:
        return pow(a, k % self.order, self.modulus)

    def eq(self, a: GroupElement, b: GroupElement) -> bool:
        return a == b

    def msm(self, scalars: Sequence[int], bases: Sequence[GroupElement]) -> GroupElement:
        if len(scalars) != len(bases):
            raise ShapeError(f"msm length mismatch: {len(scalars)} scalars, {len(bases)} bases")
        q, p = self.modulus, self.order
        acc = 1
        for s, b in zip(scalars, bases):
            s = int(s) % p
            if s:
                acc = acc * pow(b, s, q) % q
        return acc

    def encode(self, a: GroupElement) -> bytes:
        return int(a).to_bytes(self.element_size, "big")

    def decode(self, data: bytes) -> GroupElement:
        if len(data) != self.element_size:
            raise DecodeError(f"group element needs {self.element_size} bytes")
        v = int.from_bytes(data, "big")
        if not 0 < v < self.modulus or pow(v, self.order, self.modulus) != 1:
            raise DecodeError("not a subgroup element")
        return v

    def hash_to_group(self, seed: bytes, tag: bytes, index: int) -> GroupElement:
        counter = 0
        while True:
            h = int.from_bytes(_seed_hash(seed, tag, index, counter), "big") % self.modulus
            g = pow(h, self.cofactor, self.modulus) if h else 1
            if g != 1:
                return g
            counter += 1


TOY61 = SchnorrGroup(
    name="toy61",
    order=TEST_PRIME,
    modulus=170141183460469231851591140194996191149,
    cofactor=73786976294838206548,
)

BN254 = Bn254Group()

_GROUPS = {"bn254": BN254, "toy61": TOY61}


def get_group(name: str) -> Group:
    try:
        return _GROUPS[name]
    except KeyError:
        raise DecodeError(f"unknown group: {name}") from None
