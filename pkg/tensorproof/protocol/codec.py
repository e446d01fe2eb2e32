"""
Binary codec for proof material

Everything is little-endian and length-prefixed. Field elements use the
field's fixed width; group elements use the group's compressed encoding.
Readers raise DecodeError on truncation, trailing bytes and non-canonical
values so malformed input is never mistaken for a rejected proof.
"""

from typing import List, Sequence
import struct

from ..algebra.field import PrimeField
from ..algebra.group import Group, GroupElement
from ..errors import DecodeError
from ..polycommit.hyrax import EvalProof, TensorCommitment
from ..polycommit.ipa import InnerProductProof
from ..sumcheck.engine import SumcheckProof

MAGIC = b"ZKT1"
VERSION = 1

KIND_PUBLIC_PARAMS = 1
KIND_COMMITMENTS = 2
KIND_PROOF = 3
KIND_WEIGHTS = 4

KIND_NAMES = {
    KIND_PUBLIC_PARAMS: "public-params",
    KIND_COMMITMENTS: "commitments",
    KIND_PROOF: "proof",
    KIND_WEIGHTS: "weights",
}


class Writer:
    """Append-only encoder"""

    def __init__(self, field: PrimeField, group: Group):
        self.field = field
        self.group = group
        self._parts: List[bytes] = []

    def getvalue(self) -> bytes:
        return b"".join(self._parts)

    def __len__(self) -> int:
        return sum(len(p) for p in self._parts)

    def raw(self, data: bytes) -> None:
        self._parts.append(bytes(data))

    def u8(self, v: int) -> None:
        self.raw(struct.pack("<B", v))

    def u16(self, v: int) -> None:
        self.raw(struct.pack("<H", v))

    def u32(self, v: int) -> None:
        self.raw(struct.pack("<I", v))

    def u64(self, v: int) -> None:
        self.raw(struct.pack("<Q", v))

    def blob(self, data: bytes) -> None:
        self.u32(len(data))
        self.raw(data)

    def text(self, s: str) -> None:
        self.blob(s.encode("utf-8"))

    def scalar(self, v: int) -> None:
        self.raw(self.field.encode(v))

    def scalars(self, values: Sequence[int]) -> None:
        self.u32(len(values))
        for v in values:
            self.scalar(v)

    def point(self, g: GroupElement) -> None:
        self.raw(self.group.encode(g))

    def points(self, elements: Sequence[GroupElement]) -> None:
        self.u32(len(elements))
        for g in elements:
            self.point(g)

    def commitment(self, c: TensorCommitment) -> None:
        self.u8(c.num_vars)
        self.points(c.row_commitments)

    def sumcheck(self, proof: SumcheckProof, private_names: Sequence[str]) -> None:
        width = max((len(p) for p in proof.round_polys), default=0)
        self.u16(len(proof.round_polys))
        self.u8(width)
        for coeffs in proof.round_polys:
            for c in list(coeffs) + [0] * (width - len(coeffs)):
                self.scalar(c)
        self.scalars([proof.final_claims[n] for n in private_names])

    def eval_proof(self, proof: EvalProof) -> None:
        self.scalar(proof.claimed_value)
        self.points(proof.inner.left)
        self.points(proof.inner.right)
        self.point(proof.inner.closing)
        self.scalar(proof.inner.z1)
        self.scalar(proof.inner.z2)


class Reader:
    """Cursor over encoded bytes"""

    def __init__(self, data: bytes, field: PrimeField, group: Group):
        self.data = bytes(data)
        self.field = field
        self.group = group
        self.pos = 0

    @property
    def remaining(self) -> int:
        return len(self.data) - self.pos

    def raw(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise DecodeError(f"truncated input: wanted {n} bytes at offset {self.pos}")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def finish(self) -> None:
        if self.remaining:
            raise DecodeError(f"{self.remaining} trailing bytes")

    def u8(self) -> int:
        return struct.unpack("<B", self.raw(1))[0]

    def u16(self) -> int:
        return struct.unpack("<H", self.raw(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.raw(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.raw(8))[0]

    def blob(self) -> bytes:
        return self.raw(self.u32())

    def text(self) -> str:
        try:
            return self.blob().decode("utf-8")
        except UnicodeDecodeError as e:
            raise DecodeError(f"invalid text: {e}")

    def _count(self, item_size: int) -> int:
        n = self.u32()
        if n * item_size > self.remaining:
            raise DecodeError(f"list of {n} items overruns the input")
        return n

    def scalar(self) -> int:
        return self.field.decode(self.raw(self.field.byte_width))

    def scalars(self) -> List[int]:
        return [self.scalar() for _ in range(self._count(self.field.byte_width))]

    def point(self) -> GroupElement:
        return self.group.decode(self.raw(self.group.element_size))

    def points(self) -> List[GroupElement]:
        return [self.point() for _ in range(self._count(self.group.element_size))]

    def commitment(self) -> TensorCommitment:
        num_vars = self.u8()
        return TensorCommitment(self.group, num_vars, self.points())

    def sumcheck(self, private_names: Sequence[str]) -> SumcheckProof:
        rounds = self.u16()
        width = self.u8()
        if rounds * width * self.field.byte_width > self.remaining:
            raise DecodeError("sumcheck rounds overrun the input")
        polys = [[self.scalar() for _ in range(width)] for _ in range(rounds)]
        finals = self.scalars()
        if len(finals) != len(private_names):
            raise DecodeError(f"expected {len(private_names)} final claims, got {len(finals)}")
        return SumcheckProof(round_polys=polys, final_claims=dict(zip(private_names, finals)))

    def eval_proof(self) -> EvalProof:
        y = self.scalar()
        left = self.points()
        right = self.points()
        closing = self.point()
        z1 = self.scalar()
        z2 = self.scalar()
        return EvalProof(y, InnerProductProof(left, right, closing, z1, z2))


def write_header(w: Writer, kind: int) -> None:
    w.raw(MAGIC)
    w.u16(VERSION)
    w.u8(kind)


def read_header(r: Reader, kind: int) -> None:
    if r.raw(4) != MAGIC:
        raise DecodeError("bad magic")
    version = r.u16()
    if version != VERSION:
        raise DecodeError(f"unsupported version {version}")
    found = r.u8()
    if found != kind:
        raise DecodeError(
            f"expected a {KIND_NAMES.get(kind, kind)} file, got {KIND_NAMES.get(found, found)}"
        )
