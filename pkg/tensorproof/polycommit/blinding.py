"""
Blinding randomness

A BlindingSource is a SHA-256 keyed stream over a secret seed. Persisting the
seed (the prover's sidecar file) is enough to reproduce every blinder.
"""

from hashlib import sha256
from typing import List, Optional
import secrets

from ..algebra.field import PrimeField


class BlindingSource:
    """Deterministic stream of field elements from a secret seed"""

    def __init__(self, field: PrimeField, seed: Optional[bytes] = None):
        self.field = field
        self.seed = seed if seed is not None else secrets.token_bytes(32)
        self._counter = 0

    def next(self) -> int:
        block = sha256(b"tensorproof.blind" + self.seed + self._counter.to_bytes(8, "little")).digest()
        block += sha256(block).digest()
        self._counter += 1
        return int.from_bytes(block, "little") % self.field.modulus

    def many(self, count: int) -> List[int]:
        return [self.next() for _ in range(count)]

    def fork(self, label: str) -> "BlindingSource":
        """Independent stream for one named tensor"""
        return BlindingSource(self.field, sha256(self.seed + b"/" + label.encode()).digest())


class ZeroBlinding(BlindingSource):
    """No hiding; used for public tables"""

    def __init__(self, field: PrimeField):
        super().__init__(field, b"\x00" * 32)

    def next(self) -> int:
        return 0

    def fork(self, label: str) -> "BlindingSource":
        return self
