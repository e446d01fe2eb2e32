"""
Fiat-Shamir transcript

The state is a SHA-256 chain over length-framed (label, message) pairs.
Challenges also absorb the round counter so two successive challenges under
the same label differ.
"""

from hashlib import sha256
from typing import Iterable, List, Sequence
import random

from .field import PrimeField


def _frame(data: bytes) -> bytes:
    return len(data).to_bytes(8, "little") + data


class Transcript:
    """Hash transcript shared by prover and verifier"""

    def __init__(self, field: PrimeField, label: bytes = b"tensorproof"):
        self.field = field
        self.state = sha256(b"tensorproof.transcript" + _frame(label)).digest()
        self.round_counter = 0

    def absorb(self, label: bytes, data: bytes) -> None:
        self.state = sha256(self.state + b"A" + _frame(label) + _frame(data)).digest()

    def absorb_scalars(self, label: bytes, values: Iterable[int]) -> None:
        self.absorb(label, self.field.encode_many(values))

    def absorb_int(self, label: bytes, value: int) -> None:
        self.absorb(label, int(value).to_bytes(8, "little", signed=True))

    def _draw(self, label: bytes) -> int:
        counter = self.round_counter.to_bytes(8, "little")
        seed = sha256(self.state + b"C" + _frame(label) + counter).digest()
        wide = sha256(seed + b"\x00").digest() + sha256(seed + b"\x01").digest()
        self.state = sha256(self.state + b"R" + seed).digest()
        return int.from_bytes(wide, "little") % self.field.modulus

    def challenge(self, label: bytes) -> int:
        value = self._draw(label)
        self.round_counter += 1
        return value

    def challenges(self, label: bytes, count: int) -> List[int]:
        return [self.challenge(label) for _ in range(count)]

    def challenge_nonzero(self, label: bytes) -> int:
        while True:
            value = self.challenge(label)
            if value:
                return value


class InteractiveTranscript(Transcript):
    """
    Challenges come from a seeded RNG instead of the hash state

    Stands in for a live verifier in tests. Messages are still absorbed so the
    two classes stay interchangeable.
    """

    def __init__(self, field: PrimeField, seed: int = 0, label: bytes = b"tensorproof"):
        super().__init__(field, label)
        self._rng = random.Random(seed)

    def _draw(self, label: bytes) -> int:
        return self._rng.randrange(self.field.modulus)


def transcript_challenge(t: Transcript, label: bytes) -> int:
    return t.challenge(label)


def absorb_points(t: Transcript, label: bytes, group, points: Sequence) -> None:
    t.absorb(label, group.encode_many(points))
