"""
Proof sessions and the claim ledger

A session is one proof run: a transcript, the tensors it knows about and the
evaluation claims its stages have produced. Committed tensors are absorbed
into the transcript as they are registered; claims pile up in the ledger and
are discharged together at the end (one evaluation proof per committed
tensor, direct recomputation for public ones).
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple
import logging

import numpy as np

from ..algebra.field import PrimeField
from ..algebra.transcript import Transcript
from ..errors import ProofRejected, ShapeError
from ..polycommit.blinding import BlindingSource
from ..polycommit.hyrax import PublicParams, TensorCommitment, commit, prove_eval, verify_eval
from ..sumcheck.engine import Combination, Term, batch_claims, sumcheck_prove, sumcheck_verify
from ..sumcheck.mle import eq_eval, eq_table, mle_evaluate_flat
from ..sumcheck.tensor import log2_exact
from .codec import Reader, Writer
from .views import View

logger = logging.getLogger(__name__)

OPENING = Combination([Term(1, ("T", "W"))])


@dataclass(frozen=True)
class Claim:
    point: Tuple[int, ...]
    value: int
    source: str = ""


class ClaimLedger:
    """Evaluation obligations grouped by root tensor, in first-claim order"""

    def __init__(self):
        self._claims: Dict[str, List[Claim]] = {}

    def add(self, tensor: str, point: Sequence[int], value: int, source: str = "") -> None:
        self._claims.setdefault(tensor, []).append(Claim(tuple(point), value, source))

    def items(self) -> Iterator[Tuple[str, List[Claim]]]:
        return iter(list(self._claims.items()))

    def tensors(self) -> List[str]:
        return list(self._claims)

    def claims_for(self, tensor: str) -> List[Claim]:
        return list(self._claims.get(tensor, []))

    def __len__(self) -> int:
        return sum(len(v) for v in self._claims.values())

    def __contains__(self, tensor: str) -> bool:
        return tensor in self._claims


def _dedupe(claims: Sequence[Claim]) -> Tuple[List[Tuple[int, ...]], List[int], bool]:
    """Unique points in order; False if one point carries two values"""
    seen: Dict[Tuple[int, ...], int] = {}
    for c in claims:
        if c.point in seen and seen[c.point] != c.value:
            return [], [], False
        seen.setdefault(c.point, c.value)
    return list(seen), list(seen.values()), True


class Session:
    """State shared by both sides of a proof run"""

    def __init__(self, pp: PublicParams, transcript: Transcript, max_retries: int = 8):
        self.pp = pp
        self.transcript = transcript
        self.field: PrimeField = pp.field
        self.group = pp.group
        self.max_retries = max_retries
        self.shapes: Dict[str, Tuple[int, ...]] = {}
        self.commitments: Dict[str, TensorCommitment] = {}
        self.publics: Dict[str, np.ndarray] = {}
        self.views: Dict[str, View] = {}
        self.pending: List[str] = []
        self.ledger = ClaimLedger()
        self._tables: Dict[Any, Any] = {}

    # Registration

    def declare(self, name: str, shape: Sequence[int]) -> None:
        """A tensor that will be committed before any stage is proved"""
        self._check_new(name)
        for s in shape:
            log2_exact(s)
        self.shapes[name] = tuple(shape)
        self.pending.append(name)

    def declare_view(self, name: str, view: View) -> None:
        self._check_new(name)
        if view.parent not in self.shapes:
            raise ShapeError(f"view {name} over unknown tensor {view.parent}")
        for s in view.shape:
            log2_exact(s)
        self.views[name] = view
        self.shapes[name] = tuple(view.shape)

    def declare_public(self, name: str, values: np.ndarray) -> None:
        """A tensor both sides hold in full; absorbed entry by entry"""
        self._check_new(name)
        arr = self.field.array(values)
        for s in arr.shape:
            log2_exact(s)
        self.shapes[name] = tuple(arr.shape)
        self.publics[name] = arr
        self.transcript.absorb_scalars(b"public:" + name.encode(), arr.reshape(-1))

    def _check_new(self, name: str) -> None:
        if name in self.shapes:
            raise ShapeError(f"tensor {name} declared twice")

    def _absorb_commitment(self, name: str, c: TensorCommitment) -> None:
        self.transcript.absorb(b"commit:" + name.encode(), bytes([c.num_vars]) + c.to_bytes())

    def shape(self, name: str) -> Tuple[int, ...]:
        return self.shapes[name]

    def num_vars(self, name: str) -> int:
        return log2_exact(int(np.prod(self.shapes[name])))

    def is_public(self, name: str) -> bool:
        return self.root(name) in self.publics

    def root(self, name: str) -> str:
        while name in self.views:
            name = self.views[name].parent
        return name

    def table(self, spec):
        """Lookup tables are built once per session from their TableSpec"""
        if spec.key not in self._tables:
            self._tables[spec.key] = spec.build(self.field)
        return self._tables[spec.key]

    # Claims

    def claim(self, name: str, point: Sequence[int], value: int, source: str = "") -> None:
        """
        Record Ṽ(point) = value, resolved through views to a root tensor

        Raises:
            ShapeError: point length does not match the tensor
            ProofRejected: a view forces the value to zero and it is not
        """
        p = self.field.modulus
        point = [int(x) % p for x in point]
        value = int(value) % p
        if len(point) != self.num_vars(name):
            raise ShapeError(f"claim on {name} has {len(point)} coordinates, expected {self.num_vars(name)}")
        coef = 1
        while name in self.views:
            view = self.views[name]
            point, c = view.map_point(point, self.field)
            coef = coef * c % p
            name = view.parent
        if coef == 0:
            if value != 0:
                raise ProofRejected(f"claim on a zero region of {name} is nonzero")
            return
        if coef != 1:
            value = value * pow(coef, -1, p) % p
        self.ledger.add(name, point, value, source)

    def undischarged(self) -> List[str]:
        """Ledger tensors with neither a commitment nor a public value"""
        return [t for t in self.ledger.tensors() if t not in self.commitments and t not in self.publics]


class ProverSession(Session):
    """Prover side: holds tensor values and blinding randomness"""

    def __init__(
        self,
        pp: PublicParams,
        transcript: Transcript,
        blinding: Optional[BlindingSource] = None,
        max_retries: int = 8,
    ):
        super().__init__(pp, transcript, max_retries)
        self.blinding = blinding or BlindingSource(pp.field)
        self.values: Dict[str, np.ndarray] = {}

    def set_value(self, name: str, values: np.ndarray) -> None:
        arr = self.field.array(values)
        if arr.size != int(np.prod(self.shapes[name])):
            raise ShapeError(f"{name} has shape {arr.shape}, declared {self.shapes[name]}")
        self.values[name] = arr.reshape(self.shapes[name])

    def value(self, name: str) -> np.ndarray:
        """Field values of a tensor or view"""
        if name in self.views:
            view = self.views[name]
            return view.materialize(self.value(view.parent))
        if name in self.publics:
            return self.publics[name]
        return self.values[name]

    def commit(self, name: str) -> TensorCommitment:
        c = commit(self.values[name], self.pp, self.blinding.fork(name))
        self._absorb_commitment(name, c)
        self.commitments[name] = c
        if name in self.pending:
            self.pending.remove(name)
        return c

    def commit_pending(self) -> List[Tuple[str, TensorCommitment]]:
        out = []
        for name in list(self.pending):
            out.append((name, self.commit(name)))
        return out

    def attach(self, name: str, c: TensorCommitment, values: np.ndarray) -> None:
        """A tensor committed elsewhere (weights); c must carry its blinders"""
        if c.blinders is None:
            raise ShapeError(f"commitment for {name} has no blinders")
        self.set_value(name, values)
        self._absorb_commitment(name, c)
        self.commitments[name] = c
        if name in self.pending:
            self.pending.remove(name)

    def commit_aux(self, name: str, values: np.ndarray) -> TensorCommitment:
        """Commit a tensor produced mid-proof (lookup witnesses)"""
        self.declare(name, (len(values),))
        self.set_value(name, values)
        return self.commit(name)

    def open_claims(self, writer: Writer) -> int:
        """Discharge the ledger; returns the number of evaluation proofs written"""
        count = 0
        for tensor, claims in self.ledger.items():
            if tensor in self.publics:
                continue
            points, values, _ = _dedupe(claims)
            flat = self.values[tensor].reshape(-1)
            c = self.commitments[tensor]
            label = b"open:" + tensor.encode()
            if len(points) == 1:
                point = list(points[0])
            else:
                rho = self.transcript.challenge(label + b".rho")
                weights = self._opening_weights(points, rho)
                proof = sumcheck_prove(
                    OPENING, {"T": flat, "W": weights}, 2,
                    batch_claims(values, rho, self.field), self.transcript, self.field, label, public=("W",),
                )
                writer.sumcheck(proof, ["T"])
                point = proof.final_point
            writer.eval_proof(prove_eval(flat, c, point, self.pp, self.transcript, self.blinding.fork("open:" + tensor)))
            count += 1
        logger.debug(f"opened {count} tensors", extra={"claims": len(self.ledger)})
        return count

    def _opening_weights(self, points: Sequence[Sequence[int]], rho: int) -> np.ndarray:
        p = self.field.modulus
        acc = None
        power = 1
        for pt in points:
            table = eq_table(pt, self.field) * power % p
            acc = table if acc is None else (acc + table) % p
            power = power * rho % p
        return acc


class VerifierSession(Session):
    """Verifier side: commitments and public tensors only"""

    def receive(self, name: str, c: TensorCommitment) -> None:
        if name not in self.shapes:
            raise ProofRejected(f"unexpected commitment {name}")
        if c.num_vars != self.num_vars(name):
            raise ProofRejected(f"commitment {name} has the wrong size")
        self._absorb_commitment(name, c)
        self.commitments[name] = c.public()
        if name in self.pending:
            self.pending.remove(name)

    def receive_aux(self, name: str, size: int, c: TensorCommitment) -> None:
        self.declare(name, (size,))
        self.receive(name, c)

    def verify_openings(self, reader: Reader) -> int:
        """
        Check every ledger claim

        Raises:
            ProofRejected: a claim fails or has nothing to open against
        """
        count = 0
        for tensor, claims in self.ledger.items():
            points, values, consistent = _dedupe(claims)
            if not consistent:
                raise ProofRejected(f"conflicting claims on {tensor}")
            if tensor in self.publics:
                flat = self.publics[tensor].reshape(-1)
                for pt, v in zip(points, values):
                    if mle_evaluate_flat(flat, pt, self.field) != v:
                        raise ProofRejected(f"claim on public tensor {tensor} is wrong")
                continue
            if tensor not in self.commitments:
                raise ProofRejected(f"claim on {tensor}, which has no commitment")
            c = self.commitments[tensor]
            label = b"open:" + tensor.encode()
            if len(points) == 1:
                point, expected = list(points[0]), values[0]
            else:
                rho = self.transcript.challenge(label + b".rho")
                proof = reader.sumcheck(["T"])
                result = sumcheck_verify(
                    proof, OPENING, c.num_vars, 2, batch_claims(values, rho, self.field),
                    self.transcript, self.field, label,
                    public=lambda r: {"W": self._opening_weight_at(points, rho, r)},
                    public_names=("W",),
                )
                point, expected = result.point, result.claims["T"]
            proof = reader.eval_proof()
            if proof.claimed_value != expected:
                raise ProofRejected(f"opening of {tensor} does not match its claims")
            verify_eval(proof, c, point, self.pp, self.transcript)
            count += 1
        return count

    def _opening_weight_at(self, points: Sequence[Sequence[int]], rho: int, r: Sequence[int]) -> int:
        p = self.field.modulus
        total, power = 0, 1
        for pt in points:
            total = (total + power * eq_eval(pt, r, self.field)) % p
            power = power * rho % p
        return total
