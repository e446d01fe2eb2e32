"""
Hyrax-style Pedersen commitments to multilinear extensions

A tensor with 2^d entries is laid out as a 2^⌈d/2⌉ × 2^⌊d/2⌋ matrix; each
row gets one Pedersen vector commitment. An evaluation at a point splits the
point into row and column halves: the row half collapses the committed rows
into one vector, and an inner-product argument against the column weights
proves the claimed value.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from ..algebra.field import PrimeField
from ..algebra.group import Group, GroupElement
from ..algebra.transcript import Transcript
from ..errors import CapacityError, ProofRejected, ShapeError
from ..sumcheck.mle import eq_table
from ..sumcheck.tensor import Tensor, log2_exact
from .blinding import BlindingSource, ZeroBlinding
from .ipa import InnerProductProof, prove_inner_product, verify_inner_product

logger = logging.getLogger(__name__)


def layout(num_vars: int) -> Tuple[int, int]:
    """(row variables, column variables)"""
    return (num_vars + 1) // 2, num_vars // 2


@dataclass
class PublicParams:
    """Generators for every tensor up to 2^max_log_dim entries"""

    group: Group
    max_log_dim: int
    seed: bytes
    generators: List[GroupElement]
    blinding_generator: GroupElement
    ipa_generator: GroupElement

    @property
    def field(self) -> PrimeField:
        return self.group.scalar_field

    def generators_for(self, num_vars: int) -> List[GroupElement]:
        _, col_vars = layout(num_vars)
        return self.generators[: 2 ** col_vars]


def keygen(max_log_dim: int, seed: bytes, group: Group) -> PublicParams:
    """Derive public parameters from a seed string (no trapdoor)"""
    if max_log_dim < 1:
        raise CapacityError("max_log_dim must be at least 1")
    count = 2 ** ((max_log_dim + 1) // 2)
    generators = [group.hash_to_group(seed, b"G", i) for i in range(count)]
    logger.debug(f"derived {count} generators for {group.name}", extra={"max_log_dim": max_log_dim})
    return PublicParams(
        group=group,
        max_log_dim=max_log_dim,
        seed=seed,
        generators=generators,
        blinding_generator=group.hash_to_group(seed, b"H", 0),
        ipa_generator=group.hash_to_group(seed, b"U", 0),
    )


@dataclass(eq=False)
class TensorCommitment:
    """Row commitments; blinders stay on the prover side"""

    group: Group
    num_vars: int
    row_commitments: List[GroupElement]
    blinders: Optional[List[int]] = field(default=None, repr=False)

    @property
    def num_rows(self) -> int:
        return len(self.row_commitments)

    def to_bytes(self) -> bytes:
        return self.group.encode_many(self.row_commitments)

    def public(self) -> "TensorCommitment":
        return TensorCommitment(self.group, self.num_vars, list(self.row_commitments))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorCommitment):
            return NotImplemented
        return self.num_vars == other.num_vars and self.to_bytes() == other.to_bytes()

    def __add__(self, other: "TensorCommitment") -> "TensorCommitment":
        return combine([self, other], [1, 1])

    def scale(self, k: int) -> "TensorCommitment":
        return combine([self], [k])


def combine(commitments: Sequence[TensorCommitment], coefficients: Sequence[int]) -> TensorCommitment:
    """Σ k_j · [S_j], row by row; blinders combine the same way"""
    first = commitments[0]
    group = first.group
    p = group.order
    if any(c.num_vars != first.num_vars for c in commitments):
        raise ShapeError("cannot combine commitments of different sizes")
    rows = []
    for r in range(first.num_rows):
        rows.append(group.msm(list(coefficients), [c.row_commitments[r] for c in commitments]))
    blinders = None
    if all(c.blinders is not None for c in commitments):
        blinders = [
            sum(k * c.blinders[r] for k, c in zip(coefficients, commitments)) % p
            for r in range(first.num_rows)
        ]
    return TensorCommitment(group, first.num_vars, rows, blinders)


def _as_flat(t: Union[Tensor, np.ndarray, Sequence[int]], p: int) -> np.ndarray:
    if isinstance(t, Tensor):
        return t.flat()
    return np.asarray(t, dtype=object).reshape(-1) % p


def commit(
    t: Union[Tensor, np.ndarray, Sequence[int]],
    pp: PublicParams,
    blinding: Union[BlindingSource, Sequence[int], None] = None,
) -> TensorCommitment:
    """
    Commit row by row: C_r = ⟨row_r, G⟩ + r_r·H

    Raises:
        CapacityError: tensor larger than the parameters allow
    """
    group = pp.group
    p = group.order
    values = _as_flat(t, p)
    num_vars = log2_exact(len(values))
    if num_vars > pp.max_log_dim:
        raise CapacityError(f"tensor with 2^{num_vars} entries exceeds capacity 2^{pp.max_log_dim}")
    row_vars, col_vars = layout(num_vars)
    rows, cols = 2 ** row_vars, 2 ** col_vars

    if blinding is None:
        blinding = ZeroBlinding(pp.field)
    blinders = blinding.many(rows) if isinstance(blinding, BlindingSource) else [int(b) % p for b in blinding]
    if len(blinders) != rows:
        raise ShapeError(f"need {rows} blinders, got {len(blinders)}")

    gens = pp.generators[:cols]
    matrix = values.reshape(rows, cols)
    row_commitments = [
        group.msm(list(matrix[r]) + [blinders[r]], gens + [pp.blinding_generator])
        for r in range(rows)
    ]
    return TensorCommitment(group, num_vars, row_commitments, blinders)


@dataclass
class EvalProof:
    claimed_value: int
    inner: InnerProductProof

    @property
    def intermediate_commitments(self) -> List[GroupElement]:
        return list(self.inner.left) + list(self.inner.right) + [self.inner.closing]

    @property
    def response_scalars(self) -> List[int]:
        return [self.inner.z1, self.inner.z2]


def _bind_statement(transcript: Transcript, c: TensorCommitment, point: Sequence[int], y: int) -> None:
    transcript.absorb(b"eval.commitment", c.to_bytes())
    transcript.absorb_scalars(b"eval.point", point)
    transcript.absorb_scalars(b"eval.value", [y])


def prove_eval(
    t: Union[Tensor, np.ndarray, Sequence[int]],
    c: TensorCommitment,
    point: Sequence[int],
    pp: PublicParams,
    transcript: Transcript,
    randomness: Optional[BlindingSource] = None,
) -> EvalProof:
    """
    Prove y = t̃(point) against commitment c

    Raises:
        ShapeError: point length differs from the tensor's variable count
    """
    field = pp.field
    p = field.modulus
    values = _as_flat(t, p)
    num_vars = log2_exact(len(values))
    if len(point) != num_vars or c.num_vars != num_vars:
        raise ShapeError(f"point has {len(point)} coordinates, tensor has {num_vars} variables")
    if c.blinders is None:
        raise ShapeError("prover needs the commitment blinders")
    row_vars, col_vars = layout(num_vars)
    rows, cols = 2 ** row_vars, 2 ** col_vars

    left = eq_table(point[:row_vars], field)
    right = eq_table(point[row_vars:], field)
    vector = np.dot(left, values.reshape(rows, cols)) % p
    vector_blinder = int(np.dot(left, np.asarray(c.blinders, dtype=object))) % p
    y = int(np.dot(vector, right)) % p

    _bind_statement(transcript, c, point, y)
    w = transcript.challenge_nonzero(b"eval.u")
    inner = prove_inner_product(
        pp.group, field, pp.generators[:cols], pp.blinding_generator, pp.ipa_generator, w,
        vector, right, vector_blinder, transcript, randomness or BlindingSource(field),
    )
    return EvalProof(claimed_value=y, inner=inner)


def verify_eval(
    proof: EvalProof,
    c: TensorCommitment,
    point: Sequence[int],
    pp: PublicParams,
    transcript: Transcript,
) -> bool:
    """
    Accept iff proof shows c opens to proof.claimed_value at point

    Raises:
        ShapeError: dimension mismatch
        ProofRejected: the proof does not verify
    """
    field = pp.field
    num_vars = c.num_vars
    if len(point) != num_vars:
        raise ShapeError(f"point has {len(point)} coordinates, commitment has {num_vars} variables")
    row_vars, col_vars = layout(num_vars)
    if len(c.row_commitments) != 2 ** row_vars:
        raise ProofRejected("commitment row count does not match its size")
    left = eq_table(point[:row_vars], field)
    right = eq_table(point[row_vars:], field)

    _bind_statement(transcript, c, point, proof.claimed_value)
    w = transcript.challenge_nonzero(b"eval.u")
    terms = [(int(k), row) for k, row in zip(left, c.row_commitments)]
    return verify_inner_product(
        pp.group, field, pp.generators[: 2 ** col_vars], pp.blinding_generator, pp.ipa_generator, w,
        terms, proof.claimed_value, right, proof.inner, transcript,
    )
