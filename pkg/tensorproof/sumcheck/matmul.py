"""
Matrix multiplication sumcheck

C̃(u, v) = Σ_i Ã(u, i) · B̃(i, v), reduced to one claim on A and one on B at
a sumcheck-chosen inner point. Prover work is linear in mn + np: both
operands are first collapsed against eq(u, ·) and eq(v, ·).

The batched form carries a leading head axis and an extra eq(η, h) factor.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..algebra.field import PrimeField
from ..algebra.transcript import Transcript
from ..errors import ProofRejected, ShapeError
from .engine import Combination, SumcheckProof, Term, sumcheck_prove, sumcheck_verify
from .mle import eq_eval, eq_table, mle_evaluate_flat
from .tensor import Tensor, log2_exact

PLAIN = Combination([Term(1, ("A", "B"))])
BATCHED = Combination([Term(1, ("eqH", "A", "B"))])


@dataclass
class MatmulClaims:
    """Evaluation obligations left by a matmul reduction"""

    a_point: List[int]
    a_value: int
    b_point: List[int]
    b_value: int


@dataclass
class MatmulProof:
    claim: int
    sumcheck: SumcheckProof


def _as_batched(a: np.ndarray, b: np.ndarray):
    if a.ndim == 2:
        a = a.reshape((1,) + a.shape)
    if b.ndim == 2:
        b = b.reshape((1,) + b.shape)
    if a.ndim != 3 or b.ndim != 3 or a.shape[0] != b.shape[0] or a.shape[2] != b.shape[1]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a, b


def prove_matmul_at(
    a: np.ndarray,
    b: np.ndarray,
    eta: Sequence[int],
    u: Sequence[int],
    v: Sequence[int],
    claim: int,
    transcript: Transcript,
    field: PrimeField,
    label: bytes = b"matmul",
) -> Tuple[SumcheckProof, MatmulClaims]:
    """
    Reduce a claim on C̃(η, u, v) for C[h] = A[h] · B[h]

    a is (heads, m, n) or (m, n); b is (heads, n, p) or (n, p).
    """
    a3, b3 = _as_batched(a, b)
    heads, m, n = a3.shape
    p_cols = b3.shape[2]
    if len(eta) != log2_exact(heads) or len(u) != log2_exact(m) or len(v) != log2_exact(p_cols):
        raise ShapeError("matmul point does not match operand shapes")
    mod = field.modulus

    a_u = np.tensordot(a3, eq_table(u, field), axes=([1], [0])) % mod
    b_v = np.tensordot(b3, eq_table(v, field), axes=([2], [0])) % mod
    tables = {"A": a_u.reshape(-1), "B": b_v.reshape(-1)}
    if heads > 1:
        tables["eqH"] = np.repeat(eq_table(eta, field), n)
        proof = sumcheck_prove(BATCHED, tables, 3, claim, transcript, field, label, public=("eqH",))
    else:
        proof = sumcheck_prove(PLAIN, tables, 2, claim, transcript, field, label)

    w = proof.final_point
    w_h, w_i = w[: len(eta)], w[len(eta):]
    return proof, MatmulClaims(
        a_point=list(w_h) + list(u) + list(w_i),
        a_value=proof.final_claims["A"],
        b_point=list(w_h) + list(w_i) + list(v),
        b_value=proof.final_claims["B"],
    )


def verify_matmul_at(
    proof: SumcheckProof,
    inner: int,
    eta: Sequence[int],
    u: Sequence[int],
    v: Sequence[int],
    claim: int,
    transcript: Transcript,
    field: PrimeField,
    label: bytes = b"matmul",
) -> MatmulClaims:
    inner_vars = log2_exact(inner)
    if eta:
        result = sumcheck_verify(
            proof, BATCHED, len(eta) + inner_vars, 3, claim, transcript, field, label,
            public=lambda pt: {"eqH": eq_eval(eta, pt[: len(eta)], field)},
            public_names=("eqH",),
        )
    else:
        result = sumcheck_verify(proof, PLAIN, inner_vars, 2, claim, transcript, field, label)
    w = result.point
    w_h, w_i = w[: len(eta)], w[len(eta):]
    return MatmulClaims(
        a_point=list(w_h) + list(u) + list(w_i),
        a_value=result.claims["A"],
        b_point=list(w_h) + list(w_i) + list(v),
        b_value=result.claims["B"],
    )


def matmul_sumcheck_prove(a: Tensor, b: Tensor, c: Tensor, transcript: Transcript) -> MatmulProof:
    """Standalone proof that C = A · B at a transcript-chosen point of C"""
    field = a.field
    if a.data.ndim != 2 or b.data.ndim != 2 or c.data.ndim != 2:
        raise ShapeError("matmul operands must be matrices")
    (m, n), (n2, p_cols) = a.shape, b.shape
    if n != n2 or c.shape != (m, p_cols):
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape} into {c.shape}")
    transcript.absorb_scalars(b"matmul.dims", [m, n, p_cols])
    u = transcript.challenges(b"matmul.u", log2_exact(m))
    v = transcript.challenges(b"matmul.v", log2_exact(p_cols))
    claim = mle_evaluate_flat(c.flat(), list(u) + list(v), field)
    proof, _ = prove_matmul_at(a.data, b.data, [], u, v, claim, transcript, field)
    return MatmulProof(claim=claim, sumcheck=proof)


def matmul_sumcheck_verify(
    proof: MatmulProof,
    a_shape: Sequence[int],
    b_shape: Sequence[int],
    transcript: Transcript,
    field: PrimeField,
    c: Optional[Tensor] = None,
) -> MatmulClaims:
    """
    Verify a standalone matmul proof

    With c given the claim is recomputed from it; otherwise the proof's own
    claim stands and becomes the caller's obligation.
    """
    m, n = a_shape
    n2, p_cols = b_shape
    if n != n2:
        raise ShapeError(f"cannot multiply {tuple(a_shape)} by {tuple(b_shape)}")
    transcript.absorb_scalars(b"matmul.dims", [m, n, p_cols])
    u = transcript.challenges(b"matmul.u", log2_exact(m))
    v = transcript.challenges(b"matmul.v", log2_exact(p_cols))
    if c is not None and mle_evaluate_flat(c.flat(), list(u) + list(v), field) != proof.claim:
        raise ProofRejected("matmul claim does not match C")
    return verify_matmul_at(proof.sumcheck, n, [], u, v, proof.claim, transcript, field)
