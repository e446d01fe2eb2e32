"""
Arithmetic relation checks

- MatmulStage: C = A · B, optionally batched over a leading axis
- LinearStage: Σ coef · T + const = 0, checked at one random point
- Relation helpers: Σ_i weight(i) · Σ_t coef_t · Π factors(i) = claimed, by
  sumcheck, with factors broadcast along rows or columns
- HadamardStage: out = Π factors, a relation with an eq(u, ·) weight
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from ..errors import ProofRejected, ShapeError
from ..sumcheck.engine import Combination, Term, sumcheck_prove, sumcheck_verify
from ..sumcheck.matmul import prove_matmul_at, verify_matmul_at
from ..sumcheck.mle import eq_eval, eq_table, mle_evaluate_flat
from ..sumcheck.tensor import log2_exact
from .codec import Reader, Writer
from .session import ProverSession, Session, VerifierSession
from .stage import Stage, Trace

logger = logging.getLogger(__name__)

FULL = "full"
ROWS = "rows"  # one value per row, repeated across columns
COLS = "cols"  # one value per column, repeated across rows

EQ = "eq"
EQ_ROWS = "eqR"


@dataclass(frozen=True)
class Factor:
    tensor: str
    mode: str = FULL

    @property
    def key(self) -> str:
        return f"{self.tensor}|{self.mode}"


RelationTerm = Tuple[int, Tuple[object, ...]]  # (coefficient, factors: Factor or EQ / EQ_ROWS)


def _combination(terms: Sequence[RelationTerm]) -> Combination:
    return Combination([
        Term(coef, tuple(f.key if isinstance(f, Factor) else f for f in factors))
        for coef, factors in terms
    ])


def _factors(terms: Sequence[RelationTerm]) -> List[Factor]:
    seen: Dict[str, Factor] = {}
    for _, factors in terms:
        for f in factors:
            if isinstance(f, Factor):
                seen.setdefault(f.key, f)
    return list(seen.values())


def _expand(values: np.ndarray, mode: str, rows: int, cols: int) -> np.ndarray:
    flat = values.reshape(-1)
    if mode == FULL:
        expected = rows * cols
        out = flat
    elif mode == ROWS:
        expected = rows
        out = np.repeat(flat, cols)
    else:
        expected = cols
        out = np.tile(flat, rows)
    if len(flat) != expected:
        raise ShapeError(f"{mode} factor has {len(flat)} entries, expected {expected}")
    return out


def _factor_point(f: Factor, point: Sequence[int], row_vars: int) -> List[int]:
    if f.mode == ROWS:
        return list(point[:row_vars])
    if f.mode == COLS:
        return list(point[row_vars:])
    return list(point)


def prove_relation(
    session: ProverSession,
    writer: Writer,
    label: str,
    rows: int,
    cols: int,
    terms: Sequence[RelationTerm],
    claimed: Sequence[Tuple[int, str]] = (),
) -> List[int]:
    """
    Prove Σ_i Σ_t coef_t · Π factors(i) = Σ_c coef_c · T̃_c(u_rows)

    The eq factors are taken at a fresh point u over the (rows, cols) domain.
    Every claimed tensor is a per-row vector opened at the row half of u.
    Returns the sumcheck point.
    """
    field = session.field
    p = field.modulus
    t = session.transcript
    row_vars = log2_exact(rows)
    u = t.challenges(label.encode() + b".u", row_vars + log2_exact(cols))

    claimed_values = [mle_evaluate_flat(session.value(name).reshape(-1), u[:row_vars], field) for _, name in claimed]
    writer.scalars(claimed_values)
    claim = sum(c * v for (c, _), v in zip(claimed, claimed_values)) % p
    for (_, name), v in zip(claimed, claimed_values):
        session.claim(name, u[:row_vars], v, label)

    combination = _combination(terms)
    tables = {}
    if EQ in combination.names:
        tables[EQ] = eq_table(u, field)
    if EQ_ROWS in combination.names:
        tables[EQ_ROWS] = np.repeat(eq_table(u[:row_vars], field), cols)
    factors = _factors(terms)
    for f in factors:
        tables[f.key] = _expand(session.value(f.tensor), f.mode, rows, cols)

    public = (EQ, EQ_ROWS)
    proof = sumcheck_prove(
        combination, tables, combination.degree, claim, t, field, label.encode(), public=public,
    )
    private = [n for n in combination.names if n not in public]
    writer.sumcheck(proof, private)
    for f in factors:
        session.claim(f.tensor, _factor_point(f, proof.final_point, row_vars), proof.final_claims[f.key], label)
    return proof.final_point


def verify_relation(
    session: VerifierSession,
    reader: Reader,
    label: str,
    rows: int,
    cols: int,
    terms: Sequence[RelationTerm],
    claimed: Sequence[Tuple[int, str]] = (),
) -> List[int]:
    field = session.field
    p = field.modulus
    t = session.transcript
    row_vars = log2_exact(rows)
    u = t.challenges(label.encode() + b".u", row_vars + log2_exact(cols))

    claimed_values = reader.scalars()
    if len(claimed_values) != len(claimed):
        raise ProofRejected(f"{label}: expected {len(claimed)} claimed values")
    claim = sum(c * v for (c, _), v in zip(claimed, claimed_values)) % p
    for (_, name), v in zip(claimed, claimed_values):
        session.claim(name, u[:row_vars], v, label)

    combination = _combination(terms)
    public = (EQ, EQ_ROWS)
    private = [n for n in combination.names if n not in public]
    proof = reader.sumcheck(private)

    def public_values(point):
        return {
            EQ: eq_eval(u, point, field),
            EQ_ROWS: eq_eval(u[:row_vars], point[:row_vars], field),
        }

    result = sumcheck_verify(
        proof, combination, row_vars + log2_exact(cols), combination.degree, claim, t, field,
        label.encode(), public=public_values, public_names=[n for n in combination.names if n in public],
    )
    for f in _factors(terms):
        session.claim(f.tensor, _factor_point(f, result.point, row_vars), result.claims[f.key], label)
    return result.point


class MatmulStage(Stage):
    """
    C = A · B, or C[h] = A[h] · B[h] with a leading head axis

    Any operand may be a view or a public tensor. Scales multiply: the
    output carries the sum of the operand scale exponents.
    """

    def __init__(self, label: str, a: str, b: str, c: str, shape: Tuple[int, ...], commit_output: bool = True):
        self.label = label
        self.a, self.b, self.c = a, b, c
        self.out_shape = tuple(shape)
        self.commit_output = commit_output

    def declare(self, session: Session) -> None:
        if self.commit_output:
            session.declare(self.c, self.out_shape)

    def forward(self, trace: Trace) -> None:
        a, b = trace[self.a], trace[self.b]
        trace[self.c] = np.matmul(a, b)

    def _dims(self, session: Session):
        a_shape, b_shape = session.shape(self.a), session.shape(self.b)
        heads = a_shape[0] if len(a_shape) == 3 else 1
        if a_shape[-1] != b_shape[-2]:
            raise ShapeError(f"{self.label}: cannot multiply {a_shape} by {b_shape}")
        return heads, a_shape[-2], a_shape[-1], b_shape[-1]

    def _points(self, session: Session, heads: int, m: int, p_cols: int):
        t = session.transcript
        base = self.label.encode()
        eta = t.challenges(base + b".eta", log2_exact(heads)) if heads > 1 else []
        u = t.challenges(base + b".u", log2_exact(m))
        v = t.challenges(base + b".v", log2_exact(p_cols))
        return eta, u, v

    def prove(self, session: ProverSession, writer: Writer) -> None:
        heads, m, n, p_cols = self._dims(session)
        eta, u, v = self._points(session, heads, m, p_cols)
        point = list(eta) + list(u) + list(v)
        claim = mle_evaluate_flat(session.value(self.c).reshape(-1), point, session.field)
        writer.scalar(claim)
        a = session.value(self.a)
        b = session.value(self.b)
        if heads > 1:
            a = a.reshape(heads, m, n)
            b = b.reshape(heads, n, p_cols)
        else:
            a = a.reshape(m, n)
            b = b.reshape(n, p_cols)
        proof, claims = prove_matmul_at(
            a, b, eta, u, v, claim, session.transcript, session.field, self.label.encode(),
        )
        writer.sumcheck(proof, ["A", "B"])
        session.claim(self.c, point, claim, self.label)
        session.claim(self.a, claims.a_point, claims.a_value, self.label)
        session.claim(self.b, claims.b_point, claims.b_value, self.label)

    def verify(self, session: VerifierSession, reader: Reader) -> None:
        heads, m, n, p_cols = self._dims(session)
        eta, u, v = self._points(session, heads, m, p_cols)
        point = list(eta) + list(u) + list(v)
        claim = reader.scalar()
        proof = reader.sumcheck(["A", "B"])
        claims = verify_matmul_at(
            proof, n, eta, u, v, claim, session.transcript, session.field, self.label.encode(),
        )
        session.claim(self.c, point, claim, self.label)
        session.claim(self.a, claims.a_point, claims.a_value, self.label)
        session.claim(self.b, claims.b_point, claims.b_value, self.label)


class LinearStage(Stage):
    """
    Σ coef · T + constant = 0 entrywise, for same-sized tensors

    The identity is linear, so checking it at one random point suffices:
    the prover sends each T̃(u) and the verifier checks the combination.
    With `output` set, forward computes output = -(Σ other terms + constant)
    (the output term must carry coefficient -1).
    """

    def __init__(
        self,
        label: str,
        terms: Sequence[Tuple[int, str]],
        constant: int = 0,
        output: Optional[str] = None,
        shape: Optional[Tuple[int, ...]] = None,
    ):
        self.label = label
        self.terms = list(terms)
        self.constant = constant
        self.output = output
        self.out_shape = shape

    def declare(self, session: Session) -> None:
        if self.output is not None:
            session.declare(self.output, self.out_shape)

    def forward(self, trace: Trace) -> None:
        if self.output is None:
            return
        total = self.constant
        for coef, name in self.terms:
            if name == self.output:
                if coef != -1:
                    raise ShapeError("the output term of a linear stage must have coefficient -1")
                continue
            total = total + coef * trace[name].reshape(self.out_shape)
        trace[self.output] = np.asarray(total).reshape(self.out_shape)

    def _point(self, session: Session) -> List[int]:
        sizes = {session.num_vars(name) for _, name in self.terms}
        if len(sizes) != 1:
            raise ShapeError(f"{self.label}: terms differ in size")
        return session.transcript.challenges(self.label.encode() + b".u", sizes.pop())

    def prove(self, session: ProverSession, writer: Writer) -> None:
        u = self._point(session)
        values = [mle_evaluate_flat(session.value(name).reshape(-1), u, session.field) for _, name in self.terms]
        writer.scalars(values)
        session.transcript.absorb_scalars(self.label.encode() + b".values", values)
        for (_, name), v in zip(self.terms, values):
            session.claim(name, u, v, self.label)

    def verify(self, session: VerifierSession, reader: Reader) -> None:
        field = session.field
        u = self._point(session)
        values = reader.scalars()
        if len(values) != len(self.terms):
            raise ProofRejected(f"{self.label}: expected {len(self.terms)} values")
        session.transcript.absorb_scalars(self.label.encode() + b".values", values)
        total = (self.constant + sum(c * v for (c, _), v in zip(self.terms, values))) % field.modulus
        if total:
            raise ProofRejected(f"{self.label}: linear relation fails")
        for (_, name), v in zip(self.terms, values):
            session.claim(name, u, v, self.label)


class HadamardStage(Stage):
    """
    out = Π factors elementwise over a (rows, cols) domain

    Factors may be broadcast per row or per column. Proved as
    Σ_i eq(u, i) · (out(i) − Π f(i)) = 0 with degree 1 + #factors.
    """

    def __init__(
        self,
        label: str,
        output: str,
        factors: Sequence[Factor],
        rows: int,
        cols: int,
        shape: Optional[Tuple[int, ...]] = None,
    ):
        self.label = label
        self.output = output
        self.factors = list(factors)
        self.rows, self.cols = rows, cols
        self.out_shape = tuple(shape) if shape is not None else (rows, cols)

    def declare(self, session: Session) -> None:
        session.declare(self.output, self.out_shape)

    def forward(self, trace: Trace) -> None:
        out = np.ones(self.rows * self.cols, dtype=np.int64)
        for f in self.factors:
            out = out * _expand(trace[f.tensor], f.mode, self.rows, self.cols)
        trace[self.output] = out.reshape(self.out_shape)

    def _terms(self) -> List[RelationTerm]:
        return [(1, (EQ, Factor(self.output))), (-1, (EQ,) + tuple(self.factors))]

    def prove(self, session: ProverSession, writer: Writer) -> None:
        prove_relation(session, writer, self.label, self.rows, self.cols, self._terms())

    def verify(self, session: VerifierSession, reader: Reader) -> None:
        verify_relation(session, reader, self.label, self.rows, self.cols, self._terms())
