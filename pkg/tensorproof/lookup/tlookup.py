"""
tlookup: elementwise set inclusion S ⊂ T for tensors

The argument rests on the rational identity

    Σ_i 1/(X + S_i) = Σ_j m_j/(X + T_j)

which holds as rational functions iff every S_i occurs in T (m counts the
occurrences). At a random β the prover commits to the inverse vectors
A_i = 1/(β + S_i) and B_j = 1/(β + T_j) and one degree-3 sumcheck checks
both the inversions and the equality of the two sums.

Shapes: S has D entries, T has N, both powers of two. With D > N the table
side is tiled D/N times; with D < N, S is padded with T_0. The sumcheck runs
over D' = max(D, N) entries.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from ..algebra.field import PrimeField
from ..algebra.transcript import Transcript
from ..errors import ChallengeCollision, NotInTable, ProofRejected, ShapeError
from ..polycommit.blinding import BlindingSource, ZeroBlinding
from ..polycommit.hyrax import (
    EvalProof,
    PublicParams,
    TensorCommitment,
    combine,
    commit,
    prove_eval,
    verify_eval,
)
from ..protocol.codec import Reader, Writer
from ..protocol.session import ProverSession, Session, VerifierSession
from ..protocol.stage import Stage, Trace
from ..sumcheck.engine import Combination, SumcheckProof, Term, sumcheck_prove, sumcheck_verify
from ..sumcheck.mle import eq_eval, eq_table, mle_evaluate_flat
from ..sumcheck.tensor import log2_exact
from .tables import LookupTable, TableSpec

logger = logging.getLogger(__name__)

PUBLIC = ("eq", "eqT")


def tlookup_setup(t: Sequence[int], pp: PublicParams, outputs: Sequence[Sequence[int]] = ()) -> LookupTable:
    """Build and commit a public table (zero blinding, so anyone can recompute it)"""
    table = LookupTable.from_columns([t] + [list(o) for o in outputs], pp.field)
    table.commitments = [commit(col, pp, ZeroBlinding(pp.field)) for col in table.columns]
    return table


def compute_multiplicities(
    s: Sequence[int],
    t: Sequence[int],
    field: Optional[PrimeField] = None,
    strict: bool = True,
) -> np.ndarray:
    """
    m_j = |{i : S_i = T_j}|, credited to the first occurrence of each value

    Raises:
        NotInTable: if strict and some S_i is not in T
    """
    mod = field.modulus if field is not None else None
    norm = (lambda v: int(v) % mod) if mod is not None else int
    first: Dict[int, int] = {}
    t_list = [norm(v) for v in np.asarray(t, dtype=object).reshape(-1)]
    for j, v in enumerate(t_list):
        first.setdefault(v, j)
    m = [0] * len(t_list)
    missing = 0
    for i, v in enumerate(np.asarray(s, dtype=object).reshape(-1)):
        j = first.get(norm(v))
        if j is None:
            if strict:
                raise NotInTable(i, int(v))
            missing += 1
            continue
        m[j] += 1
    if missing:
        logger.warning(f"{missing} looked-up values are not in the table", extra={"missing": missing})
    out = np.empty(len(m), dtype=object)
    out[:] = m
    return out


@dataclass
class LookupProof:
    retries: int
    m_commitment: TensorCommitment
    a_commitment: TensorCommitment
    b_commitment: TensorCommitment
    sumcheck: SumcheckProof

    def write(self, w: Writer, num_columns: int) -> None:
        w.u8(self.retries)
        w.commitment(self.m_commitment)
        w.commitment(self.a_commitment)
        w.commitment(self.b_commitment)
        w.sumcheck(self.sumcheck, _private_names(num_columns))

    @classmethod
    def read(cls, r: Reader, num_columns: int) -> "LookupProof":
        retries = r.u8()
        m_c, a_c, b_c = r.commitment(), r.commitment(), r.commitment()
        return cls(retries, m_c, a_c, b_c, r.sumcheck(_private_names(num_columns)))


@dataclass
class LookupClaims:
    """Evaluation obligations left by one lookup"""

    weights: List[int]          # column weights (1, α_f, ...)
    point: List[int]            # sumcheck point over D'
    table_point: List[int]      # its last log N coordinates
    source_point: List[int]     # point on the unpadded looked-up tensor
    a: int
    b: int
    m: int
    t: int
    columns: List[int] = field(default_factory=list)


def _private_names(num_columns: int) -> List[str]:
    return ["A"] + [f"S{c}" for c in range(num_columns)] + ["B", "T", "m"]


def _combination(num_columns: int, weights: Sequence[int], alpha: int, beta: int, ratio: int, p: int) -> Combination:
    a2 = alpha * alpha % p
    terms = [Term(alpha * w % p, ("eq", "A", f"S{c}")) for c, w in enumerate(weights)]
    terms += [
        Term(alpha * beta % p, ("eq", "A")),
        Term(1, ("A",)),
        Term(a2 * ratio % p, ("eqT", "B", "T")),
        Term(a2 * beta % p * ratio % p, ("eqT", "B")),
        Term(-ratio % p, ("B", "m")),
    ]
    return Combination(terms)


class _Shapes:
    def __init__(self, d: int, n: int):
        self.d, self.n = d, n
        self.dp = max(d, n)
        self.log_d, self.log_n, self.log_dp = log2_exact(d), log2_exact(n), log2_exact(self.dp)

    def split(self, v: Sequence[int]):
        table_point = list(v[self.log_dp - self.log_n :])
        source_point = list(v[self.log_dp - self.log_d :])
        return table_point, source_point

    def pad_factor(self, v: Sequence[int], field: PrimeField) -> int:
        """eq(v_hi, 0): weight of the real entries when S was padded"""
        return eq_eval(list(v[: self.log_dp - self.log_d]), [0] * (self.log_dp - self.log_d), field)


def _column_weights(transcript: Transcript, label: bytes, num_columns: int, p: int) -> List[int]:
    if num_columns == 1:
        return [1]
    alpha_f = transcript.challenge(label + b".alpha_f")
    return [pow(alpha_f, c, p) for c in range(num_columns)]


def prove_lookup(
    columns: Sequence[np.ndarray],
    table: LookupTable,
    transcript: Transcript,
    field: PrimeField,
    channel,
    label: str,
    max_retries: int = 8,
    multiplicities: Optional[np.ndarray] = None,
) -> Tuple[LookupProof, LookupClaims]:
    """
    Prove that the rows (col_0[i], col_1[i], ...) all occur in the table

    The looked-up columns must already be bound by the caller. channel.commit
    (name, values) commits and absorbs the witness vectors.

    Raises:
        ShapeError: mismatched column counts or sizes
        ChallengeCollision: β hit -S_i or -T_j more than max_retries times
    """
    p = field.modulus
    base = label.encode()
    if len(columns) != table.width:
        raise ShapeError(f"{label}: {len(columns)} columns against a table of width {table.width}")
    cols = [np.asarray(c, dtype=object).reshape(-1) % p for c in columns]
    if len({len(c) for c in cols}) != 1:
        raise ShapeError(f"{label}: looked-up columns differ in length")
    shapes = _Shapes(len(cols[0]), table.size)

    weights = _column_weights(transcript, base, len(cols), p)
    if shapes.d < shapes.n:
        cols = [np.concatenate([c, np.full(shapes.n - shapes.d, tc[0], dtype=object)]) for c, tc in zip(cols, table.columns)]
    s = cols[0] * weights[0] % p
    for w, c in zip(weights[1:], cols[1:]):
        s = (s + c * w) % p
    t = table.combined(weights, field)

    m = multiplicities
    if m is None:
        m = compute_multiplicities(s, t, field, strict=False)
    m = np.asarray(m, dtype=object) % p
    m_commitment = channel.commit(f"{label}.m", m)

    forbidden = set(int(v) for v in s) | set(int(v) for v in t)
    beta = transcript.challenge(base + b".beta")
    retries = 0
    while (-beta) % p in forbidden:
        if retries >= max_retries:
            raise ChallengeCollision(f"{label}: β collided {retries + 1} times")
        logger.info(f"{label}: β collision, re-deriving", extra={"stage": label, "retry": retries})
        transcript.absorb_int(base + b".retry", retries)
        retries += 1
        beta = transcript.challenge(base + b".beta")

    a = field.batch_inverse((s + beta) % p)
    b = field.batch_inverse((t + beta) % p)
    a_commitment = channel.commit(f"{label}.A", a)
    b_commitment = channel.commit(f"{label}.B", b)

    alpha = transcript.challenge(base + b".alpha")
    u = transcript.challenges(base + b".u", shapes.log_dp)
    blocks = shapes.dp // shapes.n
    ratio = shapes.n * pow(shapes.dp, -1, p) % p
    tables = {
        "eq": eq_table(u, field),
        "eqT": np.tile(eq_table(u[shapes.log_dp - shapes.log_n :], field), blocks),
        "A": a,
        "B": np.tile(b, blocks),
        "T": np.tile(t, blocks),
        "m": np.tile(m, blocks),
    }
    for c, col in enumerate(cols):
        tables[f"S{c}"] = col
    combination = _combination(len(cols), weights, alpha, beta, ratio, p)
    claim = (alpha + alpha * alpha) % p
    proof = sumcheck_prove(combination, tables, 3, claim, transcript, field, base, public=PUBLIC)

    v = proof.final_point
    table_point, source_point = shapes.split(v)
    finals = proof.final_claims
    column_claims = [mle_evaluate_flat(np.asarray(c, dtype=object).reshape(-1) % p, source_point, field) for c in columns]
    lookup_proof = LookupProof(retries, m_commitment.public(), a_commitment.public(), b_commitment.public(), proof)
    return lookup_proof, LookupClaims(
        weights=weights,
        point=list(v),
        table_point=table_point,
        source_point=source_point,
        a=finals["A"],
        b=finals["B"],
        m=finals["m"],
        t=finals["T"],
        columns=column_claims,
    )


def verify_lookup(
    proof: LookupProof,
    table: LookupTable,
    size: int,
    transcript: Transcript,
    field: PrimeField,
    channel,
    label: str,
    max_retries: int = 8,
) -> LookupClaims:
    """
    Replay the lookup transcript and check the sumcheck

    channel.receive(name, size, commitment) absorbs each witness commitment.
    The returned T claim is NOT checked here; the caller opens it against the
    table commitment or recomputes it.

    Raises:
        ProofRejected: on any failed check
    """
    p = field.modulus
    base = label.encode()
    num_columns = table.width
    shapes = _Shapes(size, table.size)
    if proof.retries > max_retries:
        raise ProofRejected(f"{label}: {proof.retries} β retries exceed the bound {max_retries}")

    weights = _column_weights(transcript, base, num_columns, p)
    channel.receive(f"{label}.m", shapes.n, proof.m_commitment)
    beta = transcript.challenge(base + b".beta")
    for k in range(proof.retries):
        transcript.absorb_int(base + b".retry", k)
        beta = transcript.challenge(base + b".beta")
    t = table.combined(weights, field)
    if any((int(x) + beta) % p == 0 for x in t):
        raise ProofRejected(f"{label}: β is a pole of the table side")
    channel.receive(f"{label}.A", shapes.dp, proof.a_commitment)
    channel.receive(f"{label}.B", shapes.n, proof.b_commitment)

    alpha = transcript.challenge(base + b".alpha")
    u = transcript.challenges(base + b".u", shapes.log_dp)
    u_lo = u[shapes.log_dp - shapes.log_n :]
    ratio = shapes.n * pow(shapes.dp, -1, p) % p
    combination = _combination(num_columns, weights, alpha, beta, ratio, p)
    claim = (alpha + alpha * alpha) % p

    def public(point):
        return {"eq": eq_eval(u, point, field), "eqT": eq_eval(u_lo, point[shapes.log_dp - shapes.log_n :], field)}

    result = sumcheck_verify(
        proof.sumcheck, combination, shapes.log_dp, 3, claim, transcript, field, base,
        public=public, public_names=PUBLIC,
    )
    v = result.point
    table_point, source_point = shapes.split(v)
    column_claims = [result.claims[f"S{c}"] for c in range(num_columns)]
    if shapes.d < shapes.n:
        e = shapes.pad_factor(v, field)
        if e == 0:
            raise ProofRejected(f"{label}: degenerate padding point")
        e_inv = pow(e, -1, p)
        column_claims = [
            (claim_c - (1 - e) * int(tc[0])) % p * e_inv % p
            for claim_c, tc in zip(column_claims, table.columns)
        ]
    return LookupClaims(
        weights=weights,
        point=list(v),
        table_point=table_point,
        source_point=source_point,
        a=result.claims["A"],
        b=result.claims["B"],
        m=result.claims["m"],
        t=result.claims["T"],
        columns=column_claims,
    )


# Standalone fragments: witness commitments live in the fragment, and the
# five evaluation proofs (A, B, m, T, S) are inline.


class _TranscriptChannel:
    def __init__(self, pp: PublicParams, transcript: Transcript, blinding: Optional[BlindingSource] = None):
        self.pp = pp
        self.transcript = transcript
        self.blinding = blinding or BlindingSource(pp.field)
        self.values: Dict[str, np.ndarray] = {}
        self.commitments: Dict[str, TensorCommitment] = {}

    def _absorb(self, name: str, c: TensorCommitment) -> None:
        self.transcript.absorb(b"commit:" + name.encode(), bytes([c.num_vars]) + c.to_bytes())

    def commit(self, name: str, values: np.ndarray) -> TensorCommitment:
        c = commit(values, self.pp, self.blinding.fork(name))
        self._absorb(name, c)
        self.values[name] = values
        self.commitments[name] = c
        return c

    def receive(self, name: str, size: int, c: TensorCommitment) -> None:
        if c.num_vars != log2_exact(size):
            raise ProofRejected(f"commitment {name} has the wrong size")
        self._absorb(name, c)
        self.commitments[name] = c


@dataclass
class LookupFragment:
    """A self-contained lookup proof"""

    size: int
    proof: LookupProof
    openings: List[EvalProof]

    def to_bytes(self, pp: PublicParams) -> bytes:
        w = Writer(pp.field, pp.group)
        w.u32(self.size)
        w.u8(self.num_columns)
        self.proof.write(w, self.num_columns)
        w.u8(len(self.openings))
        for e in self.openings:
            w.eval_proof(e)
        return w.getvalue()

    @property
    def num_columns(self) -> int:
        return sum(1 for n in self.proof.sumcheck.final_claims if n.startswith("S"))

    @classmethod
    def from_bytes(cls, data: bytes, pp: PublicParams) -> "LookupFragment":
        r = Reader(data, pp.field, pp.group)
        size = r.u32()
        num_columns = r.u8()
        proof = LookupProof.read(r, num_columns)
        openings = [r.eval_proof() for _ in range(r.u8())]
        r.finish()
        return cls(size, proof, openings)


def _bind_inputs(transcript: Transcript, table_commitment: TensorCommitment, input_commitment: TensorCommitment) -> None:
    transcript.absorb(b"lookup.table", table_commitment.to_bytes())
    transcript.absorb(b"lookup.input", input_commitment.to_bytes())


def _prove_fragment(
    columns: Sequence[np.ndarray],
    input_commitments: Sequence[TensorCommitment],
    table: LookupTable,
    transcript: Transcript,
    pp: PublicParams,
    blinding: Optional[BlindingSource],
    multiplicities: Optional[np.ndarray],
    max_retries: int,
    label: str,
) -> LookupFragment:
    field = pp.field
    p = field.modulus
    for c, tc in zip(input_commitments, table.commitments):
        _bind_inputs(transcript, tc, c)
    channel = _TranscriptChannel(pp, transcript, blinding)
    proof, claims = prove_lookup(columns, table, transcript, field, channel, label, max_retries, multiplicities)

    s_values = sum(np.asarray(c, dtype=object).reshape(-1) * w for c, w in zip(columns, claims.weights)) % p
    s_commitment = combine(list(input_commitments), claims.weights)
    t_commitment = combine(table.commitments, claims.weights)
    randomness = channel.blinding.fork(label + ".open")
    openings = [
        prove_eval(channel.values[f"{label}.A"], channel.commitments[f"{label}.A"], claims.point, pp, transcript, randomness),
        prove_eval(channel.values[f"{label}.B"], channel.commitments[f"{label}.B"], claims.table_point, pp, transcript, randomness),
        prove_eval(channel.values[f"{label}.m"], channel.commitments[f"{label}.m"], claims.table_point, pp, transcript, randomness),
        prove_eval(table.combined(claims.weights, field), t_commitment, claims.table_point, pp, transcript, randomness),
        prove_eval(s_values, s_commitment, claims.source_point, pp, transcript, randomness),
    ]
    return LookupFragment(len(np.asarray(columns[0]).reshape(-1)), proof, openings)


def _verify_fragment(
    fragment: LookupFragment,
    input_commitments: Sequence[TensorCommitment],
    table: LookupTable,
    transcript: Transcript,
    pp: PublicParams,
    max_retries: int,
    label: str,
) -> bool:
    field = pp.field
    p = field.modulus
    if len(fragment.openings) != 5:
        raise ProofRejected(f"{label}: expected 5 evaluation proofs, got {len(fragment.openings)}")
    if fragment.num_columns != table.width or len(input_commitments) != table.width:
        raise ProofRejected(f"{label}: fragment does not match the table width")
    for c, tc in zip(input_commitments, table.commitments):
        _bind_inputs(transcript, tc, c)
    channel = _TranscriptChannel(pp, transcript)
    claims = verify_lookup(fragment.proof, table, fragment.size, transcript, field, channel, label, max_retries)

    s_commitment = combine([c.public() for c in input_commitments], claims.weights)
    t_commitment = combine([c.public() for c in table.commitments], claims.weights)
    s_claim = sum(v * w for v, w in zip(claims.columns, claims.weights)) % p
    checks = [
        (channel.commitments[f"{label}.A"], claims.point, claims.a),
        (channel.commitments[f"{label}.B"], claims.table_point, claims.b),
        (channel.commitments[f"{label}.m"], claims.table_point, claims.m),
        (t_commitment, claims.table_point, claims.t),
        (s_commitment, claims.source_point, s_claim),
    ]
    for opening, (c, point, expected) in zip(fragment.openings, checks):
        if opening.claimed_value != expected:
            raise ProofRejected(f"{label}: opened value does not match the sumcheck claim")
        verify_eval(opening, c, point, pp, transcript)
    return True


def tlookup_prove(
    s: np.ndarray,
    s_commitment: TensorCommitment,
    table: LookupTable,
    transcript: Transcript,
    pp: PublicParams,
    m: Optional[np.ndarray] = None,
    blinding: Optional[BlindingSource] = None,
    max_retries: int = 8,
    label: str = "tlookup",
) -> LookupFragment:
    """
    Prove S ⊂ T for a committed S

    s_commitment must carry its blinders. With m omitted the multiplicities
    are counted here (values outside the table are skipped with a warning,
    which makes the proof fail verification).
    """
    return _prove_fragment([s], [s_commitment], table, transcript, pp, blinding, m, max_retries, label)


def tlookup_verify(
    fragment: LookupFragment,
    table: LookupTable,
    s_commitment: TensorCommitment,
    transcript: Transcript,
    pp: PublicParams,
    max_retries: int = 8,
    label: str = "tlookup",
) -> bool:
    """
    Raises:
        ProofRejected: if the fragment does not verify
    """
    return _verify_fragment(fragment, [s_commitment], table, transcript, pp, max_retries, label)


def function_lookup_prove(
    x: np.ndarray,
    y: np.ndarray,
    x_commitment: TensorCommitment,
    y_commitment: TensorCommitment,
    table: LookupTable,
    transcript: Transcript,
    pp: PublicParams,
    blinding: Optional[BlindingSource] = None,
    max_retries: int = 8,
    label: str = "fnlookup",
) -> LookupFragment:
    """
    Prove Y = f(X) elementwise against a two-column table (T_X, T_Y)

    Runs the membership argument on X + α·Y against T_X + α·T_Y; the
    commitment to X + α·Y is [X] + α·[Y].
    """
    if table.width != 2:
        raise ShapeError("function lookups need a two-column table")
    return _prove_fragment([x, y], [x_commitment, y_commitment], table, transcript, pp, blinding, None, max_retries, label)


def function_lookup_verify(
    fragment: LookupFragment,
    table: LookupTable,
    x_commitment: TensorCommitment,
    y_commitment: TensorCommitment,
    transcript: Transcript,
    pp: PublicParams,
    max_retries: int = 8,
    label: str = "fnlookup",
) -> bool:
    return _verify_fragment(fragment, [x_commitment, y_commitment], table, transcript, pp, max_retries, label)


# Session form: witness commitments join the session and every claim goes
# to the ledger; the table side is recomputed by the verifier.


class _SessionChannel:
    def __init__(self, session: Session):
        self.session = session

    def commit(self, name: str, values: np.ndarray) -> TensorCommitment:
        return self.session.commit_aux(name, values)

    def receive(self, name: str, size: int, c: TensorCommitment) -> None:
        self.session.receive_aux(name, size, c)


class LookupStage(Stage):
    """
    Every row (tensors[0][i], tensors[1][i], ...) lies in the table

    One tensor gives a range or membership check; two give a function
    lookup (input, output).
    """

    def __init__(self, label: str, tensors: Sequence[str], spec: TableSpec):
        self.label = label
        self.tensors = list(tensors)
        self.spec = spec
        if len(self.tensors) != spec.width:
            raise ShapeError(f"{label}: {len(self.tensors)} tensors for a table of width {spec.width}")

    def prove(self, session: ProverSession, writer: Writer) -> None:
        table = session.table(self.spec)
        columns = [session.value(name).reshape(-1) for name in self.tensors]
        proof, claims = prove_lookup(
            columns, table, session.transcript, session.field, _SessionChannel(session),
            self.label, session.max_retries,
        )
        proof.write(writer, len(columns))
        self._push(session, claims)

    def verify(self, session: VerifierSession, reader: Reader) -> None:
        table = session.table(self.spec)
        proof = LookupProof.read(reader, len(self.tensors))
        size = int(np.prod(session.shape(self.tensors[0])))
        claims = verify_lookup(
            proof, table, size, session.transcript, session.field, _SessionChannel(session),
            self.label, session.max_retries,
        )
        if mle_evaluate_flat(table.combined(claims.weights, session.field), claims.table_point, session.field) != claims.t:
            raise ProofRejected(f"{self.label}: table claim is wrong")
        self._push(session, claims)

    def _push(self, session: Session, claims: LookupClaims) -> None:
        session.claim(f"{self.label}.A", claims.point, claims.a, self.label)
        session.claim(f"{self.label}.B", claims.table_point, claims.b, self.label)
        session.claim(f"{self.label}.m", claims.table_point, claims.m, self.label)
        for name, value in zip(self.tensors, claims.columns):
            session.claim(name, claims.source_point, value, self.label)
