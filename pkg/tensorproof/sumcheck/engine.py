"""
Generic sumcheck over a fixed combination of multilinear tables

A Combination is a sum of terms, each a coefficient times a product of named
tables. The prover folds every table in place, one variable per round, most
significant variable first.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple
import logging

import numpy as np

from ..algebra.field import PrimeField
from ..algebra.transcript import Transcript
from ..errors import DecodeError, ProofRejected, ShapeError
from .mle import fold
from .tensor import log2_exact

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Term:
    coefficient: int
    factors: Tuple[str, ...]


@dataclass
class Combination:
    """Σ coefficient · Π factor over the hypercube"""

    terms: List[Term]

    @property
    def degree(self) -> int:
        return max((len(t.factors) for t in self.terms), default=0)

    @property
    def names(self) -> List[str]:
        seen: List[str] = []
        for t in self.terms:
            for f in t.factors:
                if f not in seen:
                    seen.append(f)
        return seen

    def evaluate(self, values: Mapping[str, int], field: PrimeField) -> int:
        p = field.modulus
        total = 0
        for t in self.terms:
            prod = t.coefficient % p
            for f in t.factors:
                prod = prod * values[f] % p
            total += prod
        return total % p


@dataclass
class SumcheckProof:
    round_polys: List[List[int]]
    final_claims: Dict[str, int] = field(default_factory=dict)
    final_point: List[int] = field(default_factory=list)

    @property
    def num_rounds(self) -> int:
        return len(self.round_polys)


@dataclass
class SumcheckResult:
    """What the verifier is left with after the rounds check out"""

    point: List[int]
    claims: Dict[str, int]


@lru_cache(maxsize=64)
def _lagrange_basis(degree: int, p: int) -> Tuple[Tuple[int, ...], ...]:
    """Coefficients of the Lagrange basis polynomials on nodes 0..degree"""
    nodes = list(range(degree + 1))
    basis = []
    for i in nodes:
        coeffs = [1]
        denom = 1
        for j in nodes:
            if j == i:
                continue
            # multiply by (x - j)
            nxt = [0] * (len(coeffs) + 1)
            for k, c in enumerate(coeffs):
                nxt[k] = (nxt[k] - j * c) % p
                nxt[k + 1] = (nxt[k + 1] + c) % p
            coeffs = nxt
            denom = denom * (i - j) % p
        inv = pow(denom, -1, p)
        basis.append(tuple(c * inv % p for c in coeffs))
    return tuple(basis)


def interpolate(evals: Sequence[int], field: PrimeField) -> List[int]:
    """Coefficients (low degree first) of the polynomial through (i, evals[i])"""
    p = field.modulus
    degree = len(evals) - 1
    out = [0] * (degree + 1)
    for e, row in zip(evals, _lagrange_basis(degree, p)):
        if e:
            for k, c in enumerate(row):
                out[k] = (out[k] + e * c) % p
    return out


def poly_eval(coeffs: Sequence[int], x: int, field: PrimeField) -> int:
    p = field.modulus
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def hypercube_sum(combination: Combination, tables: Mapping[str, np.ndarray], field: PrimeField) -> int:
    p = field.modulus
    size = len(next(iter(tables.values())))
    total = 0
    for t in combination.terms:
        prod = None
        for f in t.factors:
            prod = tables[f] if prod is None else prod * tables[f] % p
        total += t.coefficient * (int(prod.sum()) if prod is not None else size)
    return total % p


def _round_evals(
    combination: Combination,
    tables: Mapping[str, np.ndarray],
    degree_bound: int,
    p: int,
) -> List[int]:
    half = len(next(iter(tables.values()))) // 2
    lows = {k: v[:half] for k, v in tables.items()}
    diffs = {k: (v[half:] - v[:half]) % p for k, v in tables.items()}
    evals = []
    for x in range(degree_bound + 1):
        at_x = {k: (lows[k] + x * diffs[k]) % p for k in tables}
        total = 0
        for t in combination.terms:
            prod = None
            for f in t.factors:
                prod = at_x[f] if prod is None else prod * at_x[f] % p
            total += t.coefficient * (int(prod.sum()) if prod is not None else half)
        evals.append(total % p)
    return evals


def sumcheck_prove(
    combination: Combination,
    tables: Mapping[str, np.ndarray],
    degree_bound: int,
    claim: int,
    transcript: Transcript,
    field: PrimeField,
    label: bytes = b"sumcheck",
    public: Sequence[str] = (),
) -> SumcheckProof:
    """
    Prove Σ_i combination(tables at i) = claim

    Tables named in `public` are ones the verifier can evaluate itself; their
    final values are left out of the proof.
    """
    if combination.degree > degree_bound:
        raise ShapeError(f"combination degree {combination.degree} exceeds bound {degree_bound}")
    p = field.modulus
    names = combination.names
    sizes = {len(tables[n]) for n in names}
    if len(sizes) != 1:
        raise ShapeError(f"sumcheck tables differ in length: {sorted(sizes)}")
    num_vars = log2_exact(sizes.pop())
    work = {n: np.asarray(tables[n], dtype=object).reshape(-1) % p for n in names}

    transcript.absorb_scalars(label + b".claim", [claim])
    round_polys: List[List[int]] = []
    point: List[int] = []
    for _ in range(num_vars):
        coeffs = interpolate(_round_evals(combination, work, degree_bound, p), field)
        transcript.absorb_scalars(label + b".round", coeffs)
        r = transcript.challenge(label + b".r")
        round_polys.append(coeffs)
        point.append(r)
        work = {n: fold(v, r, p) for n, v in work.items()}

    finals = {n: int(work[n][0]) for n in names if n not in public}
    transcript.absorb_scalars(label + b".final", [finals[n] for n in names if n not in public])
    return SumcheckProof(round_polys=round_polys, final_claims=finals, final_point=point)


def sumcheck_verify(
    proof: SumcheckProof,
    combination: Combination,
    num_vars: int,
    degree_bound: int,
    claim: int,
    transcript: Transcript,
    field: PrimeField,
    label: bytes = b"sumcheck",
    public: Optional[Callable[[List[int]], Mapping[str, int]]] = None,
    public_names: Sequence[str] = (),
) -> SumcheckResult:
    """
    Check the rounds and the final combination

    Returns the evaluation obligations (the prover's final claims) to be
    discharged by openings or recomputation.

    Raises:
        ProofRejected: on any inconsistency
    """
    p = field.modulus
    if len(proof.round_polys) != num_vars:
        raise ProofRejected(f"expected {num_vars} rounds, got {len(proof.round_polys)}")

    transcript.absorb_scalars(label + b".claim", [claim])
    running = claim % p
    point: List[int] = []
    for i, coeffs in enumerate(proof.round_polys):
        if len(coeffs) > degree_bound + 1:
            raise ProofRejected(f"round {i} polynomial exceeds degree {degree_bound}")
        if (poly_eval(coeffs, 0, field) + poly_eval(coeffs, 1, field)) % p != running:
            raise ProofRejected(f"round {i} sum does not match the running claim")
        transcript.absorb_scalars(label + b".round", coeffs)
        r = transcript.challenge(label + b".r")
        point.append(r)
        running = poly_eval(coeffs, r, field)

    private = [n for n in combination.names if n not in public_names]
    if sorted(proof.final_claims) != sorted(private):
        raise ProofRejected("final claims do not match the combination")
    transcript.absorb_scalars(label + b".final", [proof.final_claims[n] for n in private])

    values = dict(proof.final_claims)
    if public_names:
        known = public(point) if public is not None else {}
        for n in public_names:
            if n not in known:
                raise ProofRejected(f"no public evaluation for {n}")
            values[n] = known[n] % p
    if combination.evaluate(values, field) != running:
        raise ProofRejected("final evaluation does not match the last round")
    proof.final_point = point
    return SumcheckResult(point=point, claims={n: proof.final_claims[n] for n in private})


def batch_claims(claims: Sequence[int], rho: int, field: PrimeField) -> int:
    """Σ_j rho^j · claims[j]"""
    p = field.modulus
    acc = 0
    for c in reversed(list(claims)):
        acc = (acc * rho + c) % p
    return acc


def check_round_shapes(round_polys: Sequence[Sequence[int]], degree_bound: int) -> None:
    for coeffs in round_polys:
        if len(coeffs) != degree_bound + 1:
            raise DecodeError("round polynomial has the wrong number of coefficients")
