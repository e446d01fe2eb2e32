"""
Hiding inner-product argument

Proves knowledge of a committed vector a (P = ⟨a, G⟩ + ρ·H) with ⟨a, b⟩ = y
for a public b. Each round halves the vector and sends one (L, R) pair; the
last scalar is closed with a Schnorr-style proof so a itself stays hidden.

Generators are never folded on the prover side: the fold coefficients of
every original generator are tracked as field elements and each round
commitment is a single MSM over the original generators.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..algebra.field import PrimeField
from ..algebra.group import Group, GroupElement
from ..algebra.transcript import Transcript
from ..errors import ProofRejected
from .blinding import BlindingSource


@dataclass
class InnerProductProof:
    left: List[GroupElement]
    right: List[GroupElement]
    closing: GroupElement
    z1: int
    z2: int

    @property
    def num_rounds(self) -> int:
        return len(self.left)


def fold_coefficients(xs: Sequence[int], field: PrimeField) -> np.ndarray:
    """s_i = Π_j x_j^(±1), sign from bit j of i (most significant first)"""
    p = field.modulus
    s = np.empty(1, dtype=object)
    s[0] = 1
    for x in xs:
        x_inv = pow(x, -1, p)
        s = np.stack([s * x_inv % p, s * x % p], axis=1).reshape(-1)
    return s


def prove_inner_product(
    group: Group,
    field: PrimeField,
    generators: Sequence[GroupElement],
    blinding_generator: GroupElement,
    u_prime_base: GroupElement,
    u_weight: int,
    a: np.ndarray,
    b: np.ndarray,
    blinder: int,
    transcript: Transcript,
    randomness: BlindingSource,
) -> InnerProductProof:
    """
    P = ⟨a, G⟩ + ⟨a, b⟩·U' + ρ·H with U' = u_weight·U

    The caller has already bound P (or what it is computed from) into the
    transcript.
    """
    p = field.modulus
    n = len(a)
    gens = list(generators[:n])
    a = np.asarray(a, dtype=object) % p
    b = np.asarray(b, dtype=object) % p
    coef = np.empty(n, dtype=object)
    coef[:] = [1] * n
    positions = np.arange(n)
    rho = blinder % p

    left, right = [], []
    width = n
    while width > 1:
        half = width // 2
        a_lo, a_hi = a[:half], a[half:]
        b_lo, b_hi = b[:half], b[half:]
        c_l = int(np.dot(a_lo, b_hi)) % p
        c_r = int(np.dot(a_hi, b_lo)) % p
        l_blind, r_blind = randomness.next(), randomness.next()

        slot = positions % width
        hi_mask = slot >= half
        lo_mask = ~hi_mask
        # ⟨a_lo, G_hi⟩ and ⟨a_hi, G_lo⟩ over the original generators
        l_scalars = [int(a_lo[s - half] * c % p) for s, c in zip(slot[hi_mask], coef[hi_mask])]
        l_bases = [gens[i] for i in positions[hi_mask]]
        r_scalars = [int(a_hi[s] * c % p) for s, c in zip(slot[lo_mask], coef[lo_mask])]
        r_bases = [gens[i] for i in positions[lo_mask]]

        l_point = group.msm(
            l_scalars + [c_l * u_weight % p, l_blind],
            l_bases + [u_prime_base, blinding_generator],
        )
        r_point = group.msm(
            r_scalars + [c_r * u_weight % p, r_blind],
            r_bases + [u_prime_base, blinding_generator],
        )
        transcript.absorb(b"ipa.lr", group.encode(l_point) + group.encode(r_point))
        x = transcript.challenge_nonzero(b"ipa.x")
        x_inv = pow(x, -1, p)
        x2, x2_inv = x * x % p, x_inv * x_inv % p

        a = (a_lo * x + a_hi * x_inv) % p
        b = (b_lo * x_inv + b_hi * x) % p
        coef = np.where(lo_mask, coef * x_inv % p, coef * x % p)
        rho = (rho + x2 * l_blind + x2_inv * r_blind) % p
        left.append(l_point)
        right.append(r_point)
        width = half

    a0, b0 = int(a[0]), int(b[0])
    k1, k2 = randomness.next(), randomness.next()
    closing = group.msm(
        [int(c) * k1 % p for c in coef] + [k1 * b0 % p * u_weight % p, k2],
        gens + [u_prime_base, blinding_generator],
    )
    transcript.absorb(b"ipa.closing", group.encode(closing))
    c = transcript.challenge(b"ipa.c")
    return InnerProductProof(
        left=left,
        right=right,
        closing=closing,
        z1=(k1 + c * a0) % p,
        z2=(k2 + c * rho) % p,
    )


def verify_inner_product(
    group: Group,
    field: PrimeField,
    generators: Sequence[GroupElement],
    blinding_generator: GroupElement,
    u_base: GroupElement,
    u_weight: int,
    commitment_terms: List,
    y: int,
    b: np.ndarray,
    proof: InnerProductProof,
    transcript: Transcript,
) -> bool:
    """
    Check the argument with one MSM

    commitment_terms are (scalar, point) pairs whose sum is the commitment
    ⟨a, G⟩ + ρ·H to the folded vector.
    """
    p = field.modulus
    n = len(b)
    if len(proof.left) != len(proof.right) or 2 ** len(proof.left) != n:
        raise ProofRejected("inner-product proof has the wrong number of rounds")

    xs = []
    for l_point, r_point in zip(proof.left, proof.right):
        transcript.absorb(b"ipa.lr", group.encode(l_point) + group.encode(r_point))
        xs.append(transcript.challenge_nonzero(b"ipa.x"))
    transcript.absorb(b"ipa.closing", group.encode(proof.closing))
    c = transcript.challenge(b"ipa.c")

    s = fold_coefficients(xs, field)
    b0 = int(np.dot(s, np.asarray(b, dtype=object))) % p

    # z1·(G0 + b0·U') + z2·H - c·(P + y·U' + Σ x²L + x⁻²R) must equal the closing commitment
    scalars = [int(v) * proof.z1 % p for v in s]
    bases = list(generators[:n])
    scalars.append((proof.z1 * b0 - c * y) % p * u_weight % p)
    bases.append(u_base)
    scalars.append(proof.z2)
    bases.append(blinding_generator)
    for k, point in commitment_terms:
        scalars.append(-c * k % p)
        bases.append(point)
    for x, l_point, r_point in zip(xs, proof.left, proof.right):
        x_inv = pow(x, -1, p)
        scalars.append(-c * x * x % p)
        bases.append(l_point)
        scalars.append(-c * x_inv * x_inv % p)
        bases.append(r_point)

    if not group.eq(group.msm(scalars, bases), proof.closing):
        raise ProofRejected("inner-product check failed")
    return True
