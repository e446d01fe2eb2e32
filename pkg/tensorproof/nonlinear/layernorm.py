"""
Verified LayerNorm

For X of shape (R, n) at scale γ the stage commits the row sums S, the
scaled variances Q = Σ_c (n·X − S)² = n³γ²·var, the inverse square roots
and the affine product, then proves

- S = X·1 and Q together, one sumcheck batched with ρ,
- R⁻¹ = rsqrt(round(Q / s_d)) by a fused rescale and function lookup,
- P = (n·X − S)·R⁻¹·g + nγ²·b entrywise,
- Y = round(P / nγ²).

s_d is the power of two that maps the largest covered variance onto the
2^var_bits inputs of the inverse-sqrt table.
"""

from typing import Optional, Sequence, Tuple
import logging
import math

import numpy as np

from ..algebra.transcript import Transcript
from ..config import LayerNormConfig
from ..lookup.tables import TableSpec, function_table
from ..polycommit.blinding import BlindingSource
from ..polycommit.hyrax import PublicParams
from ..protocol.arith import COLS, EQ, EQ_ROWS, ROWS, Factor, prove_relation, verify_relation
from ..protocol.codec import Reader, Writer
from ..protocol.runner import StageProof, prove_stages, verify_stages
from ..protocol.session import ProverSession, Session, VerifierSession
from ..protocol.stage import CompositeStage, Stage, Trace
from .rescale import RescaleStage

logger = logging.getLogger(__name__)


def variance_scale(n: int, gamma: int, cfg: LayerNormConfig) -> int:
    """s_d = 2^ceil(log2(var_max · n³γ² / 2^var_bits)), at least 1"""
    span = (1 << cfg.var_max_log2) * n**3 * gamma**2
    return 1 << max(0, math.ceil(math.log2(span)) - cfg.var_bits)


def rsqrt_table(n: int, gamma: int, cfg: LayerNormConfig) -> TableSpec:
    """x ↦ round(γ / √(x·s_d/(n³γ²) + ε)) over [0, 2^var_bits)"""
    s_d = variance_scale(n, gamma, cfg)
    xs = np.arange(0, 1 << cfg.var_bits, dtype=np.int64)
    var = xs.astype(np.float64) * (s_d / (n**3 * gamma**2))
    ys = [int(v) for v in np.rint(gamma / np.sqrt(var + cfg.eps))]
    return function_table("rsqrt", xs, ys, s_d, n, gamma, cfg.eps)


def row_stats(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(S, Q) per row, exact"""
    x = np.asarray(x, dtype=object)
    n = x.shape[-1]
    s = x.sum(axis=-1)
    dev = n * x - s[..., None]
    return s, (dev * dev).sum(axis=-1)


class _StatsRelation(Stage):
    """S and Q from X: Σ_c eqR·(X + ρ(nX − S)²) = S̃(u) + ρQ̃(u)"""

    def __init__(self, owner: "LayerNormStage"):
        self.owner = owner
        self.label = f"{owner.label}.stats"

    def _terms(self, rho: int, p: int):
        o = self.owner
        n = o.cols
        x, s = Factor(o.x), Factor(o.s, ROWS)
        return [
            (1, (EQ_ROWS, x)),
            (rho * n * n % p, (EQ_ROWS, x, x)),
            (-2 * rho * n % p, (EQ_ROWS, x, s)),
            (rho, (EQ_ROWS, s, s)),
        ]

    def prove(self, session: ProverSession, writer: Writer) -> None:
        o = self.owner
        rho = session.transcript.challenge(self.label.encode() + b".rho")
        terms = self._terms(rho, session.field.modulus)
        prove_relation(session, writer, self.label, o.rows, o.cols, terms, claimed=[(1, o.s), (rho, o.q)])

    def verify(self, session: VerifierSession, reader: Reader) -> None:
        o = self.owner
        rho = session.transcript.challenge(self.label.encode() + b".rho")
        terms = self._terms(rho, session.field.modulus)
        verify_relation(session, reader, self.label, o.rows, o.cols, terms, claimed=[(1, o.s), (rho, o.q)])


class _AffineRelation(Stage):
    """P = n·X·R⁻¹·g − S·R⁻¹·g + nγ²·b"""

    def __init__(self, owner: "LayerNormStage"):
        self.owner = owner
        self.label = f"{owner.label}.affine"

    def _terms(self, p: int):
        o = self.owner
        n = o.cols
        rinv, gain = Factor(o.rinv, ROWS), Factor(o.gain, COLS)
        return [
            (1, (EQ, Factor(o.p))),
            (-n % p, (EQ, Factor(o.x), rinv, gain)),
            (1, (EQ, Factor(o.s, ROWS), rinv, gain)),
            (-n * o.gamma**2 % p, (EQ, Factor(o.bias, COLS))),
        ]

    def prove(self, session: ProverSession, writer: Writer) -> None:
        o = self.owner
        prove_relation(session, writer, self.label, o.rows, o.cols, self._terms(session.field.modulus))

    def verify(self, session: VerifierSession, reader: Reader) -> None:
        o = self.owner
        verify_relation(session, reader, self.label, o.rows, o.cols, self._terms(session.field.modulus))


class LayerNormStage(CompositeStage):
    """Y = LayerNorm(X)·g + b over the last axis, all at scale γ"""

    def __init__(
        self,
        label: str,
        x: str,
        gain: str,
        bias: str,
        out: str,
        shape: Sequence[int],
        gamma: int,
        cfg: Optional[LayerNormConfig] = None,
        budget_bits: int = 10,
        quotient_bits: int = 14,
    ):
        super().__init__(label)
        self.cfg = cfg or LayerNormConfig()
        self.x, self.gain, self.bias, self.out = x, gain, bias, out
        self.shape = tuple(shape)
        self.rows, self.cols = int(np.prod(self.shape[:-1])), self.shape[-1]
        self.gamma = gamma
        self.s, self.q = f"{label}.s", f"{label}.q"
        self.rinv, self.p = f"{label}.rinv", f"{label}.p"
        self.table = rsqrt_table(self.cols, gamma, self.cfg)
        self.var_scale = variance_scale(self.cols, gamma, self.cfg)
        self.parts = [
            _StatsRelation(self),
            RescaleStage(
                f"{label}.var", self.q, self.rinv, (self.rows,), self.var_scale,
                budget_bits, quotient_bits, fn=self.table,
            ),
            _AffineRelation(self),
            RescaleStage(
                f"{label}.rs", self.p, out, self.shape, self.cols * gamma**2, budget_bits, quotient_bits,
            ),
        ]

    def declare(self, session: Session) -> None:
        session.declare(self.s, (self.rows,))
        session.declare(self.q, (self.rows,))
        session.declare(self.p, (self.rows, self.cols))
        super().declare(session)

    def forward(self, trace: Trace) -> None:
        x = np.asarray(trace[self.x], dtype=object).reshape(self.rows, self.cols)
        s, q = row_stats(x)
        trace[self.s], trace[self.q] = s, q
        inverse, rescale = self.parts[1], self.parts[3]
        inverse.forward(trace)
        rinv = np.asarray(trace[self.rinv], dtype=object)[:, None]
        gain = np.asarray(trace[self.gain], dtype=object).reshape(1, self.cols)
        bias = np.asarray(trace[self.bias], dtype=object).reshape(1, self.cols)
        n = self.cols
        trace[self.p] = (n * x - s[:, None]) * rinv * gain + n * self.gamma**2 * bias
        rescale.forward(trace)
        trace[self.out] = trace[self.out].reshape(self.shape)


def layernorm_prove(
    x: np.ndarray,
    gain: np.ndarray,
    bias: np.ndarray,
    gamma: int,
    transcript: Transcript,
    pp: PublicParams,
    cfg: Optional[LayerNormConfig] = None,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    blinding: Optional[BlindingSource] = None,
    max_retries: int = 8,
) -> Tuple[np.ndarray, StageProof]:
    """
    Returns Y at scale γ and the proof

    Raises:
        RangeError: a row variance is above the inverse-sqrt table
    """
    x = np.asarray(x, dtype=np.int64)
    stage = LayerNormStage("ln", "x", "g", "b", "out", x.shape, gamma, cfg, budget_bits, quotient_bits)
    inputs = {"x": x, "g": np.asarray(gain, dtype=np.int64), "b": np.asarray(bias, dtype=np.int64)}
    proof, trace = prove_stages([stage], inputs, pp, transcript, blinding=blinding, max_retries=max_retries)
    return trace["out"], proof


def layernorm_verify(
    proof: StageProof,
    shape: Sequence[int],
    gamma: int,
    transcript: Transcript,
    pp: PublicParams,
    cfg: Optional[LayerNormConfig] = None,
    budget_bits: int = 10,
    quotient_bits: int = 14,
    max_retries: int = 8,
) -> bool:
    stage = LayerNormStage("ln", "x", "g", "b", "out", shape, gamma, cfg, budget_bits, quotient_bits)
    n = tuple(shape)[-1]
    shapes = {"x": tuple(shape), "g": (n,), "b": (n,)}
    return verify_stages([stage], shapes, proof, pp, transcript, max_retries=max_retries)
