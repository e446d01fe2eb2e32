"""
Stage schedule for the transformer

Pre-LN layers over a right-padded prompt of R rows:

    X0 = onehot(tokens)·E + P[:R]
    X ← X + Attn(LN1(X)),  X ← X + MLP(LN2(X))
    logits = LN_f(X)·W_U          (scale γ², public)

Scores against padding keys are replaced by a constant before the softmax,
so the real rows do not depend on the padding.

Heads are views: Q and V are split into (H, R, d_head) by an axis
permutation, Kᵀ per head likewise, and the head outputs are merged back
into (R, D) before W_O. Prover and verifier build the same schedule from
the config and the padded length, so fragment labels line up.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple
import logging
import math

from ..attention.mask import KeyMaskStage, mask_fill
from ..attention.params import ZkAttnParams, params_from_config
from ..attention.protocol import SoftmaxStage
from ..attention.tables import SegmentTables, build_tables
from ..config import Activation, ProverConfig
from ..errors import ShapeError
from ..nonlinear.activations import GELU_SLOPE, GeluStage, SwigluStage, sigmoid_params
from ..nonlinear.layernorm import LayerNormStage
from ..nonlinear.rescale import RescaleStage, relu_table
from ..protocol.arith import LinearStage, MatmulStage
from ..protocol.stage import Stage, ViewStage
from ..protocol.views import AxisPermutation, LayerSlice, RowPrefix, View
from ..sumcheck.tensor import next_pow2
from .weights import committed_shapes, layer_shapes

logger = logging.getLogger(__name__)

ONEHOT = "input.onehot"
KEYS = "input.keys"  # 1 for real positions, 0 for padding
LOGITS = "logits"


@dataclass
class ModelSchedule:
    """Stages of one forward pass plus the weight views they read"""

    config: ProverConfig
    seq: int
    attention: ZkAttnParams
    sigmoid: Optional[ZkAttnParams]
    stages: List[Stage] = field(default_factory=list)
    weight_views: List[Tuple[str, View]] = field(default_factory=list)

    @property
    def labels(self) -> List[str]:
        return [s.label for s in self.stages if s.has_fragment]


def attention_params(config: ProverConfig) -> ZkAttnParams:
    """Softmax parameters for rows of max_seq scores; shorter rows reuse them"""
    m = config.model
    return params_from_config(m.attention, m.gamma, m.d_head, m.max_seq)


def activation_params(config: ProverConfig) -> Optional[ZkAttnParams]:
    m = config.model
    if m.activation == Activation.GELU:
        return sigmoid_params(m.sigmoid, m.gamma, GELU_SLOPE)
    if m.activation == Activation.SWIGLU:
        return sigmoid_params(m.sigmoid, m.gamma, 1.0)
    return None


def required_log_dim(config: ProverConfig) -> int:
    """Generator capacity for the largest tensor any proof commits"""
    if config.commit.max_log_dim is not None:
        return config.commit.max_log_dim
    m, lk = config.model, config.lookup
    sizes = [math.prod(s) for s in committed_shapes(m, config.commit.batch_layers).values()]
    sizes += [
        m.heads * m.max_seq * m.max_seq,
        2 * m.max_seq * m.d_ff,
        m.max_seq * m.vocab,
        1 << lk.budget_bits,
        1 << lk.quotient_bits,
        1 << m.layernorm.var_bits,
        1 << m.attention.table_budget_log2,
    ]
    if m.activation != Activation.RELU:
        sizes.append(1 << m.sigmoid.table_budget_log2)
    return max(1, (next_pow2(max(sizes)) - 1).bit_length())


class _Builder:
    def __init__(self, config: ProverConfig, seq: int, attn: ZkAttnParams, sig: Optional[ZkAttnParams]):
        self.m = config.model
        self.budget = config.lookup.budget_bits
        self.qbits = config.lookup.quotient_bits
        self.seq = seq
        self.attn = attn
        self.sig = sig
        self.attn_tables: SegmentTables = build_tables(attn)
        self.fill = mask_fill(attn, self.qbits)
        self.sig_tables: Optional[SegmentTables] = build_tables(sig) if sig is not None else None
        self.stages: List[Stage] = []

    def add(self, *stages: Stage) -> None:
        self.stages.extend(stages)

    def rescale(self, label: str, src: str, out: str, shape, scale: int, fn=None) -> None:
        self.add(RescaleStage(label, src, out, shape, scale, self.budget, self.qbits, fn))

    def project(self, prefix: str, src: str, weight: str, cols: int, fn=None) -> str:
        """src·W rescaled back to γ"""
        out = prefix
        self.add(MatmulStage(f"{prefix}.mm", src, weight, f"{prefix}.raw", (self.seq, cols)))
        self.rescale(f"{prefix}.rs", f"{prefix}.raw", out, (self.seq, cols), self.m.gamma, fn)
        return out

    def embedding(self) -> str:
        m, r = self.m, self.seq
        self.add(
            MatmulStage("embed.mm", ONEHOT, "embed", "embed.tok", (r, m.d_model)),
            ViewStage("pos.rows", RowPrefix("pos", (m.max_seq, m.d_model), r)),
            LinearStage(
                "embed.add", [(1, "embed.tok"), (1, "pos.rows"), (-1, "x0")], output="x0", shape=(r, m.d_model),
            ),
        )
        return "x0"

    def attention(self, p: str, h: str) -> str:
        m, r = self.m, self.seq
        heads, dh, d = m.heads, m.d_head, m.d_model
        for name in ("q", "k", "v"):
            self.project(f"{p}.{name}", h, f"{p}.w{name}", d)
        split = (r, heads, dh)
        self.add(
            ViewStage(f"{p}.qh", AxisPermutation(f"{p}.q", split, (1, 0, 2))),
            ViewStage(f"{p}.kt", AxisPermutation(f"{p}.k", split, (1, 2, 0))),
            ViewStage(f"{p}.vh", AxisPermutation(f"{p}.v", split, (1, 0, 2))),
            MatmulStage(f"{p}.qk", f"{p}.qh", f"{p}.kt", f"{p}.scores", (heads, r, r)),
        )
        self.rescale(f"{p}.z.rs", f"{p}.scores", f"{p}.z", (heads, r, r), m.gamma)
        self.add(
            KeyMaskStage(f"{p}.mask", f"{p}.z", KEYS, f"{p}.zm", (heads, r, r), self.fill),
            SoftmaxStage(f"{p}.softmax", f"{p}.zm", f"{p}.y", (heads, r, r), self.attn, self.attn_tables),
            MatmulStage(f"{p}.yv", f"{p}.y", f"{p}.vh", f"{p}.ctx.raw", (heads, r, dh)),
        )
        self.rescale(f"{p}.ctx.rs", f"{p}.ctx.raw", f"{p}.ctx", (heads, r, dh), self.attn.theta)
        self.add(ViewStage(f"{p}.ctxm", AxisPermutation(f"{p}.ctx", (heads, r, dh), (1, 0, 2), reshape=(r, d))))
        return self.project(f"{p}.attn", f"{p}.ctxm", f"{p}.wo", d)

    def mlp(self, p: str, h: str) -> str:
        m, r = self.m, self.seq
        shape = (r, m.d_ff)
        if m.activation == Activation.RELU:
            act = self.project(f"{p}.relu", h, f"{p}.w1", m.d_ff, fn=relu_table(self.qbits))
        elif m.activation == Activation.GELU:
            g = self.project(f"{p}.g", h, f"{p}.w1", m.d_ff)
            act = f"{p}.act"
            self.add(GeluStage(f"{p}.gelu", g, act, shape, self.sig, self.budget, self.qbits, self.sig_tables))
        else:
            g = self.project(f"{p}.g", h, f"{p}.w1", m.d_ff)
            u = self.project(f"{p}.u", h, f"{p}.w3", m.d_ff)
            act = f"{p}.act"
            self.add(SwigluStage(f"{p}.swiglu", g, u, act, shape, self.sig, self.budget, self.qbits, self.sig_tables))
        return self.project(f"{p}.mlp", act, f"{p}.w2", m.d_model)

    def layernorm(self, label: str, x: str, prefix: str, out: str) -> str:
        m = self.m
        self.add(LayerNormStage(
            label, x, f"{prefix}.g", f"{prefix}.b", out, (self.seq, m.d_model), m.gamma,
            m.layernorm, self.budget, self.qbits,
        ))
        return out

    def residual(self, label: str, x: str, delta: str, out: str) -> str:
        self.add(LinearStage(label, [(1, x), (1, delta), (-1, out)], output=out, shape=(self.seq, self.m.d_model)))
        return out

    def layer(self, i: int, x: str) -> str:
        p = f"layers.{i}"
        h1 = self.layernorm(f"{p}.ln1", x, f"{p}.ln1", f"{p}.h1")
        x1 = self.residual(f"{p}.res1", x, self.attention(p, h1), f"{p}.x1")
        h2 = self.layernorm(f"{p}.ln2", x1, f"{p}.ln2", f"{p}.h2")
        return self.residual(f"{p}.res2", x1, self.mlp(p, h2), f"{p}.x2")

    def head(self, x: str) -> None:
        m, r = self.m, self.seq
        hf = self.layernorm("lnf", x, "lnf", "hf")
        self.add(MatmulStage("logits.mm", hf, "unembed", LOGITS, (r, m.vocab), commit_output=False))


def build_schedule(config: ProverConfig, seq: int) -> ModelSchedule:
    """
    Stages for a prompt padded to `seq` rows

    Raises:
        ShapeError: seq is not a power of two or exceeds max_seq
        ParamError: the softmax layout is infeasible
    """
    m = config.model
    if seq < 1 or seq & (seq - 1) or seq > m.max_seq:
        raise ShapeError(f"padded length {seq} must be a power of two no larger than {m.max_seq}")
    attn = attention_params(config)
    sig = activation_params(config)
    b = _Builder(config, seq, attn, sig)
    x = b.embedding()
    for i in range(m.layers):
        x = b.layer(i, x)
    b.head(x)

    views: List[Tuple[str, View]] = []
    if config.commit.batch_layers:
        for kind in layer_shapes(m):
            stacked = committed_shapes(m, True)[f"stack.{kind}"]
            for i in range(m.layers):
                views.append((f"layers.{i}.{kind}", LayerSlice(f"stack.{kind}", stacked, i)))
    logger.debug(
        f"schedule with {len(b.stages)} stages for {seq} rows",
        extra={"stages": len(b.stages), "seq": seq, "layers": m.layers},
    )
    return ModelSchedule(config, seq, attn, sig, b.stages, views)
