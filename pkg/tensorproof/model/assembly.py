"""
Proof assembly for the whole model

zkllm_commit commits the weights once. zkllm_prove reruns the forward pass,
commits every activation the schedule declares, proves the stages back to
front and opens the claim ledger against the activation and weight
commitments. zkllm_verify rebuilds the same schedule from the config and
walks the fragments in the same order; the chain ends at the public one-hot
input and key mask, the public logits and the weight commitments.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging
import re

from ..algebra.group import get_group
from ..algebra.transcript import Transcript
from ..attention.mask import key_mask
from ..attention.params import ZkAttnParams
from ..config import ProverConfig
from ..errors import BindingError, ChallengeCollision, ConfigError, ProofRejected, ShapeError
from ..polycommit.blinding import BlindingSource
from ..polycommit.hyrax import PublicParams, TensorCommitment, commit, keygen
from ..protocol.codec import KIND_PROOF, Reader, Writer, read_header, write_header
from ..protocol.runner import StageProof
from ..protocol.session import ProverSession, Session, VerifierSession
from ..protocol.stage import StageChain
from .forward import ModelOutput, check_prompt, greedy_token, one_hot, padded_length, run_schedule
from .schedule import (
    KEYS,
    LOGITS,
    ONEHOT,
    ModelSchedule,
    activation_params,
    attention_params,
    build_schedule,
    required_log_dim,
)
from .weights import WeightSet, committed_shapes

logger = logging.getLogger(__name__)

TRANSCRIPT_LABEL = b"tensorproof.zkllm"

_LAYER_PREFIX = re.compile(r"^layers\.\d+\.")


@dataclass
class ProofBundle:
    """One forward-pass proof plus the public facts it was made for"""

    config_digest: bytes
    prompt_len: int
    seq: int
    proof: StageProof = field(default_factory=StageProof)

    @property
    def fragments(self) -> List[Tuple[str, bytes]]:
        return self.proof.fragments

    def to_bytes(self, pp: PublicParams) -> bytes:
        w = Writer(pp.field, pp.group)
        write_header(w, KIND_PROOF)
        w.blob(self.config_digest)
        w.u16(self.prompt_len)
        w.u16(self.seq)
        w.raw(self.proof.to_bytes(pp))
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes, pp: PublicParams) -> "ProofBundle":
        """
        Raises:
            DecodeError: malformed bytes
        """
        r = Reader(data, pp.field, pp.group)
        read_header(r, KIND_PROOF)
        digest = r.blob()
        prompt_len = r.u16()
        seq = r.u16()
        proof = StageProof.from_bytes(r.raw(r.remaining), pp)
        return cls(digest, prompt_len, seq, proof)

    def size_report(self, pp: PublicParams) -> Dict[str, int]:
        """Serialized bytes by part; per-layer fragments are summed across layers"""
        report: Dict[str, int] = {"commitments": 0}
        for name, c in self.proof.commitments:
            w = Writer(pp.field, pp.group)
            w.text(name)
            w.commitment(c)
            report["commitments"] += len(w)
        for label, data in self.proof.fragments:
            key = "layers.*." + _LAYER_PREFIX.sub("", label) if _LAYER_PREFIX.match(label) else label
            report[key] = report.get(key, 0) + len(data) + len(label) + 8
        report["openings"] = len(self.proof.openings)
        report["total"] = len(self.to_bytes(pp))
        return report


@dataclass
class SetupResult:
    pp: PublicParams
    attention: ZkAttnParams
    sigmoid: Optional[ZkAttnParams]

    def params_dict(self, config: ProverConfig) -> Dict[str, Any]:
        return {
            "config": config.to_dict(),
            "log_dim": self.pp.max_log_dim,
            "attention": self.attention.to_dict(),
            "sigmoid": self.sigmoid.to_dict() if self.sigmoid is not None else None,
        }


def zkllm_setup(config: ProverConfig, seed: Optional[bytes] = None) -> SetupResult:
    """
    Public parameters sized for the config, plus the derived softmax layouts

    Raises:
        ParamError: a softmax layout cannot be realized
    """
    attention = attention_params(config)
    sigmoid = activation_params(config)
    group = get_group(config.commit.group.value)
    log_dim = required_log_dim(config)
    pp = keygen(log_dim, seed if seed is not None else config.commit.seed.encode(), group)
    logger.info(
        f"setup for {group.name} with capacity 2^{log_dim}",
        extra={"log_dim": log_dim, "segments": attention.segments},
    )
    return SetupResult(pp, attention, sigmoid)


def zkllm_commit(
    weights: WeightSet,
    pp: PublicParams,
    blinding: BlindingSource,
    batch_layers: bool = False,
    workers: int = 1,
) -> Dict[str, TensorCommitment]:
    """
    One commitment per weight tensor (or per stacked kind when batching)

    Each tensor gets its own blinder stream forked from `blinding`, so the
    same seed reproduces the same commitments in any thread order.

    Raises:
        CapacityError: a tensor does not fit the public parameters
    """
    tensors = weights.committed(batch_layers)

    def _one(name: str) -> TensorCommitment:
        return commit(tensors[name], pp, blinding.fork(f"weight:{name}"))

    names = list(tensors)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(_one, names))
    logger.info(
        f"committed {len(names)} weight tensors",
        extra={"tensors": len(names), "workers": workers, "batch_layers": batch_layers},
    )
    return dict(zip(names, results))


def new_transcript(pp: PublicParams, config: ProverConfig, prompt_len: int, seq: int) -> Transcript:
    transcript = Transcript(pp.field, TRANSCRIPT_LABEL)
    transcript.absorb(b"config", config.digest())
    transcript.absorb_int(b"prompt_len", prompt_len)
    transcript.absorb_int(b"seq", seq)
    return transcript


def _declare_weights(session: Session, schedule: ModelSchedule) -> Dict[str, Tuple[int, ...]]:
    shapes = committed_shapes(schedule.config.model, schedule.config.commit.batch_layers)
    for name, shape in shapes.items():
        session.declare(name, shape)
    return shapes


def _declare_weight_views(session: Session, schedule: ModelSchedule) -> None:
    for name, view in schedule.weight_views:
        session.declare_view(name, view)


def check_binding(own: Dict[str, TensorCommitment], published: Dict[str, TensorCommitment]) -> None:
    """
    Raises:
        BindingError: the weights do not open the published commitments
    """
    if set(own) != set(published):
        raise BindingError(f"commitment set mismatch: {sorted(set(own) ^ set(published))}")
    for name, c in own.items():
        if c != published[name]:
            raise BindingError(f"weights {name} do not match the published commitment")


def zkllm_prove(
    weights: WeightSet,
    tokens: Sequence[int],
    pp: PublicParams,
    blinding: BlindingSource,
    config: Optional[ProverConfig] = None,
    commitments: Optional[Dict[str, TensorCommitment]] = None,
    tracer=None,
    workers: int = 1,
) -> Tuple[ModelOutput, ProofBundle]:
    """
    Prove one forward pass

    `blinding` must be the source the weights were committed with; the
    recomputed commitments are checked against `commitments` when given.

    Returns the public output and the proof bundle.

    Raises:
        BindingError: weights differ from the published commitments
        ConfigError: the weights or parameters belong to another config
        ShapeError: bad prompt
        RangeError: an intermediate value leaves its table domain
        CapacityError: a tensor does not fit the public parameters
    """
    config = config or ProverConfig(model=weights.config)
    if weights.config != config.model:
        raise ConfigError("weights were built for a different model config")
    if pp.group.name != config.commit.group.value:
        raise ConfigError(f"parameters use {pp.group.name}, config asks for {config.commit.group.value}")
    tokens = [int(t) for t in tokens]
    check_prompt(tokens, config)
    batch = config.commit.batch_layers

    own = zkllm_commit(weights, pp, blinding, batch, workers)
    if commitments is not None:
        check_binding(own, commitments)

    schedule = build_schedule(config, padded_length(len(tokens)))
    output, trace = run_schedule(schedule, weights, tokens, tracer)

    transcript = new_transcript(pp, config, len(tokens), schedule.seq)
    session = ProverSession(pp, transcript, blinding.fork("activations"), config.lookup.max_retries)
    session.declare_public(ONEHOT, trace[ONEHOT])
    session.declare_public(KEYS, trace[KEYS])
    session.declare_public(LOGITS, trace[LOGITS])
    committed = weights.committed(batch)
    for name in _declare_weights(session, schedule):
        session.attach(name, own[name], committed[name])
    _declare_weight_views(session, schedule)

    chain = StageChain(tracer)
    chain.extend(schedule.stages)
    chain.declare(session)
    for name in session.pending:
        session.set_value(name, trace[name])
    activations = [(name, c.public()) for name, c in session.commit_pending()]
    fragments = chain.prove(session)
    writer = Writer(session.field, session.group)
    opened = session.open_claims(writer)

    bundle = ProofBundle(config.digest(), len(tokens), schedule.seq, StageProof(activations, fragments, writer.getvalue()))
    logger.info(
        f"proved forward pass over {len(tokens)} tokens",
        extra={
            "fragments": len(fragments),
            "activations": len(activations),
            "openings": opened,
            "next_token": output.next_token,
        },
    )
    return output, bundle


def zkllm_verify(
    tokens: Sequence[int],
    output: ModelOutput,
    commitments: Dict[str, TensorCommitment],
    bundle: ProofBundle,
    pp: PublicParams,
    config: ProverConfig,
    tracer=None,
) -> bool:
    """
    Check a proof bundle against the prompt, the claimed output and [W]

    Returns True to accept and False to reject.

    Raises:
        DecodeError: a fragment is malformed (distinct from a reject)
    """
    try:
        _verify(tokens, output, commitments, bundle, pp, config, tracer)
    except (ProofRejected, ShapeError, ChallengeCollision) as e:
        logger.info(f"proof rejected: {e}", extra={"reason": type(e).__name__})
        return False
    logger.info("proof accepted", extra={"fragments": len(bundle.fragments)})
    return True


def _verify(
    tokens: Sequence[int],
    output: ModelOutput,
    commitments: Dict[str, TensorCommitment],
    bundle: ProofBundle,
    pp: PublicParams,
    config: ProverConfig,
    tracer,
) -> None:
    m = config.model
    if bundle.config_digest != config.digest():
        raise ProofRejected("proof was made for a different config")
    if pp.group.name != config.commit.group.value:
        raise ProofRejected(f"parameters use {pp.group.name}, config asks for {config.commit.group.value}")
    tokens = [int(t) for t in tokens]
    check_prompt(tokens, config)
    if list(output.tokens) != tokens:
        raise ProofRejected("output belongs to a different prompt")
    seq = padded_length(len(tokens))
    if bundle.prompt_len != len(tokens) or bundle.seq != seq:
        raise ProofRejected(f"proof covers {bundle.prompt_len} tokens padded to {bundle.seq}")
    logits = output.logits
    if logits.shape != (seq, m.vocab):
        raise ProofRejected(f"logits have shape {logits.shape}, expected {(seq, m.vocab)}")
    if output.scale_log2 != 2 * m.gamma_log2:
        raise ProofRejected(f"logits scale 2^{output.scale_log2} does not match the config")
    if output.next_token != greedy_token(logits, len(tokens)):
        raise ProofRejected("next token is not the argmax of the logits")

    schedule = build_schedule(config, seq)
    transcript = new_transcript(pp, config, len(tokens), seq)
    session = VerifierSession(pp, transcript, config.lookup.max_retries)
    session.declare_public(ONEHOT, one_hot(tokens, m.vocab, seq))
    session.declare_public(KEYS, key_mask(len(tokens), seq))
    session.declare_public(LOGITS, logits)
    shapes = _declare_weights(session, schedule)
    if set(commitments) != set(shapes):
        raise ProofRejected(f"weight commitments do not match the model: {sorted(set(commitments) ^ set(shapes))}")
    for name in shapes:
        session.receive(name, commitments[name])
    _declare_weight_views(session, schedule)

    chain = StageChain(tracer)
    chain.extend(schedule.stages)
    chain.declare(session)
    proof = bundle.proof
    names = [n for n, _ in proof.commitments]
    if names != session.pending:
        raise ProofRejected("activation commitments do not match the schedule")
    for name, c in proof.commitments:
        session.receive(name, c)
    chain.verify(session, proof.fragments)
    reader = Reader(proof.openings, session.field, session.group)
    session.verify_openings(reader)
    reader.finish()
    missing = session.undischarged()
    if missing:
        raise ProofRejected(f"undischarged claims on {missing}")
