"""
On-disk formats

Binary files (public parameters, weights, commitments, proofs) start with
the ZKT1 header and use the protocol codec. JSON documents (prompt, output,
params, blinder sidecar) are validated with pydantic; a document that fails
validation is a DecodeError.
"""

from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar
import json
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..algebra.group import get_group
from ..config import ProverConfig
from ..errors import DecodeError
from ..polycommit.hyrax import PublicParams, TensorCommitment
from ..protocol.codec import (
    KIND_COMMITMENTS,
    KIND_PROOF,
    KIND_PUBLIC_PARAMS,
    KIND_WEIGHTS,
    Reader,
    Writer,
    read_header,
    write_header,
)
from .assembly import ProofBundle
from .forward import ModelOutput
from .weights import WeightSet

logger = logging.getLogger(__name__)

Doc = TypeVar("Doc", bound=BaseModel)


class StrictDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PromptDoc(StrictDoc):
    tokens: List[int] = Field(min_length=1)

    @field_validator("tokens")
    @classmethod
    def non_negative(cls, v: List[int]) -> List[int]:
        if any(t < 0 for t in v):
            raise ValueError("token ids must be non-negative")
        return v


class OutputDoc(StrictDoc):
    tokens: List[int] = Field(min_length=1)
    logits: List[List[int]]
    scale_log2: int = Field(ge=0)
    next_token: int = Field(ge=0)


class BlinderDoc(StrictDoc):
    seed: str = Field(description="hex-encoded blinding seed")

    @field_validator("seed")
    @classmethod
    def is_hex(cls, v: str) -> str:
        try:
            raw = bytes.fromhex(v)
        except ValueError as e:
            raise ValueError(f"seed is not hex: {e}") from e
        if not raw:
            raise ValueError("seed is empty")
        return v


class ParamsDoc(StrictDoc):
    config: Dict[str, Any]
    log_dim: int = Field(ge=1)
    attention: Dict[str, Any]
    sigmoid: Optional[Dict[str, Any]] = None


class TensorEntry(StrictDoc):
    name: str
    shape: List[int]


class WeightHeader(StrictDoc):
    config: Dict[str, Any]
    tensors: List[TensorEntry]


def _read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _write_bytes(path: str, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


def read_doc(path: str, model: Type[Doc]) -> Doc:
    """
    Raises:
        OSError: the file cannot be read
        DecodeError: not JSON, or not a valid document
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_doc(text, model, path)


def parse_doc(text: str, model: Type[Doc], source: str = "document") -> Doc:
    try:
        return model.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise DecodeError(f"{source}: invalid JSON: {e}") from e
    except ValidationError as e:
        raise DecodeError(f"{source}: {e.error_count()} validation errors: {e.errors()[0]['msg']}") from e


def write_doc(path: str, doc: BaseModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(doc.model_dump_json(indent=2))
        fh.write("\n")


# Prompt and output

def read_prompt(path: str) -> List[int]:
    return read_doc(path, PromptDoc).tokens


def write_prompt(path: str, tokens: List[int]) -> None:
    write_doc(path, PromptDoc(tokens=[int(t) for t in tokens]))


def output_doc(output: ModelOutput) -> OutputDoc:
    return OutputDoc(
        tokens=list(output.tokens),
        logits=np.asarray(output.logits, dtype=np.int64).tolist(),
        scale_log2=output.scale_log2,
        next_token=output.next_token,
    )


def read_output(path: str) -> ModelOutput:
    doc = read_doc(path, OutputDoc)
    widths = {len(row) for row in doc.logits}
    if len(widths) > 1:
        raise DecodeError(f"{path}: logits rows differ in length")
    return ModelOutput(
        tokens=doc.tokens,
        logits=np.asarray(doc.logits, dtype=np.int64),
        scale_log2=doc.scale_log2,
        next_token=doc.next_token,
    )


def write_output(path: str, output: ModelOutput) -> None:
    write_doc(path, output_doc(output))


# Blinder sidecar and params

def read_blinders(path: str) -> bytes:
    return bytes.fromhex(read_doc(path, BlinderDoc).seed)


def write_blinders(path: str, seed: bytes) -> None:
    write_doc(path, BlinderDoc(seed=seed.hex()))


def read_params(path: str) -> ParamsDoc:
    return read_doc(path, ParamsDoc)


def write_params(path: str, doc: ParamsDoc) -> None:
    write_doc(path, doc)


# Public parameters

def encode_pp(pp: PublicParams) -> bytes:
    w = Writer(pp.field, pp.group)
    write_header(w, KIND_PUBLIC_PARAMS)
    w.text(pp.group.name)
    w.blob(pp.seed)
    w.u8(pp.max_log_dim)
    w.points(pp.generators)
    w.point(pp.blinding_generator)
    w.point(pp.ipa_generator)
    return w.getvalue()


def decode_pp(data: bytes) -> PublicParams:
    r = Reader(data, None, None)
    read_header(r, KIND_PUBLIC_PARAMS)
    group = get_group(r.text())
    r.group, r.field = group, group.scalar_field
    seed = r.blob()
    max_log_dim = r.u8()
    generators = r.points()
    if len(generators) != 2 ** ((max_log_dim + 1) // 2):
        raise DecodeError(f"expected {2 ** ((max_log_dim + 1) // 2)} generators, got {len(generators)}")
    pp = PublicParams(
        group=group,
        max_log_dim=max_log_dim,
        seed=seed,
        generators=generators,
        blinding_generator=r.point(),
        ipa_generator=r.point(),
    )
    r.finish()
    return pp


def read_pp(path: str) -> PublicParams:
    return decode_pp(_read_bytes(path))


def write_pp(path: str, pp: PublicParams) -> None:
    _write_bytes(path, encode_pp(pp))


# Weights

def encode_weights(weights: WeightSet, config: ProverConfig) -> bytes:
    header = WeightHeader(
        config=config.to_dict(),
        tensors=[TensorEntry(name=n, shape=list(weights[n].shape)) for n in weights.names],
    )
    parts = [header.model_dump_json().encode("utf-8")]
    out = bytearray()
    out += len(parts[0]).to_bytes(4, "little")
    out += parts[0]
    for name in weights.names:
        out += np.ascontiguousarray(weights[name], dtype="<i8").tobytes()
    w = Writer(None, None)
    write_header(w, KIND_WEIGHTS)
    return w.getvalue() + bytes(out)


def decode_weights(data: bytes) -> Tuple[WeightSet, ProverConfig]:
    """
    Raises:
        DecodeError: malformed file
        ConfigError: the embedded config is invalid
        ShapeError: tensors do not match the config
    """
    r = Reader(data, None, None)
    read_header(r, KIND_WEIGHTS)
    header = parse_doc(r.raw(r.u32()).decode("utf-8", errors="replace"), WeightHeader, "weight header")
    config = ProverConfig.from_dict(header.config)
    tensors: Dict[str, np.ndarray] = {}
    for entry in header.tensors:
        count = int(np.prod(entry.shape)) if entry.shape else 1
        raw = r.raw(8 * count)
        tensors[entry.name] = np.frombuffer(raw, dtype="<i8").astype(np.int64).reshape(entry.shape)
    r.finish()
    return WeightSet(config.model, tensors), config


def read_weights(path: str) -> Tuple[WeightSet, ProverConfig]:
    return decode_weights(_read_bytes(path))


def write_weights(path: str, weights: WeightSet, config: ProverConfig) -> None:
    _write_bytes(path, encode_weights(weights, config))


# Commitments

def encode_commitments(config: ProverConfig, commitments: Dict[str, TensorCommitment], pp: PublicParams) -> bytes:
    w = Writer(pp.field, pp.group)
    write_header(w, KIND_COMMITMENTS)
    w.text(json.dumps(config.to_dict(), sort_keys=True))
    w.u32(len(commitments))
    for name, c in commitments.items():
        w.text(name)
        w.commitment(c)
    return w.getvalue()


def decode_commitments(data: bytes, pp: PublicParams) -> Tuple[ProverConfig, Dict[str, TensorCommitment]]:
    r = Reader(data, pp.field, pp.group)
    read_header(r, KIND_COMMITMENTS)
    try:
        raw_config = json.loads(r.text())
    except json.JSONDecodeError as e:
        raise DecodeError(f"commitment file config: {e}") from e
    config = ProverConfig.from_dict(raw_config)
    commitments = {}
    for _ in range(r.u32()):
        name = r.text()
        commitments[name] = r.commitment()
    r.finish()
    return config, commitments


def read_commitments(path: str, pp: PublicParams) -> Tuple[ProverConfig, Dict[str, TensorCommitment]]:
    return decode_commitments(_read_bytes(path), pp)


def write_commitments(path: str, config: ProverConfig, commitments: Dict[str, TensorCommitment], pp: PublicParams) -> None:
    _write_bytes(path, encode_commitments(config, {n: c.public() for n, c in commitments.items()}, pp))


# Proofs

def read_proof(path: str, pp: PublicParams) -> ProofBundle:
    return ProofBundle.from_bytes(_read_bytes(path), pp)


def write_proof(path: str, bundle: ProofBundle, pp: PublicParams) -> None:
    _write_bytes(path, bundle.to_bytes(pp))
