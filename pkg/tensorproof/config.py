"""
Configuration classes for tensorproof
"""

from dataclasses import dataclass, field
from enum import Enum
from hashlib import sha256
from typing import Any, Dict, List, Optional
import json
import logging
import os

import yaml
from dotenv import load_dotenv
from pydantic import ConfigDict, TypeAdapter, ValidationError, with_config

from .errors import ConfigError

logger = logging.getLogger(__name__)

THREADS_ENV = "ZKT_THREADS"

# No coercion: "2" is not an int and 1 is not a bool
STRICT = ConfigDict(strict=True, extra="forbid")


class GroupBackend(str, Enum):
    """Commitment group"""
    BN254 = "bn254"
    TOY61 = "toy61"


class Activation(str, Enum):
    """MLP activation"""
    RELU = "relu"
    GELU = "gelu"
    SWIGLU = "swiglu"


@with_config(STRICT)
@dataclass
class SoftmaxConfig:
    """
    zkAttn segment layout

    Digits run least significant first: `low_radices` (L of them, no table
    output), the middle segments, then `top_radices` (M of them, indicator
    outputs). With `middle_radices` unset the middle radices are chosen from
    the error bound; otherwise they are used as given.
    """

    theta_log2: int = 10
    segments: int = 3  # K
    low_radices: List[int] = field(default_factory=lambda: [4])
    top_radices: List[int] = field(default_factory=lambda: [16])
    middle_radices: Optional[List[int]] = None
    table_budget_log2: int = 12

    @property
    def low(self) -> int:
        return len(self.low_radices)

    @property
    def top(self) -> int:
        return len(self.top_radices)

    @property
    def middle(self) -> int:
        return self.segments - self.low - self.top

    @property
    def mode(self) -> str:
        return "optimize" if self.middle_radices is None else "fixed"


@with_config(STRICT)
@dataclass
class LayerNormConfig:
    """LayerNorm statistics and inverse-sqrt table"""
    eps: float = 1e-5
    var_max_log2: int = 6  # largest real variance the table covers
    var_bits: int = 12  # inverse-sqrt table has 2^var_bits inputs


@with_config(STRICT)
@dataclass
class ModelConfig:
    """Transformer shape and fixed-point scales"""

    layers: int = 2
    d_model: int = 64
    heads: int = 4
    d_ff: int = 128
    vocab: int = 64
    max_seq: int = 32
    gamma_log2: int = 8
    activation: Activation = Activation.RELU
    attention: SoftmaxConfig = field(default_factory=SoftmaxConfig)
    sigmoid: SoftmaxConfig = field(default_factory=lambda: SoftmaxConfig(theta_log2=12))
    layernorm: LayerNormConfig = field(default_factory=LayerNormConfig)

    @property
    def d_head(self) -> int:
        return self.d_model // self.heads

    @property
    def gamma(self) -> int:
        return 1 << self.gamma_log2


@with_config(STRICT)
@dataclass
class CommitConfig:
    """Public parameters and weight commitments"""
    group: GroupBackend = GroupBackend.BN254
    seed: str = "tensorproof"
    max_log_dim: Optional[int] = None  # derived from the model when unset
    batch_layers: bool = False


@with_config(STRICT)
@dataclass
class LookupConfig:
    """Range tables and lookup retries"""
    budget_bits: int = 10  # remainder digits use tables of 2^budget_bits
    quotient_bits: int = 14  # rescaled outputs lie in [-2^(q-1), 2^(q-1))
    max_retries: int = 8


@with_config(STRICT)
@dataclass
class MetricsConfig:
    """Metrics configuration"""
    enabled: bool = False
    port: int = 9090
    labels: Dict[str, str] = field(default_factory=dict)


@with_config(STRICT)
@dataclass
class TracingConfig:
    """Tracing configuration"""
    enabled: bool = True
    service_name: str = "tensorproof"


@with_config(STRICT)
@dataclass
class LoggingConfig:
    """Logging configuration"""
    level: str = "INFO"  # DEBUG, INFO, WARNING, ERROR
    format: str = "text"  # json, text
    output: str = "stderr"  # stdout, stderr, file
    path: Optional[str] = None


@with_config(STRICT)
@dataclass
class ObservabilityConfig:
    """Observability configuration"""

    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    tracing: TracingConfig = field(default_factory=TracingConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)


@with_config(STRICT)
@dataclass
class ProverConfig:
    """Complete configuration"""

    model: ModelConfig = field(default_factory=ModelConfig)
    commit: CommitConfig = field(default_factory=CommitConfig)
    lookup: LookupConfig = field(default_factory=LookupConfig)
    observability: ObservabilityConfig = field(default_factory=ObservabilityConfig)
    workers: int = 1

    def validate(self) -> bool:
        """Validate configuration"""
        m = self.model
        for name in ("layers", "d_model", "heads", "d_ff", "vocab", "max_seq"):
            value = getattr(m, name)
            if value < 1:
                raise ConfigError(f"model.{name} must be positive")
            if name != "layers" and value & (value - 1):
                raise ConfigError(f"model.{name}={value} is not a power of two")
        if m.d_model % m.heads:
            raise ConfigError("model.d_model must be a multiple of model.heads")
        if m.gamma_log2 < 1:
            raise ConfigError("model.gamma_log2 must be positive")

        for name, sm in (("attention", m.attention), ("sigmoid", m.sigmoid)):
            if sm.theta_log2 < m.gamma_log2:
                raise ConfigError(f"model.{name}.theta_log2 must be at least gamma_log2")
            if sm.middle < 1:
                raise ConfigError(f"model.{name}: segments must exceed low + top segment counts")
            if any(b < 2 for b in sm.low_radices + sm.top_radices + (sm.middle_radices or [])):
                raise ConfigError(f"model.{name}: radices must be at least 2")
            if sm.middle_radices is not None and len(sm.middle_radices) != sm.middle:
                raise ConfigError(f"model.{name}: expected {sm.middle} middle radices")

        ln = m.layernorm
        if ln.eps <= 0 or ln.var_bits < 2:
            raise ConfigError("model.layernorm: eps must be positive and var_bits at least 2")

        lk = self.lookup
        if lk.budget_bits < 1 or lk.quotient_bits < 2:
            raise ConfigError("lookup: budget_bits must be positive and quotient_bits at least 2")
        if not 0 <= lk.max_retries <= 255:
            raise ConfigError("lookup.max_retries must be in [0, 255]")

        if self.commit.max_log_dim is not None and self.commit.max_log_dim < 1:
            raise ConfigError("commit.max_log_dim must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if self.observability.logging.output == "file" and not self.observability.logging.path:
            raise ConfigError("file logging needs observability.logging.path")
        return True

    def to_dict(self) -> Dict[str, Any]:
        return _ADAPTER.dump_python(self, mode="json")

    def proof_dict(self) -> Dict[str, Any]:
        """The sections that shape a proof"""
        d = self.to_dict()
        return {
            "model": d["model"],
            "lookup": d["lookup"],
            "commit": {"group": d["commit"]["group"], "batch_layers": d["commit"]["batch_layers"]},
        }

    def digest(self) -> bytes:
        """SHA-256 of the canonical proof-shaping sections"""
        return sha256(json.dumps(self.proof_dict(), sort_keys=True, separators=(",", ":")).encode()).digest()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProverConfig":
        """
        Build from nested plain data, rejecting unknown keys

        Raises:
            ConfigError: unknown keys, wrong types or invalid values
        """
        # validated as JSON: strict mode there still takes mappings for sections and values for enums
        try:
            config = _ADAPTER.validate_json(json.dumps(data or {}))
        except ValidationError as e:
            raise ConfigError(_describe(e)) from e
        except (TypeError, ValueError) as e:
            raise ConfigError(f"config is not plain data: {e}") from e
        config.validate()
        return config

    @classmethod
    def from_yaml(cls, path: str) -> "ProverConfig":
        """Load a YAML file; a top-level `preset` key selects the base values"""
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = yaml.safe_load(fh) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a mapping at the top level")
        preset = data.pop("preset", None)
        if preset is None:
            return cls.from_dict(data)
        return cls.from_dict(_merge(preset_dict(preset), data))

    @classmethod
    def preset(cls, name: str) -> "ProverConfig":
        return cls.from_dict(preset_dict(name))


def preset_dict(name: str) -> Dict[str, Any]:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return json.loads(json.dumps(PRESETS[name]))


def resolve_workers(flag: Optional[int], config: ProverConfig) -> int:
    """--threads, then ZKT_THREADS, then the config value"""
    if flag is not None:
        workers = flag
    else:
        load_dotenv()
        env = os.getenv(THREADS_ENV)
        if env:
            try:
                workers = int(env)
            except ValueError as e:
                raise ConfigError(f"{THREADS_ENV}={env!r} is not an integer") from e
        else:
            workers = config.workers
    if workers < 1:
        raise ConfigError("thread count must be positive")
    return workers


PRESETS: Dict[str, Dict[str, Any]] = {
    "toy": {},
    "toy-gelu": {"model": {"activation": "gelu"}},
    "toy-swiglu": {"model": {"activation": "swiglu"}},
    "paper-k5l3": {
        "model": {
            "gamma_log2": 16,
            "attention": {
                "theta_log2": 16,
                "segments": 5,
                "low_radices": [4, 4, 4],
                "top_radices": [65536],
                "table_budget_log2": 16,
            },
            "sigmoid": {
                "theta_log2": 16,
                "segments": 5,
                "low_radices": [4, 4, 4],
                "top_radices": [65536],
                "table_budget_log2": 16,
            },
        },
        "lookup": {"budget_bits": 16, "quotient_bits": 16},
    },
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _describe(error: ValidationError) -> str:
    problems = []
    for item in error.errors():
        where = ".".join(str(part) for part in item["loc"]) or "config"
        problems.append(f"{where}: {item['msg']}")
    return "; ".join(problems)


_ADAPTER = TypeAdapter(ProverConfig)
