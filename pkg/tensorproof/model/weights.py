"""
Model weights

Every tensor is a fixed-point integer array at scale γ. Names follow the
layout `embed`, `pos`, `layers.{i}.*`, `lnf.*`, `unembed`; with layer batching
the per-layer tensors of one kind are stacked under `stack.{kind}`.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from ..config import Activation, ModelConfig
from ..errors import ShapeError
from ..sumcheck.tensor import next_pow2

logger = logging.getLogger(__name__)

def layer_shapes(cfg: ModelConfig) -> Dict[str, Tuple[int, ...]]:
    """Per-layer tensor shapes by kind"""
    d, f = cfg.d_model, cfg.d_ff
    shapes = {
        "ln1.g": (d,),
        "ln1.b": (d,),
        "wq": (d, d),
        "wk": (d, d),
        "wv": (d, d),
        "wo": (d, d),
        "ln2.g": (d,),
        "ln2.b": (d,),
        "w1": (d, f),
        "w3": (d, f),
        "w2": (f, d),
    }
    if cfg.activation != Activation.SWIGLU:
        del shapes["w3"]
    return shapes


def weight_shapes(cfg: ModelConfig) -> Dict[str, Tuple[int, ...]]:
    """Every weight tensor in declaration order"""
    d = cfg.d_model
    shapes: Dict[str, Tuple[int, ...]] = {"embed": (cfg.vocab, d), "pos": (cfg.max_seq, d)}
    for i in range(cfg.layers):
        for kind, shape in layer_shapes(cfg).items():
            shapes[f"layers.{i}.{kind}"] = shape
    shapes["lnf.g"] = (d,)
    shapes["lnf.b"] = (d,)
    shapes["unembed"] = (d, cfg.vocab)
    return shapes


def quantize(x: np.ndarray, gamma: int) -> np.ndarray:
    """round(x·γ), ties to even"""
    return np.rint(np.asarray(x, dtype=np.float64) * gamma).astype(np.int64)


@dataclass
class WeightSet:
    """Quantized weights for one ModelConfig"""

    config: ModelConfig
    tensors: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """
        Raises:
            ShapeError: a tensor is missing, unexpected or misshaped
        """
        expected = weight_shapes(self.config)
        missing = [n for n in expected if n not in self.tensors]
        extra = [n for n in self.tensors if n not in expected]
        if missing or extra:
            raise ShapeError(f"weight set mismatch: missing {missing}, unexpected {extra}")
        for name, shape in expected.items():
            arr = np.asarray(self.tensors[name])
            if arr.shape != shape:
                raise ShapeError(f"{name} has shape {arr.shape}, expected {shape}")
            self.tensors[name] = arr.astype(np.int64)

    @property
    def names(self) -> List[str]:
        return list(weight_shapes(self.config))

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def layer(self, i: int, kind: str) -> np.ndarray:
        return self.tensors[f"layers.{i}.{kind}"]

    def stacked(self, kind: str) -> np.ndarray:
        """Layers of one kind stacked on a leading axis, zero-padded to a power of two"""
        layers = [self.layer(i, kind) for i in range(self.config.layers)]
        pad = next_pow2(len(layers)) - len(layers)
        layers.extend(np.zeros_like(layers[0]) for _ in range(pad))
        return np.stack(layers)

    def committed(self, batch_layers: bool = False) -> Dict[str, np.ndarray]:
        """The tensors that get one commitment each"""
        if not batch_layers:
            return {name: self.tensors[name] for name in self.names}
        out = {name: self.tensors[name] for name in self.names if not name.startswith("layers.")}
        for kind in layer_shapes(self.config):
            out[f"stack.{kind}"] = self.stacked(kind)
        return out

    def with_entry(self, name: str, index: Tuple[int, ...], value: int) -> "WeightSet":
        """Copy with one entry replaced"""
        tensors = {n: t.copy() for n, t in self.tensors.items()}
        tensors[name][index] = value
        return WeightSet(self.config, tensors)


def zero_weights(cfg: ModelConfig) -> WeightSet:
    return WeightSet(cfg, {n: np.zeros(s, dtype=np.int64) for n, s in weight_shapes(cfg).items()})


def random_weights(cfg: ModelConfig, seed: Optional[int] = 0) -> WeightSet:
    """
    Gaussian fixture weights

    Matrices use std 0.5/√fan_in, LayerNorm gains sit near 1 and biases near 0.
    """
    rng = np.random.default_rng(seed)
    gamma = cfg.gamma
    tensors = {}
    for name, shape in weight_shapes(cfg).items():
        kind = name.rsplit(".", 1)[-1]
        if name in ("embed", "pos"):
            std = 1.0 if name == "embed" else 0.1
            values = rng.normal(0.0, std, shape)
        elif kind == "g":
            values = 1.0 + 0.1 * rng.normal(size=shape)
        elif kind == "b":
            values = 0.02 * rng.normal(size=shape)
        else:
            values = rng.normal(0.0, 0.5 / np.sqrt(shape[0]), shape)
        tensors[name] = quantize(values, gamma)
    logger.debug(f"generated fixture weights for {len(tensors)} tensors", extra={"seed": seed})
    return WeightSet(cfg, tensors)


def committed_shapes(cfg: ModelConfig, batch_layers: bool = False) -> Dict[str, Tuple[int, ...]]:
    """Shapes of the committed weight tensors, in commitment order"""
    shapes = weight_shapes(cfg)
    if not batch_layers:
        return shapes
    out = {n: s for n, s in shapes.items() if not n.startswith("layers.")}
    depth = next_pow2(cfg.layers)
    for kind, shape in layer_shapes(cfg).items():
        out[f"stack.{kind}"] = (depth,) + shape
    return out
