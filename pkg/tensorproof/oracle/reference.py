"""
Brute-force references

Everything here is written from the definitions, without the fast paths in
the rest of the package: hypercube sums instead of folding, exact rationals
or per-term field inverses instead of batched ones, float64 instead of fixed
point. Tests and the selfcheck command compare the real code against these.
"""

from fractions import Fraction
from itertools import product
from typing import Dict, Mapping, Sequence, Tuple
import math

import numpy as np

from ..config import Activation, ModelConfig
from ..errors import ShapeError

MAX_BRUTEFORCE_VARS = 12
GELU_SIGMOID_SLOPE = 1.702


# Multilinear extensions

def mle_bruteforce(values: Sequence[int], point: Sequence[int], modulus: int) -> int:
    """
    Σ_b t(b)·Π_i (r_i·b_i + (1 − r_i)(1 − b_i)) over the whole hypercube

    b_0 is the most significant bit of the flat index.

    Raises:
        ShapeError: more than 2^12 entries, or a length that is not 2^len(point)
    """
    flat = [int(v) for v in np.asarray(values, dtype=object).reshape(-1)]
    d = len(point)
    if d > MAX_BRUTEFORCE_VARS:
        raise ShapeError(f"brute-force MLE is capped at {MAX_BRUTEFORCE_VARS} variables")
    if len(flat) != 1 << d:
        raise ShapeError(f"{len(flat)} entries do not match a {d}-variable point")
    r = [int(x) % modulus for x in point]
    total = 0
    for index, bits in enumerate(product((0, 1), repeat=d)):
        weight = 1
        for ri, bi in zip(r, bits):
            weight = weight * (ri if bi else 1 - ri) % modulus
        total = (total + flat[index] * weight) % modulus
    return total


def naive_matmul(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    """Triple loop over Python ints, reduced mod p"""
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    m, k = a.shape
    k2, n = b.shape
    if k != k2:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    out = np.zeros((m, n), dtype=object)
    for i in range(m):
        for j in range(n):
            acc = 0
            for t in range(k):
                acc += int(a[i, t]) * int(b[t, j])
            out[i, j] = acc % modulus
    return out


# Lookup identity

def rational_sides(s: Sequence[int], t: Sequence[int], m: Sequence[int], x: int) -> Tuple[Fraction, Fraction]:
    """Σ 1/(X + S_i) and Σ m_j/(X + T_j) over the rationals"""
    left = sum((Fraction(1, x + int(v)) for v in s), Fraction(0))
    right = sum((Fraction(int(c), x + int(v)) for v, c in zip(t, m)), Fraction(0))
    return left, right


def rational_identity_check(s: Sequence[int], t: Sequence[int], m: Sequence[int], x: int, modulus: int) -> bool:
    """
    Both sides of the log-derivative identity at X, in the field

    Raises:
        ZeroDivisionError: X is a pole (X = −S_i or X = −T_j); draw another X
    """
    p = modulus

    def inv(v: int) -> int:
        v %= p
        if v == 0:
            raise ZeroDivisionError("challenge hits a pole")
        return pow(v, p - 2, p)

    left = sum(inv(x + int(v)) for v in s) % p
    right = sum(int(c) * inv(x + int(v)) for v, c in zip(t, m)) % p
    return left == right


def multiplicities_reference(s: Sequence[int], t: Sequence[int]) -> Tuple[list, bool]:
    """Counts per table entry (first occurrence), and whether S ⊆ T"""
    first: Dict[int, int] = {}
    for j, v in enumerate(t):
        first.setdefault(int(v), j)
    m = [0] * len(t)
    inside = True
    for v in s:
        j = first.get(int(v))
        if j is None:
            inside = False
        else:
            m[j] += 1
    return m, inside


# Real-valued nonlinearities

def softmax_reference(z: np.ndarray, temperature: float = 1.0) -> np.ndarray:
    """Row-wise softmax of z/T over the last axis"""
    x = np.asarray(z, dtype=np.float64) / temperature
    x = x - x.max(axis=-1, keepdims=True)
    e = np.exp(x)
    return e / e.sum(axis=-1, keepdims=True)


def sigmoid_reference(x: np.ndarray, slope: float = 1.0) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return 0.5 * (1.0 + np.tanh(0.5 * slope * x))


def relu_reference(x: np.ndarray) -> np.ndarray:
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def gelu_reference(x: np.ndarray, exact: bool = False) -> np.ndarray:
    """x·σ(1.702x), or x·Φ(x) with exact=True"""
    x = np.asarray(x, dtype=np.float64)
    if exact:
        erf = np.vectorize(math.erf)
        return 0.5 * x * (1.0 + erf(x / math.sqrt(2.0)))
    return x * sigmoid_reference(x, GELU_SIGMOID_SLOPE)


def swiglu_reference(g: np.ndarray, u: np.ndarray, beta: float = 1.0) -> np.ndarray:
    g = np.asarray(g, dtype=np.float64)
    return g * sigmoid_reference(g, beta) * np.asarray(u, dtype=np.float64)


def layernorm_reference(x: np.ndarray, gain: np.ndarray, bias: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    mean = x.mean(axis=-1, keepdims=True)
    var = ((x - mean) ** 2).mean(axis=-1, keepdims=True)
    return (x - mean) / np.sqrt(var + eps) * np.asarray(gain, dtype=np.float64) + np.asarray(bias, dtype=np.float64)


# Transformer

def _attention(h: np.ndarray, w: Mapping[str, np.ndarray], p: str, cfg: ModelConfig) -> np.ndarray:
    rows = h.shape[0]
    heads, dh = cfg.heads, cfg.d_head
    q = (h @ w[f"{p}.wq"]).reshape(rows, heads, dh).transpose(1, 0, 2)
    k = (h @ w[f"{p}.wk"]).reshape(rows, heads, dh).transpose(1, 0, 2)
    v = (h @ w[f"{p}.wv"]).reshape(rows, heads, dh).transpose(1, 0, 2)
    scores = q @ k.transpose(0, 2, 1)
    attn = softmax_reference(scores, math.sqrt(dh))
    ctx = (attn @ v).transpose(1, 0, 2).reshape(rows, cfg.d_model)
    return ctx @ w[f"{p}.wo"]


def _mlp(h: np.ndarray, w: Mapping[str, np.ndarray], p: str, cfg: ModelConfig) -> np.ndarray:
    g = h @ w[f"{p}.w1"]
    if cfg.activation == Activation.RELU:
        act = relu_reference(g)
    elif cfg.activation == Activation.GELU:
        act = gelu_reference(g)
    else:
        act = swiglu_reference(g, h @ w[f"{p}.w3"])
    return act @ w[f"{p}.w2"]


def reference_forward(weights: Mapping[str, np.ndarray], tokens: Sequence[int], cfg: ModelConfig) -> np.ndarray:
    """Float64 forward pass over real-valued weights; one row of logits per token"""
    w = {k: np.asarray(v, dtype=np.float64) for k, v in weights.items()}
    tokens = list(tokens)
    eps = cfg.layernorm.eps
    x = w["embed"][tokens] + w["pos"][: len(tokens)]
    for i in range(cfg.layers):
        p = f"layers.{i}"
        x = x + _attention(layernorm_reference(x, w[f"{p}.ln1.g"], w[f"{p}.ln1.b"], eps), w, p, cfg)
        x = x + _mlp(layernorm_reference(x, w[f"{p}.ln2.g"], w[f"{p}.ln2.b"], eps), w, p, cfg)
    hf = layernorm_reference(x, w["lnf.g"], w["lnf.b"], eps)
    return hf @ w["unembed"]
