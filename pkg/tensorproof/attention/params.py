"""
zkAttn parameters

A non-positive shifted logit z ∈ (−B, 0] is written as base-b digits,
least significant first, x = −z = Σ_k B^(k)·x_k with B^(k) = Π_{j<k} b_j.
Then exp(z/T) = Π_k exp(−B^(k)·x_k/T), one table per digit:

- the L low segments are dropped (their factor is within e^{B_L/T} of 1),
- the middle segments carry scaled exponentials θ_k·exp(−B^(k)x/T),
- the M top segments are indicators 1{x = 0}; anything that reaches them
  is too small to matter.

The temperature T is γ√d/slope: γ√d for attention scores at scale γ, γ/slope
for the sigmoid reduction.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence
import logging
import math

import numpy as np

from ..config import SoftmaxConfig
from ..errors import ParamError, RangeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZkAttnParams:
    gamma: int
    theta: int
    d: int
    n: int
    radices: tuple
    low: int  # L
    top: int  # M
    theta_seg: tuple  # θ_k per segment, 1 outside the middle
    tolerance: int  # E
    slope: float = 1.0
    target_bound: float = 0.0  # B*_{K-M}
    epsilon: float = 0.0

    @property
    def segments(self) -> int:
        return len(self.radices)

    @property
    def middle(self) -> range:
        return range(self.low, self.segments - self.top)

    @property
    def temperature(self) -> float:
        return temperature(self.gamma, self.d, self.slope)

    @property
    def cumulative(self) -> List[int]:
        """B^(k) for k = 0..K"""
        out = [1]
        for b in self.radices:
            out.append(out[-1] * b)
        return out

    @property
    def bound(self) -> int:
        """B, the exclusive bound on −z"""
        return self.cumulative[-1]

    @property
    def low_bound(self) -> int:
        """B_L"""
        return self.cumulative[self.low]

    @property
    def top_start(self) -> int:
        """B_{K−M}, the first cumulative product covered by indicators"""
        return self.cumulative[self.segments - self.top]

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "theta": self.theta,
            "d": self.d,
            "n": self.n,
            "radices": list(self.radices),
            "low": self.low,
            "top": self.top,
            "theta_seg": list(self.theta_seg),
            "tolerance": self.tolerance,
            "slope": self.slope,
            "target_bound": self.target_bound,
            "epsilon": self.epsilon,
        }


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def temperature(gamma: int, d: int, slope: float = 1.0) -> float:
    return gamma * math.sqrt(d) / slope


def target_bound(gamma: int, theta: int, d: int, n: int, middle: int, slope: float = 1.0) -> float:
    """B*_{K−M}: the smallest top-segment start with the error terms balanced"""
    t = temperature(gamma, d, slope)
    return t / (middle + 1) * (middle * math.log(2 * n) + math.log(theta))


def segment_scales(
    radices: Sequence[int],
    low: int,
    top: int,
    theta: int,
    temp: float,
    integral: bool = True,
) -> List[float]:
    """
    Per-segment output scales θ_k with Π θ_k = θ

    The real-valued optimum has log θ_k = B^(k)(b_k − 1)/T + c with c fixed
    by the product. With `integral`, every middle segment but the last is
    rounded to the nearest power of two and the last takes the exact
    cofactor; factors of two then move between middle segments while that
    lowers rounding_bound.
    """
    k_total = len(radices)
    middle = list(range(low, k_total - top))
    cum = [1]
    for b in radices:
        cum.append(cum[-1] * b)
    span = (cum[k_total - top] - cum[low]) / temp
    shift = (math.log(theta) - span) / len(middle)
    logs = {k: cum[k] * (radices[k] - 1) / temp + shift for k in middle}
    scales: List[float] = [1.0] * k_total
    if not integral:
        for k in middle:
            scales[k] = math.exp(logs[k])
        return scales

    remaining = theta
    for k in middle[:-1]:
        power = min(max(0, round(logs[k] / math.log(2))), remaining.bit_length())
        value = 1 << power
        # stay a divisor of what is left
        while value > 1 and remaining % value:
            value >>= 1
        scales[k] = value
        remaining //= value
    scales[middle[-1]] = remaining
    return _balance([int(s) for s in scales], radices, low, top, temp)


def _balance(scales: List[int], radices: Sequence[int], low: int, top: int, temp: float) -> List[int]:
    """Apply the best doubling of one middle θ_i with halving of another until none helps"""
    middle = range(low, len(radices) - top)
    best = rounding_bound(radices, low, top, scales, temp)
    while True:
        move = None
        for i in middle:
            for j in middle:
                if i == j or scales[j] % 2:
                    continue
                trial = list(scales)
                trial[i] *= 2
                trial[j] //= 2
                bound = rounding_bound(radices, low, top, trial, temp)
                if bound < best:
                    best, move = bound, trial
        if move is None:
            return scales
        scales = move


def rounding_bound(
    radices: Sequence[int],
    low: int,
    top: int,
    theta_seg: Sequence[float],
    temp: float,
) -> float:
    """
    Worst-case relative error from rounding the middle tables

    Π_k (1 + e^{B^(k)(b_k−1)/T} / (2θ_k)) − 1, over the middle segments.
    """
    cum = [1]
    for b in radices:
        cum.append(cum[-1] * b)
    total = 0.0
    for k in range(low, len(radices) - top):
        x = cum[k] * (radices[k] - 1) / temp - math.log(2 * theta_seg[k])
        total += float(np.logaddexp(0.0, x))
    return _exp(total) - 1.0


def attention_error_bound(
    radices: Sequence[int],
    low: int,
    top: int,
    theta_seg: Sequence[float],
    temp: float,
    n: int,
) -> float:
    """
    Per-row L1 bound on |Y/θ − softmax(z)|

    Combines the shift rounding (e^{1/2T}), the dropped low digits and table
    rounding, and the n − 1 entries that may be cut off by the indicators.
    """
    cum = [1]
    for b in radices:
        cum.append(cum[-1] * b)
    half = _exp(1 / (2 * temp))
    rb = rounding_bound(radices, low, top, theta_seg, temp)
    c = _exp(cum[low] / temp) * (1 + rb) - 1
    tail = (n - 1) * _exp(-cum[len(radices) - top] / temp) * half
    return (half - 1) + c * half + tail


def _middle_radix(target: float, low_bound: int, count: int, budget: int) -> int:
    b = max(2, math.ceil((target / low_bound) ** (1.0 / count)))
    while low_bound * b**count < target:
        b += 1
    while b > 2 and low_bound * (b - 1) ** count >= target:
        b -= 1
    if b > budget:
        raise ParamError(
            f"middle radix {b} exceeds the table budget {budget}; add segments or raise the budget"
        )
    return b


def derive_params(
    gamma: int,
    theta: int,
    d: int,
    n: int,
    low_radices: Sequence[int],
    top_radices: Sequence[int],
    segments: int,
    middle_radices: Optional[Sequence[int]] = None,
    table_budget: int = 1 << 12,
    slope: float = 1.0,
) -> ZkAttnParams:
    """
    Choose the segment layout, per-segment scales and the row-sum tolerance E

    With `middle_radices` unset the middle segments share the smallest radix
    whose product with B_L reaches B*_{K−M}; otherwise the given radices must
    reach it.

    Raises:
        ParamError: infeasible layout
    """
    low, top = len(low_radices), len(top_radices)
    middle = segments - low - top
    if middle < 1:
        raise ParamError(f"K − M − L must be at least 1 (K={segments}, M={top}, L={low})")
    if theta < gamma or theta % gamma:
        raise ParamError(f"theta={theta} must be a multiple of gamma={gamma}")
    if n < 1 or d < 1:
        raise ParamError("row length and head dimension must be positive")

    temp = temperature(gamma, d, slope)
    target = target_bound(gamma, theta, d, n, middle, slope)
    low_bound = math.prod(low_radices)
    if middle_radices is None:
        mid = [_middle_radix(target, low_bound, middle, table_budget)] * middle
    else:
        mid = list(middle_radices)
        if len(mid) != middle:
            raise ParamError(f"expected {middle} middle radices, got {len(mid)}")
        if low_bound * math.prod(mid) < target:
            raise ParamError(
                f"radices reach {low_bound * math.prod(mid)}, below the required {target:.1f}"
            )
    radices = tuple(int(b) for b in list(low_radices) + mid + list(top_radices))
    if any(b < 2 for b in radices):
        raise ParamError("every radix must be at least 2")
    if any(b > table_budget for b in radices):
        raise ParamError(f"a radix exceeds the table budget {table_budget}")

    theta_seg = segment_scales(radices, low, top, theta, temp)
    eps = attention_error_bound(radices, low, top, theta_seg, temp, n)
    tolerance = math.ceil(eps * theta) if math.isfinite(eps) else theta
    if tolerance >= theta:
        logger.warning(
            f"row-sum tolerance {tolerance} capped at {theta - 1}",
            extra={"epsilon": eps, "theta": theta},
        )
        tolerance = theta - 1
    logger.debug(
        f"zkAttn params: radices={radices} theta_seg={theta_seg} E={tolerance}",
        extra={"target_bound": target, "epsilon": eps},
    )
    return ZkAttnParams(
        gamma=gamma,
        theta=theta,
        d=d,
        n=n,
        radices=radices,
        low=low,
        top=top,
        theta_seg=tuple(theta_seg),
        tolerance=tolerance,
        slope=slope,
        target_bound=target,
        epsilon=eps,
    )


def params_from_config(cfg: SoftmaxConfig, gamma: int, d: int, n: int, slope: float = 1.0) -> ZkAttnParams:
    return derive_params(
        gamma,
        1 << cfg.theta_log2,
        d,
        n,
        cfg.low_radices,
        cfg.top_radices,
        cfg.segments,
        cfg.middle_radices,
        1 << cfg.table_budget_log2,
        slope,
    )


def decompose_digits(x: np.ndarray, radices: Sequence[int]) -> List[np.ndarray]:
    """
    Digits of x in the mixed radix, least significant first

    Raises:
        RangeError: x outside [0, Π b)
    """
    x = np.asarray(x, dtype=np.int64)
    bound = math.prod(radices)
    if x.size and (x.min() < 0 or x.max() >= bound):
        raise RangeError(f"value outside [0, {bound}) cannot be decomposed")
    digits = []
    place = 1
    for b in radices:
        digits.append((x // place) % b)
        place *= b
    return digits


def compose_digits(digits: Sequence[np.ndarray], radices: Sequence[int]) -> np.ndarray:
    total = np.zeros_like(np.asarray(digits[0], dtype=np.int64))
    place = 1
    for dk, b in zip(digits, radices):
        total = total + place * np.asarray(dk, dtype=np.int64)
        place *= b
    return total
