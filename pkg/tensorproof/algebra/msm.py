"""
Multi-scalar multiplication

Bucketed Pippenger over any Group. Small inputs fall back to the naive sum.
"""

from typing import TYPE_CHECKING, Sequence

from ..errors import ShapeError

if TYPE_CHECKING:
    from .group import Group, GroupElement

NAIVE_THRESHOLD = 8


def _window_bits(n: int) -> int:
    c = 1
    while (c + 2) * 2 ** (c + 2) < n:
        c += 1
    return c


def naive_msm(group: "Group", scalars: Sequence[int], bases: Sequence["GroupElement"]) -> "GroupElement":
    acc = group.identity()
    for s, b in zip(scalars, bases):
        if s:
            acc = group.add(acc, group.mul(b, s))
    return acc


def pippenger_msm(group: "Group", scalars: Sequence[int], bases: Sequence["GroupElement"]) -> "GroupElement":
    if len(scalars) != len(bases):
        raise ShapeError(f"msm length mismatch: {len(scalars)} scalars, {len(bases)} bases")

    order = group.order
    pairs = [(int(s) % order, b) for s, b in zip(scalars, bases)]
    pairs = [(s, b) for s, b in pairs if s]
    if len(pairs) < NAIVE_THRESHOLD:
        return naive_msm(group, [s for s, _ in pairs], [b for _, b in pairs])

    c = _window_bits(len(pairs))
    mask = (1 << c) - 1
    top = max(s.bit_length() for s, _ in pairs)

    result = group.identity()
    for shift in reversed(range(0, top, c)):
        for _ in range(c):
            result = group.double(result)

        buckets = [None] * (mask + 1)
        for s, b in pairs:
            idx = (s >> shift) & mask
            if idx:
                buckets[idx] = b if buckets[idx] is None else group.add(buckets[idx], b)

        # sum_i i * bucket_i via running suffix sums
        running = group.identity()
        window = group.identity()
        for idx in range(mask, 0, -1):
            if buckets[idx] is not None:
                running = group.add(running, buckets[idx])
            window = group.add(window, running)
        result = group.add(result, window)

    return result


def group_msm(scalars: Sequence[int], bases: Sequence["GroupElement"], group: "Group") -> "GroupElement":
    """Sum of scalars[i] * bases[i]"""
    if len(scalars) != len(bases):
        raise ShapeError(f"msm length mismatch: {len(scalars)} scalars, {len(bases)} bases")
    return group.msm(scalars, bases)
