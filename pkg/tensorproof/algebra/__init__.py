"""
Field and group arithmetic plus the Fiat-Shamir transcript
"""

from .field import (
    BN254_SCALAR,
    DEFAULT_FIELD,
    TEST_FIELD,
    TEST_PRIME,
    PrimeField,
    batch_inverse,
    field_add,
    field_inv,
    field_mul,
    field_neg,
)
from .group import BN254, TOY61, Bn254Group, Group, SchnorrGroup, get_group
from .msm import group_msm, naive_msm, pippenger_msm
from .transcript import InteractiveTranscript, Transcript, absorb_points, transcript_challenge

__all__ = [
    "BN254_SCALAR",
    "DEFAULT_FIELD",
    "TEST_FIELD",
    "TEST_PRIME",
    "PrimeField",
    "batch_inverse",
    "field_add",
    "field_inv",
    "field_mul",
    "field_neg",
    "BN254",
    "TOY61",
    "Bn254Group",
    "Group",
    "SchnorrGroup",
    "get_group",
    "group_msm",
    "naive_msm",
    "pippenger_msm",
    "InteractiveTranscript",
    "Transcript",
    "absorb_points",
    "transcript_challenge",
]
