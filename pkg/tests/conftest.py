"""
Shared fixtures

Proofs in the tests run over the toy61 Schnorr group so that commitments are
plain modular exponentiations; BN254 is exercised separately.
"""

import numpy as np
import pytest

from tensorproof.algebra.field import TEST_FIELD
from tensorproof.algebra.group import TOY61
from tensorproof.algebra.transcript import Transcript
from tensorproof.config import ProverConfig
from tensorproof.polycommit.blinding import BlindingSource
from tensorproof.polycommit.hyrax import keygen

TINY_MODEL = {
    "layers": 1,
    "d_model": 8,
    "heads": 2,
    "d_ff": 16,
    "vocab": 16,
    "max_seq": 4,
}


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: whole-model and gated-activation proofs; deselect with -m 'not slow'")


def tiny_config(**model) -> ProverConfig:
    """One layer, eight channels, toy61 commitments"""
    return ProverConfig.from_dict({
        "model": {**TINY_MODEL, **model},
        "commit": {"group": "toy61", "seed": "tests"},
    })


@pytest.fixture
def field():
    return TEST_FIELD


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def pp():
    """Capacity 2^16: enough for the 2^14-row quotient tables"""
    return keygen(16, b"tests", TOY61)


@pytest.fixture(scope="session")
def small_pp():
    return keygen(6, b"tests-small", TOY61)


@pytest.fixture
def blinding(pp):
    return BlindingSource(pp.field, b"\x01" * 32)


@pytest.fixture
def transcripts(pp):
    """A fresh (prover, verifier) transcript pair"""
    def make(label: bytes = b"test"):
        return Transcript(pp.field, label), Transcript(pp.field, label)
    return make


@pytest.fixture
def tiny():
    return tiny_config()


@pytest.fixture
def make_config():
    return tiny_config
