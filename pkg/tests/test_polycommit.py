"""
Hyrax commitments and evaluation proofs
"""

import numpy as np
import pytest

from tensorproof.algebra.group import TOY61
from tensorproof.algebra.transcript import Transcript
from tensorproof.errors import CapacityError, ProofRejected, ShapeError
from tensorproof.polycommit.blinding import BlindingSource, ZeroBlinding
from tensorproof.polycommit.hyrax import combine, commit, keygen, layout, prove_eval, verify_eval
from tensorproof.sumcheck.mle import mle_evaluate_flat


def values(rng, n, p):
    return np.array([int(v) for v in rng.integers(0, p, size=n, dtype=np.int64)], dtype=object)


class TestKeygen:
    def test_generator_count(self, small_pp):
        assert len(small_pp.generators) == 2 ** 3
        assert small_pp.field.modulus == TOY61.order

    def test_deterministic_from_seed(self):
        a, b = keygen(4, b"seed", TOY61), keygen(4, b"seed", TOY61)
        assert a.generators == b.generators
        assert a.blinding_generator == b.blinding_generator
        assert keygen(4, b"other", TOY61).generators != a.generators

    def test_layout(self):
        assert layout(5) == (3, 2)
        assert layout(4) == (2, 2)
        assert layout(0) == (0, 0)

    def test_rejects_zero_capacity(self):
        with pytest.raises(CapacityError):
            keygen(0, b"seed", TOY61)


class TestCommit:
    def test_row_count(self, small_pp, rng):
        c = commit(values(rng, 32, small_pp.field.modulus), small_pp, BlindingSource(small_pp.field, b"k"))
        assert c.num_vars == 5
        assert c.num_rows == 8
        assert len(c.blinders) == 8

    def test_binding_to_values(self, small_pp, rng):
        t = values(rng, 16, small_pp.field.modulus)
        blind = b"same"
        c1 = commit(t, small_pp, BlindingSource(small_pp.field, blind))
        c2 = commit(t, small_pp, BlindingSource(small_pp.field, blind))
        assert c1 == c2
        t2 = t.copy()
        t2[5] = (t2[5] + 1) % small_pp.field.modulus
        assert commit(t2, small_pp, BlindingSource(small_pp.field, blind)) != c1

    def test_blinders_hide(self, small_pp, rng):
        t = values(rng, 16, small_pp.field.modulus)
        c1 = commit(t, small_pp, BlindingSource(small_pp.field, b"a"))
        c2 = commit(t, small_pp, BlindingSource(small_pp.field, b"b"))
        assert c1 != c2

    def test_capacity(self, small_pp):
        with pytest.raises(CapacityError):
            commit(np.zeros(1 << 7, dtype=object), small_pp)

    def test_public_drops_blinders(self, small_pp, rng):
        c = commit(values(rng, 8, small_pp.field.modulus), small_pp, BlindingSource(small_pp.field, b"k"))
        pub = c.public()
        assert pub.blinders is None
        assert pub == c

    def test_homomorphic(self, small_pp, rng):
        p = small_pp.field.modulus
        a, b = values(rng, 16, p), values(rng, 16, p)
        ca = commit(a, small_pp, BlindingSource(small_pp.field, b"a"))
        cb = commit(b, small_pp, BlindingSource(small_pp.field, b"b"))
        combined = combine([ca, cb], [3, 5])
        direct = commit((3 * a + 5 * b) % p, small_pp, combined.blinders)
        assert combined == direct
        assert ca + cb == combine([ca, cb], [1, 1])

    def test_combine_needs_equal_sizes(self, small_pp):
        c4 = commit(np.zeros(4, dtype=object), small_pp)
        c8 = commit(np.zeros(8, dtype=object), small_pp)
        with pytest.raises(ShapeError):
            combine([c4, c8], [1, 1])

    def test_zero_blinding(self, small_pp):
        c = commit([1, 2, 3, 4], small_pp, ZeroBlinding(small_pp.field))
        assert c.blinders == [0, 0]


class TestEvalProof:
    @pytest.mark.parametrize("num_vars", [1, 2, 5, 6])
    def test_honest_opening(self, num_vars, small_pp, rng):
        p = small_pp.field.modulus
        t = values(rng, 1 << num_vars, p)
        c = commit(t, small_pp, BlindingSource(small_pp.field, b"k"))
        point = [int(x) for x in rng.integers(0, p, size=num_vars, dtype=np.int64)]
        proof = prove_eval(t, c, point, small_pp, Transcript(small_pp.field), BlindingSource(small_pp.field, b"r"))
        assert proof.claimed_value == mle_evaluate_flat(t, point, small_pp.field)
        assert verify_eval(proof, c.public(), point, small_pp, Transcript(small_pp.field))

    def test_wrong_value_rejected(self, small_pp, rng):
        p = small_pp.field.modulus
        t = values(rng, 16, p)
        c = commit(t, small_pp, BlindingSource(small_pp.field, b"k"))
        point = [int(x) for x in rng.integers(0, p, size=4, dtype=np.int64)]
        proof = prove_eval(t, c, point, small_pp, Transcript(small_pp.field))
        proof.claimed_value = (proof.claimed_value + 1) % p
        with pytest.raises(ProofRejected):
            verify_eval(proof, c.public(), point, small_pp, Transcript(small_pp.field))

    def test_other_commitment_rejected(self, small_pp, rng):
        p = small_pp.field.modulus
        t = values(rng, 16, p)
        c = commit(t, small_pp, BlindingSource(small_pp.field, b"k"))
        other = commit(values(rng, 16, p), small_pp, BlindingSource(small_pp.field, b"k"))
        point = [int(x) for x in rng.integers(0, p, size=4, dtype=np.int64)]
        proof = prove_eval(t, c, point, small_pp, Transcript(small_pp.field))
        with pytest.raises(ProofRejected):
            verify_eval(proof, other.public(), point, small_pp, Transcript(small_pp.field))

    def test_point_length_checked(self, small_pp, rng):
        t = values(rng, 16, small_pp.field.modulus)
        c = commit(t, small_pp, BlindingSource(small_pp.field, b"k"))
        with pytest.raises(ShapeError):
            prove_eval(t, c, [1, 2, 3], small_pp, Transcript(small_pp.field))

    def test_prover_needs_blinders(self, small_pp, rng):
        t = values(rng, 16, small_pp.field.modulus)
        c = commit(t, small_pp, BlindingSource(small_pp.field, b"k")).public()
        with pytest.raises(ShapeError):
            prove_eval(t, c, [1, 2, 3, 4], small_pp, Transcript(small_pp.field))


class TestBlindingSource:
    def test_reproducible(self, field):
        assert BlindingSource(field, b"s").many(5) == BlindingSource(field, b"s").many(5)

    def test_forks_are_independent(self, field):
        root = BlindingSource(field, b"s")
        assert root.fork("a").many(3) != root.fork("b").many(3)
        assert root.fork("a").many(3) == BlindingSource(field, b"s").fork("a").many(3)

    def test_fresh_seed_when_unset(self, field):
        assert BlindingSource(field).seed != BlindingSource(field).seed
