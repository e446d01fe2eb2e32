"""
tlookup set inclusion and function lookups
"""

from itertools import combinations, combinations_with_replacement

import numpy as np
import pytest

from tensorproof.algebra.transcript import Transcript
from tensorproof.errors import NotInTable, ProofRejected, RangeError, ShapeError
from tensorproof.lookup.tables import LookupTable, apply_function, function_table, pad_column, range_table
from tensorproof.lookup.tlookup import (
    LookupFragment,
    compute_multiplicities,
    function_lookup_prove,
    function_lookup_verify,
    tlookup_prove,
    tlookup_setup,
    tlookup_verify,
)
from tensorproof.oracle.reference import multiplicities_reference, rational_identity_check
from tensorproof.polycommit.blinding import BlindingSource
from tensorproof.polycommit.hyrax import commit


def prove_and_verify(s, t, pp, seed=b"s"):
    table = tlookup_setup(t, pp)
    blinding = BlindingSource(pp.field, seed)
    c = commit(np.array(s, dtype=object), pp, blinding.fork("s"))
    fragment = tlookup_prove(np.array(s, dtype=object), c, table, Transcript(pp.field, b"lk"), pp, blinding=blinding)
    return tlookup_verify(fragment, table, c.public(), Transcript(pp.field, b"lk"), pp), fragment, table, c


class TestMultiplicities:
    def test_counts_first_occurrence(self):
        m = compute_multiplicities([1, 1, 3, 0], [0, 1, 2, 3])
        assert list(m) == [1, 2, 0, 1]

    def test_duplicate_table_entries(self):
        m = compute_multiplicities([2, 2], [2, 2, 5, 7])
        assert list(m) == [2, 0, 0, 0]

    def test_strict_raises(self):
        with pytest.raises(NotInTable) as info:
            compute_multiplicities([0, 9], [0, 1, 2, 3])
        assert info.value.index == 1
        assert info.value.value == 9

    def test_lenient_skips(self, field):
        m = compute_multiplicities([0, 9], [0, 1, 2, 3], field, strict=False)
        assert list(m) == [1, 0, 0, 0]

    def test_agrees_with_reference(self, rng):
        t = list(range(8))
        s = [int(v) for v in rng.integers(0, 8, size=32)]
        assert list(compute_multiplicities(s, t)) == multiplicities_reference(s, t)[0]

    def test_identity_holds_in_the_field(self, field, rng):
        t = list(range(16))
        s = [int(v) for v in rng.integers(0, 16, size=64)]
        m, inside = multiplicities_reference(s, t)
        assert inside
        assert rational_identity_check(s, t, m, 987654321, field.modulus)
        m[0] += 1
        assert not rational_identity_check(s, t, m, 987654321, field.modulus)


class TestTables:
    def test_pad_column_repeats_first(self):
        np.testing.assert_array_equal(pad_column(np.array([5, 6, 7])), [5, 6, 7, 5])

    def test_range_table(self, field):
        spec = range_table(-2, 2)
        table = spec.build(field)
        assert spec.raw_size == 5
        assert table.size == 8
        assert table.raw_size == 5
        assert [field.signed(int(v)) for v in table.entries[:5]] == [-2, -1, 0, 1, 2]

    def test_empty_range(self):
        with pytest.raises(ShapeError):
            range_table(3, 2)

    def test_function_table_lookup(self):
        xs = np.arange(-4, 4)
        spec = function_table("sq", xs, xs * xs)
        np.testing.assert_array_equal(apply_function(spec, np.array([-4, 0, 3])), [16, 0, 9])
        with pytest.raises(RangeError):
            apply_function(spec, np.array([4]))

    def test_keys_distinguish_parameters(self):
        xs = np.arange(4)
        assert function_table("f", xs, xs, 1).key != function_table("f", xs, xs, 2).key

    def test_combined_columns(self, field):
        table = LookupTable.from_columns([[1, 2], [10, 20]], field)
        assert table.width == 2
        assert list(table.combined([1, 3], field)) == [31, 62]


class TestTlookup:
    def test_member_accepted(self, small_pp, rng):
        s = [int(v) for v in rng.integers(0, 8, size=16)]
        accepted, *_ = prove_and_verify(s, list(range(8)), small_pp)
        assert accepted

    def test_short_input_padded(self, small_pp):
        accepted, fragment, *_ = prove_and_verify([3, 1], list(range(8)), small_pp)
        assert accepted
        assert fragment.size == 2

    def test_table_not_power_of_two(self, small_pp):
        accepted, *_ = prove_and_verify([0, 4, 4, 2], [0, 1, 2, 3, 4], small_pp)
        assert accepted

    def test_non_member_rejected(self, small_pp):
        s = [0, 1, 2, 9]
        table = tlookup_setup(list(range(8)), small_pp)
        blinding = BlindingSource(small_pp.field, b"s")
        c = commit(np.array(s, dtype=object), small_pp, blinding.fork("s"))
        fragment = tlookup_prove(np.array(s, dtype=object), c, table, Transcript(small_pp.field, b"lk"), small_pp)
        with pytest.raises(ProofRejected):
            tlookup_verify(fragment, table, c.public(), Transcript(small_pp.field, b"lk"), small_pp)

    def test_forced_multiplicities_rejected(self, small_pp):
        s = np.array([0, 1, 2, 3], dtype=object)
        table = tlookup_setup(list(range(4)), small_pp)
        c = commit(s, small_pp, BlindingSource(small_pp.field, b"k"))
        wrong = np.array([2, 0, 1, 1], dtype=object)
        fragment = tlookup_prove(s, c, table, Transcript(small_pp.field), small_pp, m=wrong)
        with pytest.raises(ProofRejected):
            tlookup_verify(fragment, table, c.public(), Transcript(small_pp.field), small_pp)

    def test_wrong_input_commitment_rejected(self, small_pp):
        _, fragment, table, _ = prove_and_verify([0, 1, 2, 3], list(range(4)), small_pp)
        other = commit(np.array([1, 1, 2, 3], dtype=object), small_pp, BlindingSource(small_pp.field, b"x"))
        with pytest.raises(ProofRejected):
            tlookup_verify(fragment, table, other.public(), Transcript(small_pp.field, b"lk"), small_pp)

    def test_fragment_bytes(self, small_pp):
        _, fragment, table, c = prove_and_verify([0, 1, 2, 3, 3, 2, 1, 0], list(range(4)), small_pp)
        decoded = LookupFragment.from_bytes(fragment.to_bytes(small_pp), small_pp)
        assert decoded.size == fragment.size
        assert tlookup_verify(decoded, table, c.public(), Transcript(small_pp.field, b"lk"), small_pp)

    def test_retry_bound(self, small_pp):
        _, fragment, table, c = prove_and_verify([0, 1, 2, 3], list(range(4)), small_pp)
        fragment.proof.retries = 9
        with pytest.raises(ProofRejected):
            tlookup_verify(fragment, table, c.public(), Transcript(small_pp.field, b"lk"), small_pp)


class TestFunctionLookup:
    def setup_table(self, pp):
        xs = np.arange(-4, 4)
        spec = function_table("relu", xs, np.maximum(xs, 0))
        return tlookup_setup(spec.columns[0], pp, [spec.columns[1]])

    def test_correct_outputs_accepted(self, small_pp):
        table = self.setup_table(small_pp)
        x = np.array([-3, 2, 0, -1], dtype=object)
        y = np.array([0, 2, 0, 0], dtype=object)
        blinding = BlindingSource(small_pp.field, b"f")
        cx, cy = commit(x, small_pp, blinding.fork("x")), commit(y, small_pp, blinding.fork("y"))
        fragment = function_lookup_prove(x, y, cx, cy, table, Transcript(small_pp.field), small_pp)
        assert function_lookup_verify(fragment, table, cx.public(), cy.public(), Transcript(small_pp.field), small_pp)

    def test_wrong_output_rejected(self, small_pp):
        table = self.setup_table(small_pp)
        x = np.array([-3, 2, 0, -1], dtype=object)
        y = np.array([0, 2, 0, 1], dtype=object)
        blinding = BlindingSource(small_pp.field, b"f")
        cx, cy = commit(x, small_pp, blinding.fork("x")), commit(y, small_pp, blinding.fork("y"))
        fragment = function_lookup_prove(x, y, cx, cy, table, Transcript(small_pp.field), small_pp)
        with pytest.raises(ProofRejected):
            function_lookup_verify(fragment, table, cx.public(), cy.public(), Transcript(small_pp.field), small_pp)

    def test_needs_two_columns(self, small_pp):
        table = tlookup_setup([0, 1], small_pp)
        c = commit([0, 1], small_pp)
        with pytest.raises(ShapeError):
            function_lookup_prove(np.array([0, 1]), np.array([0, 1]), c, c, table, Transcript(small_pp.field), small_pp)


class TestRationalIdentity:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_holds_exactly_for_subsets(self, field, n):
        rng = np.random.default_rng(n)
        for size in range(1, 5):
            for t in combinations(range(4), size):
                for s in combinations_with_replacement(range(4), n):
                    m, inside = multiplicities_reference(s, t)
                    x = int(rng.integers(1, 1 << 60))
                    assert rational_identity_check(s, t, m, x, field.modulus) == inside


@pytest.mark.slow
class TestTlookupTrials:
    """2^10 table entries, 2^6 looked-up values"""

    @pytest.fixture(scope="class")
    def table(self, pp):
        values = [int(v) for v in np.random.default_rng(10).choice(1 << 20, size=1 << 10, replace=False)]
        return values, tlookup_setup(values, pp)

    def accepts(self, s, table, pp, seed):
        blinding = BlindingSource(pp.field, seed)
        s = np.array(s, dtype=object)
        c = commit(s, pp, blinding.fork("s"))
        fragment = tlookup_prove(s, c, table, Transcript(pp.field, b"trial"), pp, blinding=blinding)
        try:
            return tlookup_verify(fragment, table, c.public(), Transcript(pp.field, b"trial"), pp)
        except ProofRejected:
            return False

    def test_one_outsider_always_rejected(self, table, pp):
        values, lookup = table
        rng = np.random.default_rng(11)
        accepted = 0
        for trial in range(100):
            s = [int(v) for v in rng.choice(values, size=1 << 6)]
            s[int(rng.integers(0, 1 << 6))] = (1 << 20) + trial
            accepted += self.accepts(s, lookup, pp, b"out%d" % trial)
        assert accepted == 0

    def test_members_always_accepted(self, table, pp):
        values, lookup = table
        rng = np.random.default_rng(12)
        accepted = 0
        for trial in range(1000):
            s = [int(v) for v in rng.choice(values, size=1 << 6)]
            accepted += self.accepts(s, lookup, pp, b"in%d" % trial)
        assert accepted == 1000
