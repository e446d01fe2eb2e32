"""
Multilinear extensions, the sumcheck engine and matmul reduction
"""

from itertools import product

import numpy as np
import pytest

from tensorproof.algebra.transcript import Transcript
from tensorproof.errors import ProofRejected, ShapeError
from tensorproof.oracle.reference import mle_bruteforce, naive_matmul
from tensorproof.sumcheck.engine import (
    Combination,
    Term,
    batch_claims,
    hypercube_sum,
    interpolate,
    poly_eval,
    sumcheck_prove,
    sumcheck_verify,
)
from tensorproof.sumcheck.matmul import matmul_sumcheck_prove, matmul_sumcheck_verify
from tensorproof.sumcheck.mle import bits_of, eq_eval, eq_table, mle_evaluate, mle_evaluate_flat
from tensorproof.sumcheck.tensor import Tensor, log2_exact, next_pow2, pad_to_pow2


def random_values(rng, field, n):
    return [int(v) for v in rng.integers(0, field.modulus, size=n, dtype=np.int64)]


class TestTensor:
    def test_next_pow2(self):
        assert [next_pow2(n) for n in (0, 1, 2, 3, 5, 8, 9)] == [1, 1, 2, 4, 8, 8, 16]

    def test_log2_exact(self):
        assert log2_exact(1) == 0
        assert log2_exact(64) == 6
        with pytest.raises(ShapeError):
            log2_exact(12)

    def test_pad_every_axis(self):
        out = pad_to_pow2(np.arange(6).reshape(2, 3))
        assert out.shape == (2, 4)
        np.testing.assert_array_equal(out[:, 3], [0, 0])

    def test_from_ints_pads_and_lifts(self, field):
        t = Tensor.from_ints([[1, -2, 3]], field)
        assert t.shape == (1, 4)
        assert t.num_vars == 2
        assert list(t.signed().reshape(-1)) == [1, -2, 3, 0]

    def test_rejects_non_power_of_two(self, field):
        with pytest.raises(ShapeError):
            Tensor(np.zeros(3, dtype=object), field)


class TestMle:
    @pytest.mark.parametrize("d", [0, 1, 3, 6])
    def test_matches_bruteforce(self, d, field, rng):
        values = random_values(rng, field, 1 << d)
        point = random_values(rng, field, d)
        assert mle_evaluate_flat(np.array(values, dtype=object), point, field) == mle_bruteforce(values, point, field.modulus)

    def test_agrees_on_hypercube(self, field, rng):
        values = random_values(rng, field, 8)
        for i in range(8):
            assert mle_evaluate_flat(np.array(values, dtype=object), bits_of(i, 3), field) == values[i]

    def test_first_coordinate_is_the_row(self, field):
        t = Tensor.from_ints([[1, 2], [3, 4]], field)
        assert mle_evaluate(t, [1, 0]) == 3
        assert mle_evaluate(t, [0, 1]) == 2

    def test_point_length_checked(self, field):
        with pytest.raises(ShapeError):
            mle_evaluate_flat(np.zeros(4, dtype=object), [1], field)

    def test_raw_array_needs_field(self):
        with pytest.raises(ShapeError):
            mle_evaluate(np.zeros(2, dtype=object), [0])

    def test_eq_table(self, field, rng):
        u = random_values(rng, field, 3)
        table = eq_table(u, field)
        for i, bits in enumerate(product([0, 1], repeat=3)):
            assert table[i] == eq_eval(u, list(bits), field)
        assert int(table.sum()) % field.modulus == 1

    def test_eq_on_booleans(self, field):
        assert eq_eval([1, 0, 1], [1, 0, 1], field) == 1
        assert eq_eval([1, 0, 1], [1, 1, 1], field) == 0


class TestPolynomials:
    def test_interpolate_and_evaluate(self, field):
        # 3 + 2x + x²
        evals = [3, 6, 11]
        coeffs = interpolate(evals, field)
        assert coeffs == [3, 2, 1]
        assert poly_eval(coeffs, 5, field) == 38

    def test_batch_claims(self, field):
        assert batch_claims([1, 2, 3], 10, field) == 321


class TestSumcheck:
    TRIPLE = Combination([Term(1, ("f", "g", "h")), Term(3, ("f",))])

    def tables(self, rng, field, n=16):
        return {name: np.array(random_values(rng, field, n), dtype=object) for name in "fgh"}

    def test_honest_proof_verifies(self, field, rng):
        tables = self.tables(rng, field)
        claim = hypercube_sum(self.TRIPLE, tables, field)
        proof = sumcheck_prove(self.TRIPLE, tables, 3, claim, Transcript(field), field)
        assert proof.num_rounds == 4
        result = sumcheck_verify(proof, self.TRIPLE, 4, 3, claim, Transcript(field), field)
        for name in "fgh":
            expected = mle_evaluate_flat(tables[name], result.point, field)
            assert result.claims[name] == expected

    def test_wrong_claim_rejected(self, field, rng):
        tables = self.tables(rng, field)
        claim = hypercube_sum(self.TRIPLE, tables, field)
        proof = sumcheck_prove(self.TRIPLE, tables, 3, claim, Transcript(field), field)
        with pytest.raises(ProofRejected):
            sumcheck_verify(proof, self.TRIPLE, 4, 3, claim + 1, Transcript(field), field)

    def test_false_claim_cannot_be_proved(self, field, rng):
        tables = self.tables(rng, field)
        claim = (hypercube_sum(self.TRIPLE, tables, field) + 1) % field.modulus
        proof = sumcheck_prove(self.TRIPLE, tables, 3, claim, Transcript(field), field)
        with pytest.raises(ProofRejected):
            sumcheck_verify(proof, self.TRIPLE, 4, 3, claim, Transcript(field), field)

    def test_tampered_round_rejected(self, field, rng):
        tables = self.tables(rng, field)
        claim = hypercube_sum(self.TRIPLE, tables, field)
        proof = sumcheck_prove(self.TRIPLE, tables, 3, claim, Transcript(field), field)
        proof.round_polys[2][1] = (proof.round_polys[2][1] + 1) % field.modulus
        with pytest.raises(ProofRejected):
            sumcheck_verify(proof, self.TRIPLE, 4, 3, claim, Transcript(field), field)

    def test_tampered_final_claim_rejected(self, field, rng):
        tables = self.tables(rng, field)
        claim = hypercube_sum(self.TRIPLE, tables, field)
        proof = sumcheck_prove(self.TRIPLE, tables, 3, claim, Transcript(field), field)
        proof.final_claims["g"] = (proof.final_claims["g"] + 1) % field.modulus
        with pytest.raises(ProofRejected):
            sumcheck_verify(proof, self.TRIPLE, 4, 3, claim, Transcript(field), field)

    def test_round_count_checked(self, field, rng):
        tables = self.tables(rng, field)
        claim = hypercube_sum(self.TRIPLE, tables, field)
        proof = sumcheck_prove(self.TRIPLE, tables, 3, claim, Transcript(field), field)
        with pytest.raises(ProofRejected):
            sumcheck_verify(proof, self.TRIPLE, 5, 3, claim, Transcript(field), field)

    def test_public_tables_are_recomputed(self, field, rng):
        combo = Combination([Term(1, ("eq", "f"))])
        u = random_values(rng, field, 3)
        f = np.array(random_values(rng, field, 8), dtype=object)
        tables = {"eq": eq_table(u, field), "f": f}
        claim = mle_evaluate_flat(f, u, field)
        proof = sumcheck_prove(combo, tables, 2, claim, Transcript(field), field, public=("eq",))
        assert set(proof.final_claims) == {"f"}
        result = sumcheck_verify(
            proof, combo, 3, 2, claim, Transcript(field), field,
            public=lambda pt: {"eq": eq_eval(u, pt, field)}, public_names=("eq",),
        )
        assert result.claims["f"] == mle_evaluate_flat(f, result.point, field)

    def test_degree_bound_enforced(self, field, rng):
        tables = self.tables(rng, field)
        with pytest.raises(ShapeError):
            sumcheck_prove(self.TRIPLE, tables, 2, 0, Transcript(field), field)

    def test_mismatched_lengths(self, field, rng):
        tables = self.tables(rng, field)
        tables["h"] = tables["h"][:8]
        with pytest.raises(ShapeError):
            sumcheck_prove(self.TRIPLE, tables, 3, 0, Transcript(field), field)


class TestMatmul:
    def test_honest_product(self, field, rng):
        a = rng.integers(-50, 50, size=(4, 8))
        b = rng.integers(-50, 50, size=(8, 2))
        c = naive_matmul(a, b, field.modulus)
        ta, tb, tc = (Tensor.from_ints(x, field) for x in (a, b, c))
        proof = matmul_sumcheck_prove(ta, tb, tc, Transcript(field))
        claims = matmul_sumcheck_verify(proof, (4, 8), (8, 2), Transcript(field), field, tc)
        assert claims.a_value == mle_evaluate(ta, claims.a_point)
        assert claims.b_value == mle_evaluate(tb, claims.b_point)

    def test_wrong_product_rejected(self, field, rng):
        a = rng.integers(-50, 50, size=(4, 4))
        b = rng.integers(-50, 50, size=(4, 4))
        c = naive_matmul(a, b, field.modulus)
        c[1, 2] = (c[1, 2] + 1) % field.modulus
        ta, tb, tc = (Tensor.from_ints(x, field) for x in (a, b, c))
        proof = matmul_sumcheck_prove(ta, tb, tc, Transcript(field))
        honest = Tensor.from_ints(naive_matmul(a, b, field.modulus), field)
        with pytest.raises(ProofRejected):
            matmul_sumcheck_verify(proof, (4, 4), (4, 4), Transcript(field), field, honest)

    def test_wrong_product_fails_the_rounds(self, field, rng):
        a = rng.integers(-50, 50, size=(4, 4))
        b = rng.integers(-50, 50, size=(4, 4))
        c = naive_matmul(a, b, field.modulus)
        c[0, 0] = (c[0, 0] + 1) % field.modulus
        ta, tb, tc = (Tensor.from_ints(x, field) for x in (a, b, c))
        proof = matmul_sumcheck_prove(ta, tb, tc, Transcript(field))
        # even without C to compare against, the rounds cannot reach the false claim
        with pytest.raises(ProofRejected):
            matmul_sumcheck_verify(proof, (4, 4), (4, 4), Transcript(field), field)

    def test_shape_mismatch(self, field):
        a = Tensor.from_ints(np.ones((2, 4)), field)
        b = Tensor.from_ints(np.ones((2, 2)), field)
        c = Tensor.from_ints(np.ones((2, 2)), field)
        with pytest.raises(ShapeError):
            matmul_sumcheck_prove(a, b, c, Transcript(field))


@pytest.mark.slow
class TestMatmulTrials:
    """200 random 64×64×64 products, honest and with one corrupted entry"""

    def operands(self, rng):
        return rng.integers(-128, 128, size=(64, 64)), rng.integers(-128, 128, size=(64, 64))

    def test_honest_products(self, field):
        rng = np.random.default_rng(64)
        for _ in range(200):
            a, b = self.operands(rng)
            ta, tb, tc = (Tensor.from_ints(x, field) for x in (a, b, a @ b))
            proof = matmul_sumcheck_prove(ta, tb, tc, Transcript(field))
            assert proof.sumcheck.num_rounds == 6
            claims = matmul_sumcheck_verify(proof, (64, 64), (64, 64), Transcript(field), field, tc)
            assert claims.a_value == mle_evaluate(ta, claims.a_point)
            assert claims.b_value == mle_evaluate(tb, claims.b_point)

    def test_corrupted_entries(self, field):
        rng = np.random.default_rng(65)
        for _ in range(200):
            a, b = self.operands(rng)
            c = a @ b
            honest = Tensor.from_ints(c, field)
            i, j = (int(v) for v in rng.integers(0, 64, size=2))
            c[i, j] += int(rng.integers(1, 1 << 10))
            ta, tb, tc = (Tensor.from_ints(x, field) for x in (a, b, c))
            proof = matmul_sumcheck_prove(ta, tb, tc, Transcript(field))
            with pytest.raises(ProofRejected):
                matmul_sumcheck_verify(proof, (64, 64), (64, 64), Transcript(field), field, honest)
            with pytest.raises(ProofRejected):
                matmul_sumcheck_verify(proof, (64, 64), (64, 64), Transcript(field), field)
