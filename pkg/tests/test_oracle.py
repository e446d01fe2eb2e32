"""
Reference implementations and the selfcheck suites
"""

from fractions import Fraction

import numpy as np
import pytest

from tensorproof.oracle.reference import (
    gelu_reference,
    layernorm_reference,
    mle_bruteforce,
    multiplicities_reference,
    naive_matmul,
    rational_identity_check,
    rational_sides,
    relu_reference,
    sigmoid_reference,
    softmax_reference,
    swiglu_reference,
)
from tensorproof.oracle.selfcheck import SUITES, run_selfcheck


class TestReferences:
    def test_mle_on_corners(self):
        values = [5, 7, 11, 13]
        assert mle_bruteforce(values, [0, 0], 97) == 5
        assert mle_bruteforce(values, [1, 0], 97) == 11
        assert mle_bruteforce(values, [0, 1], 97) == 7

    def test_naive_matmul_is_canonical(self):
        out = naive_matmul(np.array([[1, -2]]), np.array([[3], [4]]), 97)
        assert out.dtype == object
        assert out[0, 0] == 97 - 5

    def test_rational_sides(self):
        left, right = rational_sides([1, 1], [1, 2], [2, 0], 3)
        assert left == right == Fraction(2, 4)

    def test_rational_pole(self):
        with pytest.raises(ZeroDivisionError):
            rational_identity_check([1], [1], [1], 96, 97)

    def test_multiplicities_flags_outsiders(self):
        m, inside = multiplicities_reference([0, 5], [0, 1])
        assert m == [1, 0]
        assert not inside

    def test_softmax_rows_sum_to_one(self):
        rows = softmax_reference(np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]]), 2.0)
        np.testing.assert_allclose(rows.sum(axis=1), 1.0)
        np.testing.assert_allclose(rows[1], 1 / 3)

    def test_activations(self):
        x = np.array([-2.0, 0.0, 2.0])
        np.testing.assert_array_equal(relu_reference(x), [0.0, 0.0, 2.0])
        assert sigmoid_reference(np.array([0.0]))[0] == 0.5
        np.testing.assert_allclose(gelu_reference(x, exact=True), [-0.0455, 0.0, 1.9545], atol=1e-4)
        np.testing.assert_allclose(gelu_reference(x), x * sigmoid_reference(x, 1.702))
        np.testing.assert_allclose(swiglu_reference(x, np.ones(3)), x * sigmoid_reference(x))

    def test_layernorm(self):
        out = layernorm_reference(np.array([[1.0, 3.0]]), np.ones(2), np.zeros(2), eps=0.0)
        np.testing.assert_allclose(out, [[-1.0, 1.0]])


class TestSelfcheck:
    def test_suites_registered(self):
        assert set(SUITES) == {"mle", "lookup", "softmax"}

    def test_quick_run_passes(self):
        report = run_selfcheck(quick=True, seed=1, only=["mle", "softmax"])
        assert report.ok
        assert [s.name for s in report.suites] == ["mle", "softmax"]
        summary = report.to_dict()
        assert summary["mle"]["failed"] == 0
        assert summary["mle"]["passed"] > 0

    @pytest.mark.slow
    def test_lookup_suite(self):
        report = run_selfcheck(quick=True, only=["lookup"])
        assert report.ok

    @pytest.mark.slow
    @pytest.mark.parametrize("suite", ["lookup", "softmax"])
    def test_full_suite(self, suite):
        report = run_selfcheck(only=[suite])
        assert report.ok, report.to_dict()[suite]["failures"]
