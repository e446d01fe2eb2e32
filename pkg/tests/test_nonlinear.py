"""
Rescaling, ReLU, sigmoid-gated activations and LayerNorm
"""

import numpy as np
import pytest

from tensorproof.algebra.transcript import Transcript
from tensorproof.config import LayerNormConfig, SoftmaxConfig
from tensorproof.errors import ParamError, ProofRejected, RangeError
from tensorproof.nonlinear.activations import (
    GELU_SLOPE,
    SigmoidStage,
    gelu_prove,
    gelu_verify,
    sigmoid_params,
    sigmoid_prove,
    sigmoid_verify,
    swiglu_prove,
    swiglu_verify,
)
from tensorproof.nonlinear.layernorm import layernorm_prove, layernorm_verify, row_stats, rsqrt_table, variance_scale
from tensorproof.nonlinear.rescale import (
    RescaleStage,
    digit_widths,
    quotient_table,
    relu_prove,
    relu_table,
    relu_verify,
    rescale_prove,
    rescale_values,
    rescale_verify,
)
from tensorproof.model.weights import quantize
from tensorproof.oracle.reference import layernorm_reference, sigmoid_reference
from tensorproof.attention.params import params_from_config
from tensorproof.polycommit.blinding import BlindingSource
from tensorproof.polycommit.hyrax import commit

GAMMA = 256
SIGMOID = SoftmaxConfig(theta_log2=12)


def blind(pp, seed=b"nl"):
    return BlindingSource(pp.field, seed)


class TestRescaleValues:
    def test_rounds_half_up(self):
        q, rem = rescale_values(np.array([0, 127, 128, -128, -129, 384]), 256)
        assert list(q) == [0, 0, 1, 0, -1, 2]
        assert ((rem >= 0) & (rem < 256)).all()

    def test_ties_differ_from_weight_quantization(self):
        ties = np.array([128, 384, -128, -384])
        q, rem = rescale_values(ties, 256)
        assert list(q) == [1, 2, 0, -1]
        assert list(rem) == [0, 0, 0, 0]
        assert list(quantize(ties / 256, 1)) == [0, 2, 0, -2]

    def test_remainder_reconstructs(self, rng):
        z = rng.integers(-(1 << 20), 1 << 20, size=100)
        q, rem = rescale_values(z, 1 << 8)
        np.testing.assert_array_equal(z, (1 << 8) * q + rem - (1 << 7))

    def test_object_arrays_stay_exact(self):
        big = np.array([(1 << 80) + 5], dtype=object)
        q, _ = rescale_values(big, 1 << 16)
        assert q[0] == 1 << 64

    def test_digit_widths(self):
        assert digit_widths(1 << 16, 10) == [10, 6]
        assert digit_widths(1 << 20, 10) == [10, 10]
        assert digit_widths(1 << 4, 10) == [4]

    def test_quotient_table(self):
        spec = quotient_table(4)
        assert int(spec.columns[0][0]) == -8
        assert int(spec.columns[0][-1]) == 7


class TestRescaleProof:
    def test_honest(self, pp, rng):
        z = rng.integers(-GAMMA * 1000, GAMMA * 1000, size=(4, 8))
        out, proof = rescale_prove(z, GAMMA, Transcript(pp.field), pp, blinding=blind(pp))
        np.testing.assert_array_equal(out, (z + GAMMA // 2) // GAMMA)
        assert rescale_verify(proof, z.shape, GAMMA, Transcript(pp.field), pp)

    def test_pinned_input(self, pp, rng):
        z = rng.integers(-GAMMA * 100, GAMMA * 100, size=(4, 4))
        _, proof = rescale_prove(z, GAMMA, Transcript(pp.field), pp, blinding=blind(pp))
        other = commit(np.zeros(16, dtype=object), pp, blind(pp, b"other"))
        with pytest.raises(ProofRejected):
            rescale_verify(proof, z.shape, GAMMA, Transcript(pp.field), pp, z_commitment=other)

    def test_quotient_out_of_range(self, pp):
        z = np.full((2, 2), GAMMA * (1 << 13))
        with pytest.raises(RangeError):
            rescale_prove(z, GAMMA, Transcript(pp.field), pp)


class TestRelu:
    def test_honest(self, pp, rng):
        z = rng.integers(-4 * GAMMA * GAMMA, 4 * GAMMA * GAMMA, size=(4, 8))
        out, proof = relu_prove(z, GAMMA, Transcript(pp.field), pp, blinding=blind(pp))
        np.testing.assert_array_equal(out, np.maximum((z + GAMMA // 2) // GAMMA, 0))
        assert relu_verify(proof, z.shape, GAMMA, Transcript(pp.field), pp)

    @pytest.mark.parametrize("quotient_bits", [12, 14, 16])
    def test_tables_hold_b_plus_gamma_entries(self, quotient_bits):
        stage = RescaleStage("relu", "z", "out", (4, 4), GAMMA, 10, quotient_bits, relu_table(quotient_bits))
        assert stage.table_sizes() == [GAMMA, 1 << quotient_bits]
        assert sum(stage.table_sizes()) == (1 << quotient_bits) + GAMMA

    def test_remainder_split_under_a_small_budget(self):
        stage = RescaleStage("relu", "z", "out", (4, 4), GAMMA, 4, 14, relu_table(14))
        assert stage.table_sizes() == [16, 16, 1 << 14]

    def test_transcript_mismatch(self, pp, rng):
        z = rng.integers(-GAMMA * GAMMA, GAMMA * GAMMA, size=(4, 4))
        _, proof = relu_prove(z, GAMMA, Transcript(pp.field, b"a"), pp, blinding=blind(pp))
        with pytest.raises(ProofRejected):
            relu_verify(proof, z.shape, GAMMA, Transcript(pp.field, b"b"), pp)


class TestSigmoid:
    @pytest.fixture(scope="class")
    def params(self):
        return sigmoid_params(SIGMOID, GAMMA)

    def test_params_are_pairs(self, params):
        assert params.n == 2 and params.d == 1
        assert params.temperature == GAMMA

    def test_rejects_softmax_params(self, params):
        wide = params_from_config(SoftmaxConfig(), GAMMA, 4, 4)
        with pytest.raises(ParamError):
            SigmoidStage("s", "z", "out", (4, 4), wide)

    def test_honest(self, params, pp, rng):
        z = rng.integers(-3 * GAMMA, 3 * GAMMA, size=(4, 4))
        out, proof = sigmoid_prove(z, params, Transcript(pp.field), pp, blinding=blind(pp))
        assert out.shape == z.shape
        np.testing.assert_allclose(out / params.theta, sigmoid_reference(z / GAMMA), atol=params.epsilon)
        assert sigmoid_verify(proof, z.shape, params, Transcript(pp.field), pp)

    def test_pinned_input(self, params, pp, rng):
        z = rng.integers(-GAMMA, GAMMA, size=(4, 4))
        _, proof = sigmoid_prove(z, params, Transcript(pp.field), pp, blinding=blind(pp))
        other = commit(np.ones(16, dtype=object), pp, blind(pp, b"o"))
        with pytest.raises(ProofRejected):
            sigmoid_verify(proof, z.shape, params, Transcript(pp.field), pp, z_commitment=other)


@pytest.mark.slow
class TestGatedActivations:
    def test_gelu(self, pp, rng):
        params = sigmoid_params(SIGMOID, GAMMA, GELU_SLOPE)
        g = np.rint(rng.uniform(-3, 3, size=(4, 4)) * GAMMA).astype(np.int64)
        out, proof = gelu_prove(g, params, Transcript(pp.field), pp, blinding=blind(pp))
        x = g / GAMMA
        expected = x * sigmoid_reference(x, GELU_SLOPE)
        np.testing.assert_allclose(out / GAMMA, expected, atol=3 * params.epsilon + 0.01)
        assert gelu_verify(proof, g.shape, params, Transcript(pp.field), pp)

    def test_swiglu(self, pp, rng):
        params = sigmoid_params(SIGMOID, GAMMA)
        g, u = (np.rint(rng.uniform(-1.5, 1.5, size=(4, 4)) * GAMMA).astype(np.int64) for _ in range(2))
        out, proof = swiglu_prove(g, u, params, Transcript(pp.field), pp, blinding=blind(pp))
        x, y = g / GAMMA, u / GAMMA
        np.testing.assert_allclose(out / GAMMA, x * sigmoid_reference(x) * y, atol=2.25 * params.epsilon + 0.01)
        assert swiglu_verify(proof, g.shape, params, Transcript(pp.field), pp)


class TestLayerNormPieces:
    def test_row_stats(self):
        s, q = row_stats(np.array([[1, 2, 3, 6]]))
        assert s[0] == 12
        # n·x − S = [-8, -4, 0, 12]
        assert q[0] == 64 + 16 + 0 + 144

    def test_variance_scale_covers_the_table(self):
        cfg = LayerNormConfig()
        s_d = variance_scale(8, GAMMA, cfg)
        assert s_d & (s_d - 1) == 0
        top = (1 << cfg.var_max_log2) * 8**3 * GAMMA**2
        assert top // s_d <= 1 << cfg.var_bits

    def test_rsqrt_table(self):
        cfg = LayerNormConfig()
        spec = rsqrt_table(8, GAMMA, cfg)
        xs, ys = spec.columns
        s_d = variance_scale(8, GAMMA, cfg)
        x = 64
        var = x * s_d / (8**3 * GAMMA**2)
        assert int(ys[x]) == round(GAMMA / np.sqrt(var + cfg.eps))
        assert spec.raw_size == 1 << cfg.var_bits


@pytest.mark.slow
class TestLayerNormProof:
    def test_honest(self, pp, rng):
        x = np.rint(rng.normal(0, 1, size=(4, 8)) * GAMMA).astype(np.int64)
        gain = np.rint(rng.uniform(0.5, 1.5, size=8) * GAMMA).astype(np.int64)
        bias = np.rint(rng.uniform(-0.5, 0.5, size=8) * GAMMA).astype(np.int64)
        out, proof = layernorm_prove(x, gain, bias, GAMMA, Transcript(pp.field), pp, blinding=blind(pp))
        expected = layernorm_reference(x / GAMMA, gain / GAMMA, bias / GAMMA)
        np.testing.assert_allclose(out / GAMMA, expected, atol=0.1)
        assert layernorm_verify(proof, x.shape, GAMMA, Transcript(pp.field), pp)

    def test_variance_above_table(self, pp):
        x = np.tile(np.array([-20, 20] * 4) * GAMMA, (2, 1))
        with pytest.raises(RangeError):
            layernorm_prove(x, np.full(8, GAMMA), np.zeros(8), GAMMA, Transcript(pp.field), pp)
