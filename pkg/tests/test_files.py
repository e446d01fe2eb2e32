"""
On-disk formats
"""

import numpy as np
import pytest

from tensorproof.errors import DecodeError
from tensorproof.model.assembly import zkllm_commit
from tensorproof.model.files import (
    ParamsDoc,
    PromptDoc,
    decode_pp,
    encode_pp,
    parse_doc,
    read_blinders,
    read_commitments,
    read_output,
    read_pp,
    read_prompt,
    read_weights,
    write_blinders,
    write_commitments,
    write_output,
    write_pp,
    write_prompt,
    write_weights,
)
from tensorproof.model.forward import ModelOutput
from tensorproof.model.weights import random_weights
from tensorproof.polycommit.blinding import BlindingSource

from conftest import tiny_config


class TestDocuments:
    def test_prompt_roundtrip(self, tmp_path):
        path = str(tmp_path / "prompt.json")
        write_prompt(path, [1, 2, 3])
        assert read_prompt(path) == [1, 2, 3]

    @pytest.mark.parametrize("text", [
        "not json",
        '{"tokens": []}',
        '{"tokens": [1, -2]}',
        '{"tokens": [1], "extra": true}',
        '{"tokens": "abc"}',
    ])
    def test_invalid_prompt(self, text):
        with pytest.raises(DecodeError):
            parse_doc(text, PromptDoc)

    def test_params_doc_needs_log_dim(self):
        with pytest.raises(DecodeError):
            parse_doc('{"config": {}, "log_dim": 0, "attention": {}}', ParamsDoc)

    def test_output_roundtrip(self, tmp_path):
        path = str(tmp_path / "output.json")
        out = ModelOutput([1, 2], np.array([[1, -2], [3, 4]]), 16, 1)
        write_output(path, out)
        back = read_output(path)
        np.testing.assert_array_equal(back.logits, out.logits)
        assert (back.tokens, back.scale_log2, back.next_token) == ([1, 2], 16, 1)

    def test_ragged_logits(self, tmp_path):
        path = tmp_path / "output.json"
        path.write_text('{"tokens": [1], "logits": [[1, 2], [3]], "scale_log2": 16, "next_token": 0}')
        with pytest.raises(DecodeError):
            read_output(str(path))

    def test_blinders(self, tmp_path):
        path = str(tmp_path / "blinders.json")
        write_blinders(path, b"\xab" * 32)
        assert read_blinders(path) == b"\xab" * 32
        (tmp_path / "bad.json").write_text('{"seed": "xyz"}')
        with pytest.raises(DecodeError):
            read_blinders(str(tmp_path / "bad.json"))


class TestBinaryFiles:
    def test_public_params(self, small_pp, tmp_path):
        path = str(tmp_path / "pp.bin")
        write_pp(path, small_pp)
        back = read_pp(path)
        assert back.group is small_pp.group
        assert back.max_log_dim == small_pp.max_log_dim
        assert back.seed == small_pp.seed
        assert back.generators == small_pp.generators
        assert back.blinding_generator == small_pp.blinding_generator

    def test_public_params_bad_magic(self, small_pp):
        data = encode_pp(small_pp)
        with pytest.raises(DecodeError):
            decode_pp(b"XXXX" + data[4:])

    def test_public_params_truncated(self, small_pp):
        with pytest.raises(DecodeError):
            decode_pp(encode_pp(small_pp)[:-3])

    def test_trailing_bytes(self, small_pp):
        with pytest.raises(DecodeError):
            decode_pp(encode_pp(small_pp) + b"\x00")

    def test_weights(self, tmp_path):
        config = tiny_config()
        weights = random_weights(config.model, 5)
        path = str(tmp_path / "weights.bin")
        write_weights(path, weights, config)
        back, back_config = read_weights(path)
        assert back_config.to_dict() == config.to_dict()
        for name in weights.names:
            np.testing.assert_array_equal(back[name], weights[name])

    def test_weights_are_not_params(self, small_pp, tmp_path):
        path = tmp_path / "pp.bin"
        write_pp(str(path), small_pp)
        with pytest.raises(DecodeError):
            read_weights(str(path))

    def test_commitments(self, small_pp, tmp_path):
        config = tiny_config(d_model=4, heads=1, d_ff=4, vocab=4)
        weights = random_weights(config.model, 0)
        commitments = zkllm_commit(weights, small_pp, BlindingSource(small_pp.field, b"c"))
        path = str(tmp_path / "commitments.bin")
        write_commitments(path, config, commitments, small_pp)
        back_config, back = read_commitments(path, small_pp)
        assert back_config.digest() == config.digest()
        assert list(back) == list(commitments)
        assert all(back[n] == commitments[n] for n in commitments)
        assert all(c.blinders is None for c in back.values())
