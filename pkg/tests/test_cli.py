"""
Command-line flows and exit codes
"""

import json

import pytest

from tensorproof.cli.main import EXIT_ACCEPT, EXIT_IO, EXIT_REJECT, EXIT_USAGE, main

CONFIG = """\
model:
  layers: 1
  d_model: 8
  heads: 2
  d_ff: 16
  vocab: 16
  max_seq: 4
commit:
  group: toy61
  seed: cli-tests
"""


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "config.yaml").write_text(CONFIG)
    return tmp_path


def run(*argv):
    return main(["--log-level", "WARNING", *argv])


def paths(d):
    return {name: str(d / name) for name in (
        "config.yaml", "pp.zkt", "params.json", "weights.zkt", "prompt.json",
        "commitments.zkt", "blinders.json", "proof.zkt", "output.json", "trace.json",
    )}


def setup_and_commit(d):
    p = paths(d)
    assert run("setup", "--config", p["config.yaml"], "--pp", p["pp.zkt"], "--params", p["params.json"]) == EXIT_ACCEPT
    assert run(
        "fixture", "--config", p["config.yaml"], "--seed", "3", "--tokens", "3",
        "--weights", p["weights.zkt"], "--prompt", p["prompt.json"],
    ) == EXIT_ACCEPT
    assert run(
        "commit", "--weights", p["weights.zkt"], "--pp", p["pp.zkt"],
        "--out", p["commitments.zkt"], "--blinders", p["blinders.json"], "--seed", "ab" * 16,
    ) == EXIT_ACCEPT
    return p


def verify(p):
    return run(
        "verify", "--prompt", p["prompt.json"], "--output", p["output.json"],
        "--commitment", p["commitments.zkt"], "--proof", p["proof.zkt"], "--pp", p["pp.zkt"],
    )


class TestSetupAndFixture:
    def test_setup_writes_params(self, workdir, capsys):
        p = paths(workdir)
        assert run("setup", "--config", p["config.yaml"], "--pp", p["pp.zkt"], "--params", p["params.json"]) == 0
        params = json.loads((workdir / "params.json").read_text())
        assert params["config"]["commit"]["group"] == "toy61"
        assert params["attention"]["segments"] == 3
        summary = json.loads(capsys.readouterr().out)
        assert summary["group"] == "toy61"

    def test_fixture_prompt_length(self, workdir):
        p = paths(workdir)
        run("fixture", "--config", p["config.yaml"], "--tokens", "2", "--weights", p["weights.zkt"], "--prompt", p["prompt.json"])
        tokens = json.loads((workdir / "prompt.json").read_text())["tokens"]
        assert len(tokens) == 2
        assert all(0 <= t < 16 for t in tokens)

    def test_commit_writes_sidecar(self, workdir):
        p = setup_and_commit(workdir)
        assert json.loads((workdir / "blinders.json").read_text())["seed"] == "ab" * 16
        assert (workdir / "commitments.zkt").stat().st_size > 0


class TestExitCodes:
    def test_unknown_preset(self, workdir):
        assert run("setup", "--preset", "huge", "--pp", str(workdir / "pp.zkt")) == EXIT_USAGE

    def test_missing_file(self, workdir):
        assert run("commit", "--weights", str(workdir / "nope.zkt"), "--pp", str(workdir / "pp.zkt")) == EXIT_IO

    def test_bad_seed(self, workdir):
        assert run("setup", "--preset", "toy", "--seed", "zz", "--pp", str(workdir / "pp.zkt")) == EXIT_USAGE

    def test_prove_needs_blinders(self, workdir):
        p = setup_and_commit(workdir)
        (workdir / "blinders.json").unlink()
        code = run(
            "prove", "--weights", p["weights.zkt"], "--prompt", p["prompt.json"], "--pp", p["pp.zkt"],
            "--blinders", p["blinders.json"],
        )
        assert code == EXIT_USAGE

    def test_argparse_usage(self):
        with pytest.raises(SystemExit) as info:
            main(["prove"])
        assert info.value.code == EXIT_USAGE

    def test_selfcheck(self, capsys):
        assert run("selfcheck", "--quick", "--only", "mle") == EXIT_ACCEPT
        assert json.loads(capsys.readouterr().out)["mle"]["failed"] == 0


@pytest.mark.slow
class TestProveVerify:
    def test_round_trip_and_rejections(self, workdir, capsys):
        p = setup_and_commit(workdir)
        code = run(
            "prove", "--weights", p["weights.zkt"], "--prompt", p["prompt.json"], "--pp", p["pp.zkt"],
            "--commitment", p["commitments.zkt"], "--blinders", p["blinders.json"],
            "--out", p["proof.zkt"], "--output", p["output.json"], "--emit-trace", p["trace.json"],
        )
        assert code == EXIT_ACCEPT
        trace = json.loads((workdir / "trace.json").read_text())
        assert trace["sizes"]["total"] == (workdir / "proof.zkt").stat().st_size
        capsys.readouterr()

        assert verify(p) == EXIT_ACCEPT
        assert capsys.readouterr().out.strip() == "accept"

        output = json.loads((workdir / "output.json").read_text())
        output["next_token"] = (output["next_token"] + 1) % 16
        (workdir / "output.json").write_text(json.dumps(output))
        assert verify(p) == EXIT_REJECT
        assert capsys.readouterr().out.strip() == "reject"

        (workdir / "proof.zkt").write_bytes((workdir / "proof.zkt").read_bytes()[:-10])
        assert verify(p) == EXIT_REJECT
