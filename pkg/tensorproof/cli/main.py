"""
tensorproof command line

    tensorproof setup     --preset toy --pp pp.zkt --params params.json
    tensorproof fixture   --preset toy --weights w.zkt --prompt prompt.json
    tensorproof commit    --weights w.zkt --pp pp.zkt --out c.zkt --blinders blind.json
    tensorproof prove     --weights w.zkt --prompt prompt.json --pp pp.zkt --blinders blind.json --out proof.zkt
    tensorproof verify    --prompt prompt.json --output output.json --commitment c.zkt --proof proof.zkt --pp pp.zkt
    tensorproof selfcheck --quick

Exit codes: 0 accept, 1 reject, 2 usage or config, 3 I/O.
"""

from typing import Callable, Dict, List, Optional
import argparse
import json
import logging
import os
import secrets
import sys

import numpy as np

from ..config import ProverConfig, resolve_workers
from ..errors import (
    BindingError,
    CapacityError,
    ConfigError,
    DecodeError,
    ParamError,
    ProofRejected,
    RangeError,
    ShapeError,
)
from ..model.assembly import zkllm_commit, zkllm_prove, zkllm_setup, zkllm_verify
from ..model.files import (
    ParamsDoc,
    read_blinders,
    read_commitments,
    read_output,
    read_pp,
    read_prompt,
    read_proof,
    read_weights,
    write_blinders,
    write_commitments,
    write_output,
    write_params,
    write_pp,
    write_prompt,
    write_proof,
    write_weights,
)
from ..model.weights import random_weights
from ..observability.logging import configure_logging
from ..observability.metrics import ProverMetrics
from ..observability.tracing import StageTracer
from ..oracle.selfcheck import SUITES, run_selfcheck
from ..polycommit.blinding import BlindingSource

logger = logging.getLogger(__name__)

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_USAGE = 2
EXIT_IO = 3


class CommandError(Exception):
    """Carries an exit code up to main()"""

    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _hex_seed(value: Optional[str]) -> Optional[bytes]:
    if value is None:
        return None
    try:
        return bytes.fromhex(value)
    except ValueError as e:
        raise CommandError(f"--seed must be hex: {e}", EXIT_USAGE) from e


def load_config(args: argparse.Namespace) -> ProverConfig:
    """--config file, else --preset, else the toy preset"""
    if getattr(args, "config", None):
        return ProverConfig.from_yaml(args.config)
    return ProverConfig.preset(getattr(args, "preset", None) or "toy")


def _observability(config: ProverConfig):
    metrics = ProverMetrics(config.observability.metrics)
    metrics.start()
    return metrics, StageTracer(config.observability.tracing, metrics)


def _print(data: Dict[str, object]) -> None:
    print(json.dumps(data, indent=2, default=str))


# Commands

def cmd_setup(args: argparse.Namespace) -> int:
    config = load_config(args)
    result = zkllm_setup(config, _hex_seed(args.seed))
    write_pp(args.pp, result.pp)
    write_params(args.params, ParamsDoc(**result.params_dict(config)))
    _print({
        "pp": args.pp,
        "params": args.params,
        "group": result.pp.group.name,
        "log_dim": result.pp.max_log_dim,
        "attention": {"segments": result.attention.segments, "radices": list(result.attention.radices)},
    })
    return EXIT_ACCEPT


def cmd_fixture(args: argparse.Namespace) -> int:
    config = load_config(args)
    weights = random_weights(config.model, args.seed)
    write_weights(args.weights, weights, config)
    length = args.tokens or config.model.max_seq
    rng = np.random.default_rng(args.seed + 1)
    tokens = [int(t) for t in rng.integers(0, config.model.vocab, size=length)]
    write_prompt(args.prompt, tokens)
    _print({"weights": args.weights, "prompt": args.prompt, "tensors": len(weights.names), "tokens": length})
    return EXIT_ACCEPT


def _blinding_source(args: argparse.Namespace, pp, create: bool) -> BlindingSource:
    """The blinder sidecar when it exists, otherwise --seed (or fresh randomness when creating)"""
    path = args.blinders
    if path and os.path.exists(path):
        return BlindingSource(pp.field, read_blinders(path))
    seed = _hex_seed(args.seed)
    if seed is None:
        if not create:
            raise CommandError("prove needs the blinder sidecar from commit, or --seed", EXIT_USAGE)
        seed = secrets.token_bytes(32)
    if path and create:
        write_blinders(path, seed)
    return BlindingSource(pp.field, seed)


def cmd_commit(args: argparse.Namespace) -> int:
    weights, config = read_weights(args.weights)
    pp = read_pp(args.pp)
    workers = resolve_workers(args.threads, config)
    metrics, _ = _observability(config)
    blinding = _blinding_source(args, pp, create=True)
    commitments = zkllm_commit(weights, pp, blinding, config.commit.batch_layers, workers)
    write_commitments(args.out, config, commitments, pp)
    elements = sum(c.num_rows for c in commitments.values())
    metrics.record_committed("weights", elements)
    _print({"commitment": args.out, "tensors": len(commitments), "group_elements": elements})
    return EXIT_ACCEPT


def cmd_prove(args: argparse.Namespace) -> int:
    weights, config = read_weights(args.weights)
    tokens = read_prompt(args.prompt)
    pp = read_pp(args.pp)
    workers = resolve_workers(args.threads, config)
    published = None
    if args.commitment:
        committed_config, published = read_commitments(args.commitment, pp)
        if committed_config.digest() != config.digest():
            raise CommandError("commitment file was made for a different config", EXIT_USAGE)
    metrics, tracer = _observability(config)
    blinding = _blinding_source(args, pp, create=False)

    output, bundle = zkllm_prove(weights, tokens, pp, blinding, config, published, tracer, workers)
    write_proof(args.out, bundle, pp)
    write_output(args.output, output)
    metrics.record_outcome("prove", True)
    sizes = bundle.size_report(pp)
    if args.emit_trace:
        tracer.export_json(args.emit_trace, {"sizes": sizes})
    _print({
        "proof": args.out,
        "output": args.output,
        "next_token": output.next_token,
        "proof_bytes": sizes["total"],
        "fragments": len(bundle.fragments),
    })
    return EXIT_ACCEPT


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        tokens = read_prompt(args.prompt)
        output = read_output(args.output)
        pp = read_pp(args.pp)
        config, commitments = read_commitments(args.commitment, pp)
        bundle = read_proof(args.proof, pp)
        metrics, tracer = _observability(config)
        accepted = zkllm_verify(tokens, output, commitments, bundle, pp, config, tracer)
    except DecodeError as e:
        logger.debug("malformed verifier input", exc_info=True)
        print(f"reject: malformed input: {e}", file=sys.stderr)
        return EXIT_REJECT
    metrics.record_outcome("verify", accepted)
    print("accept" if accepted else "reject")
    return EXIT_ACCEPT if accepted else EXIT_REJECT


def cmd_selfcheck(args: argparse.Namespace) -> int:
    report = run_selfcheck(quick=args.quick, seed=args.seed, only=args.only)
    _print(report.to_dict())
    return EXIT_ACCEPT if report.ok else EXIT_REJECT


# Parser

def _config_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--config", help="YAML config file")
    group.add_argument("--preset", help="named preset (toy, toy-gelu, toy-swiglu, paper-k5l3)")


def _threads_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=None, help="worker cap (falls back to ZKT_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensorproof", description="Verifiable quantized transformer inference")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--log-format", choices=["text", "json"], default=None)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("setup", help="derive public parameters and softmax layouts")
    _config_flags(p)
    p.add_argument("--seed", help="hex generator seed (default: commit.seed from the config)")
    p.add_argument("--pp", default="pp.zkt")
    p.add_argument("--params", default="params.json")
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("fixture", help="write random toy weights and a prompt")
    _config_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tokens", type=int, default=None, help="prompt length (default max_seq)")
    p.add_argument("--weights", default="weights.zkt")
    p.add_argument("--prompt", default="prompt.json")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("commit", help="commit the model weights")
    p.add_argument("--weights", required=True)
    p.add_argument("--pp", required=True)
    p.add_argument("--out", default="commitments.zkt")
    p.add_argument("--blinders", default="blinders.json", help="blinder sidecar, reused when present")
    p.add_argument("--seed", help="hex blinder seed for a new sidecar")
    _threads_flag(p)
    p.set_defaults(func=cmd_commit)

    p = sub.add_parser("prove", help="run the model on a prompt and prove it")
    p.add_argument("--weights", required=True)
    p.add_argument("--prompt", required=True)
    p.add_argument("--pp", required=True)
    p.add_argument("--out", default="proof.zkt")
    p.add_argument("--output", default="output.json")
    p.add_argument("--commitment", help="published commitments to check the weights against")
    p.add_argument("--blinders", default="blinders.json")
    p.add_argument("--seed", help="hex blinder seed when there is no sidecar")
    p.add_argument("--emit-trace", default=None, help="write per-stage timings and proof sizes as JSON")
    _threads_flag(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", help="check a proof")
    p.add_argument("--prompt", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--commitment", required=True)
    p.add_argument("--proof", required=True)
    p.add_argument("--pp", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("selfcheck", help="run the oracle suites")
    p.add_argument("--quick", action="store_true", help="small instance counts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", nargs="+", choices=sorted(SUITES), default=None)
    p.set_defaults(func=cmd_selfcheck)
    return parser


def _exit_code(e: Exception) -> int:
    if isinstance(e, CommandError):
        return e.code
    if isinstance(e, (OSError, DecodeError)):
        return EXIT_IO
    if isinstance(e, (ConfigError, ParamError, CapacityError, ShapeError, RangeError)):
        return EXIT_USAGE
    if isinstance(e, (BindingError, ProofRejected)):
        return EXIT_REJECT
    raise e


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging_config = ProverConfig().observability.logging
    if args.log_level:
        logging_config.level = args.log_level
    if args.log_format:
        logging_config.format = args.log_format
    configure_logging(logging_config, args.verbose)

    handler: Callable[[argparse.Namespace], int] = args.func
    try:
        return handler(args)
    except Exception as e:
        code = _exit_code(e)
        logger.debug(f"{args.command} failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
