"""
Oracle suites run by `tensorproof selfcheck`

Each suite pits a production code path against a reference from
oracle.reference and counts agreements. `quick` shrinks the instance counts
so the whole run takes seconds.
"""

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, product
from typing import Callable, Dict, List, Optional
import logging
import time

import numpy as np

from ..algebra.field import TEST_FIELD
from ..algebra.group import TOY61
from ..algebra.transcript import Transcript
from ..attention.params import params_from_config
from ..attention.softmax import softmax_compute
from ..attention.tables import build_tables
from ..config import ProverConfig, SoftmaxConfig
from ..errors import ProofRejected, RangeError
from ..lookup.tlookup import tlookup_prove, tlookup_setup, tlookup_verify
from ..polycommit.blinding import BlindingSource
from ..polycommit.hyrax import commit, keygen
from ..sumcheck.mle import mle_evaluate_flat
from .reference import mle_bruteforce, multiplicities_reference, rational_identity_check, softmax_reference

logger = logging.getLogger(__name__)

MEAN_L1 = 1e-2


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    seconds: float = 0.0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def check(self, condition: bool, what: str) -> None:
        if condition:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < 5:
                self.failures.append(what)


@dataclass
class SelfCheckReport:
    suites: List[SuiteResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.suites)

    def to_dict(self) -> Dict[str, Dict[str, object]]:
        return {
            s.name: {"passed": s.passed, "failed": s.failed, "seconds": round(s.seconds, 3), "failures": s.failures}
            for s in self.suites
        }


def mle_suite(quick: bool = False, seed: int = 0) -> SuiteResult:
    """Folding MLE evaluation against the hypercube sum"""
    result = SuiteResult("mle")
    rng = np.random.default_rng(seed)
    p = TEST_FIELD.modulus
    for case in range(50 if quick else 500):
        d = int(rng.integers(0, 7 if quick else 11))
        values = [int(v) for v in rng.integers(0, p, size=1 << d, dtype=np.int64)]
        point = [int(v) for v in rng.integers(0, p, size=d, dtype=np.int64)]
        fast = mle_evaluate_flat(np.array(values, dtype=object), point, TEST_FIELD)
        result.check(fast == mle_bruteforce(values, point, p), f"case {case}: d={d}")
    return result


def lookup_suite(quick: bool = False, seed: int = 0) -> SuiteResult:
    """
    The field identity against the reference multiplicities for every
    multiset S with |S| ≤ 8 over every table T in a 4-letter alphabet, then
    tlookup acceptance against set inclusion
    """
    result = SuiteResult("lookup")
    alphabet = range(4)
    pp = keygen(3, b"selfcheck", TOY61)
    blinding = BlindingSource(pp.field, seed.to_bytes(8, "little") * 4)
    rng = np.random.default_rng(seed)
    p = pp.field.modulus
    longest = 4 if quick else 8
    for size in range(1, len(alphabet) + 1):
        for t in combinations(alphabet, size):
            for n in range(1, longest + 1):
                # the identity is symmetric in S, so multisets cover every order
                for s in combinations_with_replacement(alphabet, n):
                    m, inside = multiplicities_reference(s, t)
                    x = int(rng.integers(1, 1 << 60))
                    try:
                        identity = rational_identity_check(s, t, m, x, p)
                    except ZeroDivisionError:
                        identity = inside
                    result.check(identity == inside, f"identity S={list(s)} T={list(t)}")

    tables = [list(t) for t in combinations(alphabet, 2)]
    if not quick:
        tables.append(list(alphabet))
    for t in tables:
        table = tlookup_setup(t, pp)
        cases = [list(s) for n in ((2,) if quick else (2, 4)) for s in product(alphabet, repeat=n)]
        if not quick:
            cases += [[int(v) for v in rng.integers(0, 4, size=8)] for _ in range(16)]
            cases += [[t[0]] * 8, [t[-1]] * 7 + [t[0]]]
        for s in cases:
            _, inside = multiplicities_reference(s, t)
            c = commit(s, pp, blinding.fork(f"{t}:{s}"))
            fragment = tlookup_prove(np.array(s, dtype=object), c, table, Transcript(pp.field, b"selfcheck"), pp)
            try:
                accepted = tlookup_verify(fragment, table, c.public(), Transcript(pp.field, b"selfcheck"), pp)
            except ProofRejected:
                accepted = False
            result.check(accepted == inside, f"tlookup S={s} T={t}")
    return result


def softmax_suite(quick: bool = False, seed: int = 0) -> SuiteResult:
    """
    Quantized softmax rows against float64, within the derived error bound

    The full run adds the K=5, L=3 preset with 2^16 tables at n=64, where
    the mean L1 error must also stay under MEAN_L1.
    """
    result = SuiteResult("softmax")
    rng = np.random.default_rng(seed)
    rows = 20 if quick else 1000
    # layout, gamma, d, n, mean check
    cases = [(SoftmaxConfig(), 1 << 8, 16, 32, False)]
    if not quick:
        cases.append((ProverConfig.preset("paper-k5l3").model.attention, 1 << 16, 16, 64, True))
    for cfg, gamma, d, n, mean_check in cases:
        params = params_from_config(cfg, gamma, d, n)
        z = np.rint(rng.uniform(-4.0, 4.0, size=(rows, n)) * gamma).astype(np.int64)
        try:
            witness = softmax_compute(z, params, build_tables(params))
        except RangeError as e:
            result.check(False, f"n={n}: {e}")
            continue
        expected = softmax_reference(z, params.temperature)
        errors = np.abs(witness.y / params.theta - expected).sum(axis=1)
        for i, err in enumerate(errors):
            result.check(err <= params.epsilon, f"n={n} row {i}: L1 error {err:.3g} above {params.epsilon:.3g}")
        if mean_check:
            result.check(errors.mean() <= MEAN_L1, f"n={n}: mean L1 error {errors.mean():.3g} above {MEAN_L1}")
    return result


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "mle": mle_suite,
    "lookup": lookup_suite,
    "softmax": softmax_suite,
}


def run_selfcheck(quick: bool = False, seed: int = 0, only: Optional[List[str]] = None) -> SelfCheckReport:
    report = SelfCheckReport()
    for name, suite in SUITES.items():
        if only and name not in only:
            continue
        start = time.perf_counter()
        result = suite(quick=quick, seed=seed)
        result.seconds = time.perf_counter() - start
        logger.info(
            f"selfcheck {name}: {result.passed} passed, {result.failed} failed",
            extra={"suite": name, "seconds": round(result.seconds, 3)},
        )
        report.suites.append(result)
    return report
