"""
Per-stage spans and timings

StageChain calls `tracer.stage(label, phase)` around every forward, prove
and verify step. Wall-clock timings are always kept; OpenTelemetry spans are
opened when the SDK is installed and tracing is enabled.
"""

from collections import defaultdict
from contextlib import contextmanager
from typing import Dict, Iterator, Optional
import json
import logging
import time

from ..config import TracingConfig
from .metrics import ProverMetrics

try:
    from opentelemetry import trace
    from opentelemetry.trace import Status, StatusCode
    OTEL_AVAILABLE = True
except ImportError:
    OTEL_AVAILABLE = False

logger = logging.getLogger(__name__)


class StageTracer:
    """
    Example:
        >>> tracer = StageTracer()
        >>> with tracer.stage("layers.0.qk", "prove"):
        ...     pass
        >>> tracer.timings["layers.0.qk"]["prove"]
    """

    def __init__(self, config: Optional[TracingConfig] = None, metrics: Optional[ProverMetrics] = None):
        self.config = config or TracingConfig()
        self.metrics = metrics
        self.timings: Dict[str, Dict[str, float]] = defaultdict(dict)
        self._tracer = None
        if OTEL_AVAILABLE and self.config.enabled:
            self._tracer = trace.get_tracer(self.config.service_name)
        elif self.config.enabled:
            logger.debug("opentelemetry not installed; keeping timings only")

    @contextmanager
    def stage(self, label: str, phase: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            if self._tracer is None:
                yield
            else:
                with self._tracer.start_as_current_span(f"{phase} {label}") as span:
                    span.set_attribute("tensorproof.stage", label)
                    span.set_attribute("tensorproof.phase", phase)
                    try:
                        yield
                    except Exception as e:
                        span.set_status(Status(StatusCode.ERROR, str(e)))
                        raise
        finally:
            elapsed = time.perf_counter() - start
            phases = self.timings[label]
            phases[phase] = phases.get(phase, 0.0) + elapsed
            if self.metrics is not None:
                self.metrics.record_stage(label, phase, elapsed)

    def totals(self) -> Dict[str, float]:
        """Seconds per phase over all stages"""
        out: Dict[str, float] = defaultdict(float)
        for phases in self.timings.values():
            for phase, seconds in phases.items():
                out[phase] += seconds
        return dict(out)

    def to_dict(self) -> Dict[str, object]:
        return {"stages": {k: dict(v) for k, v in self.timings.items()}, "totals": self.totals()}

    def export_json(self, path: str, extra: Optional[Dict[str, object]] = None) -> None:
        data = self.to_dict()
        data.update(extra or {})
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=2)
            fh.write("\n")
