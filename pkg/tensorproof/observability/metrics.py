"""
Prometheus metrics for proving and verification

Metrics live in a private CollectorRegistry so several provers (tests, one
process per command) never collide on the default registry.
"""

from typing import Dict, Optional
import logging

from prometheus_client import CollectorRegistry, Counter, Histogram, generate_latest, start_http_server

from ..config import MetricsConfig

logger = logging.getLogger(__name__)


class ProverMetrics:
    """
    Stage timings, proof outcomes and committed sizes

    Example:
        >>> metrics = ProverMetrics(MetricsConfig(enabled=True, port=9090))
        >>> metrics.start()
        >>> metrics.record_stage("layers.0.softmax", "prove", 0.8)
    """

    def __init__(self, config: Optional[MetricsConfig] = None, prefix: str = "tensorproof"):
        self.config = config or MetricsConfig()
        self.prefix = prefix
        self.registry = CollectorRegistry()
        self._create_metrics()

    def _create_metrics(self):
        prefix = self.prefix
        labels = sorted(self.config.labels)

        self.stage_duration = Histogram(
            f"{prefix}_stage_duration_seconds",
            "Time spent per proof stage",
            ["stage", "phase"] + labels,
            registry=self.registry,
        )

        self.proofs_total = Counter(
            f"{prefix}_proofs_total",
            "Proof runs by operation and outcome",
            ["operation", "outcome"] + labels,
            registry=self.registry,
        )

        self.committed_elements = Counter(
            f"{prefix}_committed_elements_total",
            "Field elements committed",
            ["kind"] + labels,
            registry=self.registry,
        )

    def _labels(self, **values: str) -> Dict[str, str]:
        values.update(self.config.labels)
        return values

    def start(self) -> None:
        """Serve /metrics when enabled"""
        if not self.config.enabled:
            return
        start_http_server(self.config.port, registry=self.registry)
        logger.info(f"metrics endpoint on port {self.config.port}")

    def record_stage(self, stage: str, phase: str, seconds: float) -> None:
        self.stage_duration.labels(**self._labels(stage=stage, phase=phase)).observe(seconds)

    def record_outcome(self, operation: str, accepted: bool) -> None:
        outcome = "accept" if accepted else "reject"
        self.proofs_total.labels(**self._labels(operation=operation, outcome=outcome)).inc()

    def record_committed(self, kind: str, elements: int) -> None:
        self.committed_elements.labels(**self._labels(kind=kind)).inc(elements)

    def render(self) -> bytes:
        """Text exposition of the registry"""
        return generate_latest(self.registry)
