"""
Logging, metrics and tracing
"""

from .logging import JsonFormatter, TextFormatter, configure_logging
from .metrics import ProverMetrics
from .tracing import OTEL_AVAILABLE, StageTracer

__all__ = [
    "JsonFormatter",
    "TextFormatter",
    "configure_logging",
    "ProverMetrics",
    "OTEL_AVAILABLE",
    "StageTracer",
]
