"""
Logging formatters, Prometheus metrics and the stage tracer
"""

import json
import logging

import pytest

from tensorproof.config import LoggingConfig, MetricsConfig, TracingConfig
from tensorproof.observability import JsonFormatter, ProverMetrics, StageTracer, TextFormatter, configure_logging


def make_record(**extra):
    record = logging.LogRecord("tensorproof.test", logging.INFO, __file__, 1, "proved %d stages", (3,), None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


class TestFormatters:
    def test_json_carries_extras(self):
        entry = json.loads(JsonFormatter().format(make_record(seq=4, group="toy61")))
        assert entry["message"] == "proved 3 stages"
        assert entry["level"] == "INFO"
        assert entry["seq"] == 4
        assert entry["group"] == "toy61"

    def test_text_appends_key_values(self):
        line = TextFormatter().format(make_record(seq=4))
        assert "proved 3 stages" in line
        assert line.endswith("seq=4")

    def test_configure_replaces_handlers(self, tmp_path):
        path = tmp_path / "log.jsonl"
        config = LoggingConfig(level="WARNING", format="json", output="file", path=str(path))
        logger = configure_logging(config)
        configure_logging(config)
        assert len(logger.handlers) == 1
        assert logger.level == logging.WARNING
        assert not logger.propagate
        logging.getLogger("tensorproof.model").warning("careful", extra={"stage": "qk"})
        logger.handlers[0].flush()
        entry = json.loads(path.read_text().strip().splitlines()[-1])
        assert entry["stage"] == "qk"
        logger.handlers[0].close()
        configure_logging(LoggingConfig())

    def test_verbose_means_debug(self):
        assert configure_logging(LoggingConfig(), verbose=True).level == logging.DEBUG


class TestMetrics:
    def test_render(self):
        metrics = ProverMetrics(MetricsConfig(labels={"host": "ci"}))
        metrics.record_stage("layers.0.qk", "prove", 0.25)
        metrics.record_outcome("verify", True)
        metrics.record_outcome("verify", False)
        metrics.record_committed("weights", 1024)
        text = metrics.render().decode()
        assert 'tensorproof_proofs_total{operation="verify",outcome="accept",host="ci"} 1.0' in text
        assert "tensorproof_stage_duration_seconds_count" in text
        assert 'tensorproof_committed_elements_total{kind="weights",host="ci"} 1024.0' in text

    def test_registries_are_private(self):
        a, b = ProverMetrics(), ProverMetrics()
        a.record_outcome("prove", True)
        assert "outcome=\"accept\"" not in b.render().decode()

    def test_disabled_start_is_noop(self):
        ProverMetrics(MetricsConfig(enabled=False)).start()


class TestTracer:
    def test_accumulates_per_phase(self):
        tracer = StageTracer(TracingConfig(enabled=False))
        for _ in range(2):
            with tracer.stage("softmax", "prove"):
                pass
        with tracer.stage("softmax", "verify"):
            pass
        assert set(tracer.timings["softmax"]) == {"prove", "verify"}
        assert set(tracer.totals()) == {"prove", "verify"}

    def test_records_on_error(self):
        tracer = StageTracer(TracingConfig(enabled=False))
        with pytest.raises(ValueError):
            with tracer.stage("qk", "forward"):
                raise ValueError("boom")
        assert "forward" in tracer.timings["qk"]

    def test_feeds_metrics(self):
        metrics = ProverMetrics()
        tracer = StageTracer(TracingConfig(enabled=False), metrics)
        with tracer.stage("qk", "prove"):
            pass
        assert 'stage="qk"' in metrics.render().decode()

    def test_export_json(self, tmp_path):
        tracer = StageTracer(TracingConfig(enabled=False))
        with tracer.stage("qk", "prove"):
            pass
        path = tmp_path / "timings.json"
        tracer.export_json(str(path), {"proof_bytes": 123})
        data = json.loads(path.read_text())
        assert data["proof_bytes"] == 123
        assert "qk" in data["stages"]
        assert "prove" in data["totals"]
