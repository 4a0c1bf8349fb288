import logging
from dataclasses import replace

import numpy as np
import pytest

from core.errors import ConsistencyError
from core.model import Partition, Reservoir
from core.work import work_record
from security.performance_monitor import PerformanceMonitor
from security.watchdog import InvariantWatchdog

PARTITION = Partition(assignment={"a": "A", "b": "B", "c": "B"}, labels=("A", "B"))


def test_clean_record_passes(random_frame):
    watchdog = InvariantWatchdog()
    frame = random_frame(3)
    watchdog.check_frames(frame)
    work_record(frame, PARTITION, Reservoir(0.3), watchdog)
    watchdog.raise_if_violated()
    assert watchdog.summary()["violations"] == 0
    assert watchdog.summary()["checks_run"] > 0


def test_broken_sum_rule_is_reported(random_frame, caplog):
    frame = random_frame(3)
    record = work_record(frame, PARTITION, Reservoir(0.3))
    broken = replace(record, sum_rule_residual=np.asarray(1e-3))
    watchdog = InvariantWatchdog()
    with caplog.at_level(logging.ERROR, logger="SubThermo"):
        watchdog.check_work(broken, frame.s)
    assert any("sum_rule" in message for message in caplog.messages)
    with pytest.raises(ConsistencyError) as info:
        watchdog.raise_if_violated()
    assert info.value.diagnostics["quantity"] == "sum_rule"
    assert info.value.diagnostics["tolerance"] == watchdog.thresholds["sum_rule"]


def test_worst_point_is_kept():
    watchdog = InvariantWatchdog()
    watchdog._record("first_law", [0.0, 5e-9, 1e-8, 2e-9], 1.0, [0.0, 0.25, 0.5, 0.75], label="A")
    issue = watchdog.violations[0]
    assert issue["s"] == 0.5 and issue["label"] == "A"
    assert issue["value"] == pytest.approx(1e-8)


def test_nan_is_a_violation():
    watchdog = InvariantWatchdog()
    watchdog._record("additivity", [np.nan], 1.0, 0.3)
    assert len(watchdog.violations) == 1


def test_tracking_warnings_are_not_violations(random_frame):
    frame = replace(random_frame(2), warnings=("gauge tracking overlap 0.010 < 0.1",))
    watchdog = InvariantWatchdog()
    watchdog.check_frames(frame)
    assert watchdog.violations == []
    assert watchdog.warnings[0]["type"] == "gauge_tracking"
    watchdog.raise_if_violated()


def test_custom_thresholds():
    watchdog = InvariantWatchdog({"first_law": 1.0})
    watchdog._record("first_law", [0.5], 1.0, 0.0)
    assert watchdog.violations == []


def test_performance_monitor():
    monitor = PerformanceMonitor()
    assert monitor.stop() == {}
    monitor.start("demo")
    metrics = monitor.stop(frames=100)
    assert metrics["label"] == "demo"
    assert metrics["frames"] == 100
    assert metrics["wall_time"] >= 0 and metrics["rss_mb"] > 0
    assert monitor.get_performance_report()["runs"] == 1
