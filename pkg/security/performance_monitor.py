# security/performance_monitor.py
import time

import psutil

from security.logger import get_logger

logger = get_logger(__name__)


class PerformanceMonitor:
    """Wall time and memory of one run; logged only, never part of the results"""

    def __init__(self):
        self.label = None
        self.started_at = None
        self.start_rss_mb = 0.0
        self.metrics_history = []
        self.performance_thresholds = {
            'max_memory_mb': 1024,
            'max_run_time': 600.0,
        }

    @staticmethod
    def _rss_mb():
        return psutil.Process().memory_info().rss / 1024 / 1024

    def start(self, label):
        self.label = label
        self.started_at = time.perf_counter()
        self.start_rss_mb = self._rss_mb()
        logger.debug(f"📊 Performance monitor started for '{label}'")

    def stop(self, frames=0):
        """Metrics dict for the run started by start()"""
        if self.started_at is None:
            return {}

        wall_time = time.perf_counter() - self.started_at
        metrics = {
            'label': self.label,
            'wall_time': wall_time,
            'rss_mb': self._rss_mb(),
            'rss_delta_mb': self._rss_mb() - self.start_rss_mb,
            'cpu_percent': psutil.cpu_percent(interval=None),
            'frames': int(frames),
            'frames_per_second': frames / wall_time if wall_time > 0 else float('inf'),
        }
        self.metrics_history.append(metrics)
        self.started_at = None

        self._check_performance_thresholds(metrics)
        logger.info(f"⏱️ '{self.label}' took {wall_time:.2f}s "
                    f"({metrics['frames_per_second']:.0f} frames/s, {metrics['rss_mb']:.1f}MB)")
        return metrics

    def _check_performance_thresholds(self, metrics):
        alerts = []

        if metrics['rss_mb'] > self.performance_thresholds['max_memory_mb']:
            alerts.append(f"High memory usage: {metrics['rss_mb']:.1f}MB")

        if metrics['wall_time'] > self.performance_thresholds['max_run_time']:
            alerts.append(f"Slow run: {metrics['wall_time']:.2f}s")

        if alerts:
            logger.warning(f"⚠️ Performance alerts: {', '.join(alerts)}")

    def get_performance_report(self):
        """Averages over every run recorded so far"""
        if not self.metrics_history:
            return {}

        count = len(self.metrics_history)
        return {
            'runs': count,
            'avg_wall_time': sum(m['wall_time'] for m in self.metrics_history) / count,
            'peak_rss_mb': max(m['rss_mb'] for m in self.metrics_history),
            'total_frames': sum(m['frames'] for m in self.metrics_history),
        }
