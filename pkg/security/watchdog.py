"""
WATCHDOG - Pemantau invarian titik-demi-titik (sum rule, First Law, kualitas frame)
"""

import numpy as np

from config.settings import settings
from core.errors import ConsistencyError
from core.partition_thermo import first_law_residual
from security.logger import get_logger, subthermo_logger

logger = get_logger(__name__)


class InvariantWatchdog:
    def __init__(self, thresholds=None):
        self.thresholds = {
            'eigen_residual': 1e-10,
            'unitarity': 1e-12,
            'hermiticity': settings.HERMITIAN_TOL,
            'work_decomposition': settings.SUM_RULE_TOL,
            'nonlocal_conservation': settings.SUM_RULE_TOL,
            'sum_rule': settings.SUM_RULE_TOL,
            'first_law': settings.FIRST_LAW_TOL,
            'state_identity': settings.STATE_TOL,
            'additivity': settings.SUM_RULE_TOL,
        }
        self.thresholds.update(thresholds or {})
        self.issues = []
        self.checks_run = 0

    def _record(self, issue_type, values, tolerance_scale, s, label=None, severity='critical'):
        """Keep the worst point of values / tolerance_scale above the threshold"""
        self.checks_run += 1
        values = np.atleast_1d(np.abs(np.asarray(values, dtype=float)))
        tolerance_scale = np.broadcast_to(np.asarray(tolerance_scale, dtype=float), values.shape)
        relative = values / tolerance_scale
        if not np.any(np.isnan(values)) and np.max(relative, initial=0.0) <= self.thresholds[issue_type]:
            return
        k = int(np.nanargmax(np.where(np.isnan(relative), np.inf, relative)))
        s_values = np.broadcast_to(np.atleast_1d(np.asarray(s, dtype=float)), values.shape)
        issue = {
            'type': issue_type,
            'severity': severity,
            'label': label,
            's': float(s_values[k]),
            'value': float(relative[k]),
            'threshold': self.thresholds[issue_type],
        }
        self.issues.append(issue)
        subthermo_logger.log_invariant_violation(issue)

    def check_frames(self, frame):
        """Eigen-equation residual, unitarity, ordering and tracking of (stacked) frames"""
        n = frame.n
        h, v, e = frame.h, frame.vectors, frame.energies
        residual = np.max(np.abs(h @ v - v * e[..., None, :]), axis=(-2, -1))
        self._record('eigen_residual', residual, frame.scale * n, frame.s)

        gram = np.conj(np.swapaxes(v, -1, -2)) @ v
        self._record('unitarity', np.max(np.abs(gram - np.eye(n)), axis=(-2, -1)), 1.0, frame.s)

        m = frame.drive_elems
        asymmetry = np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2))), axis=(-2, -1))
        self._record('hermiticity', asymmetry, frame.scale, frame.s)

        if n > 1 and np.any(np.diff(e, axis=-1) < 0):
            self.issues.append({'type': 'ordering', 'severity': 'critical', 'label': None,
                                's': None, 'value': 1.0, 'threshold': 0.0})

        for warning in frame.warnings:
            self.issues.append({'type': 'gauge_tracking', 'severity': 'warning', 'label': None,
                                's': None, 'value': 0.0, 'threshold': settings.TRACKING_OVERLAP_MIN,
                                'message': warning})

    def check_work(self, record, s):
        """W_rate = power + nonlocal per label, sum of nonlocal = 0, sum rule"""
        scale = record.scale
        for label in record.labels:
            decomposition = (record.work_rate[label] - record.partitioned_power[label]
                             - record.nonlocal_rate[label])
            self._record('work_decomposition', decomposition, scale, s, label)
        conservation = sum(record.nonlocal_rate[label] for label in record.labels)
        self._record('nonlocal_conservation', conservation, scale, s)
        self._record('sum_rule', record.sum_rule_residual,
                     np.maximum(scale, np.abs(record.W_ext_rate)), s)

    def check_first_law(self, rates, reservoir, s, scale):
        """Per-label U_rate - TS_rate - mu N_rate - Omega_rate"""
        for label, label_rates in rates.items():
            self._record('first_law', first_law_residual(label_rates, reservoir), scale, s, label)

    def check_global(self, global_state, states, global_rates, rates, reservoir, s, scale):
        """Omega identity and additivity of states and rates over labels"""
        state_scale = np.maximum(1.0, np.abs(global_state.U))
        self._record('state_identity', global_state.residual(reservoir), state_scale, s)
        self._record('first_law', global_rates.residual(reservoir), scale, s)

        for field in ('U', 'S', 'N', 'Omega'):
            total = sum(getattr(state, field) for state in states.values())
            magnitude = np.maximum(1.0, np.abs(getattr(global_state, field)))
            self._record('additivity', total - getattr(global_state, field), magnitude, s, field)

        for field in ('U_rate', 'TS_rate', 'N_rate', 'Omega_rate'):
            total = sum(getattr(rate, field) for rate in rates.values())
            self._record('additivity', total - getattr(global_rates, field), scale, s, field)

    @property
    def violations(self):
        return [issue for issue in self.issues if issue['severity'] == 'critical']

    @property
    def warnings(self):
        return [issue for issue in self.issues if issue['severity'] != 'critical']

    def raise_if_violated(self):
        """ConsistencyError carrying the worst critical issue"""
        violations = self.violations
        if not violations:
            logger.debug(f"✅ {self.checks_run} invariant checks passed")
            return
        worst = max(violations, key=lambda issue: issue['value'] / max(issue['threshold'], 1e-300))
        raise ConsistencyError(
            f"invariant '{worst['type']}' violated"
            f"{' for ' + str(worst['label']) if worst['label'] is not None else ''}"
            f" at s={worst['s']}: {worst['value']:.3e} > {worst['threshold']:.3e}",
            {'quantity': worst['type'], 'label': worst['label'], 's': worst['s'],
             'magnitude': worst['value'], 'tolerance': worst['threshold'],
             'violations': len(violations)},
        )

    def summary(self):
        return {
            'checks_run': self.checks_run,
            'violations': len(self.violations),
            'warnings': len(self.warnings),
        }
