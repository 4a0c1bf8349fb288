"""
WORK - Daya terpartisi, kerja nonlokal, Work Sum Rule, dan mechanical advantage (quantum lever)
"""

from dataclasses import dataclass

import numpy as np

from config.settings import settings
from core.errors import ConsistencyError, ValidationError
from core.model import projector
from core.partition_thermo import subsystem_rates
from core.spectral import partitioned_operator, prob_rates, projector_in_eigenbasis
from core.thermo import global_rates, rate_scale, thermal_factors
from security.logger import get_logger
from security.watchdog import InvariantWatchdog

logger = get_logger(__name__)


@dataclass(frozen=True)
class WorkRecord:
    """Per-label work rates of one frame (or a stacked grid of frames)"""

    labels: tuple
    work_rate: dict
    partitioned_power: dict
    nonlocal_rate: dict
    W_ext_rate: np.ndarray
    sum_rule_residual: np.ndarray
    scale: np.ndarray
    h_norm: np.ndarray
    rates: dict = None


def _pair_average(f):
    """(f_nu + f_mu) / 2"""
    return 0.5 * (f[..., :, None] + f[..., None, :])


def _generation_term(frame, pi_eig, f):
    """sum_{mu != nu} (f_nu + f_mu)/2 M_{nu mu} <mu|pi|nu>, complex"""
    off = ~np.eye(frame.n, dtype=bool)
    terms = _pair_average(f) * frame.drive_elems * np.swapaxes(pi_eig, -1, -2)
    return np.sum(np.where(off, terms, 0.0), axis=(-2, -1))


def _real_checked(value, scale, what):
    residue = np.abs(np.imag(value))
    tolerance = settings.IMAG_RESIDUE_TOL * scale
    if np.any(residue > tolerance):
        worst = float(np.max(residue))
        raise ConsistencyError(f"{what} has imaginary residue {worst:.3e}",
                               {'quantity': what, 'magnitude': worst})
    return np.real(value)


def _split_rates(frame, pi_eig, factors, scale, P_rates=None):
    """(partitioned power, nonlocal work rate) sharing one generation term.

    The nonlocal rate is None when P_rates is not given.
    """
    generation = _real_checked(_generation_term(frame, pi_eig, factors.f), scale, "generation term")
    weights = np.clip(np.diagonal(pi_eig, axis1=-2, axis2=-1).real, 0.0, 1.0)
    power = np.sum(weights * factors.f * frame.energy_rates, axis=-1) + generation
    if P_rates is None:
        return power, None
    return power, np.sum(P_rates * factors.omega, axis=-1) - generation


def partitioned_power(frame, pi, reservoir, factors=None):
    """Expectation of the partitioned power operator <dH/ds|_gamma>"""
    factors = thermal_factors(frame, reservoir) if factors is None else factors
    power, _ = _split_rates(frame, projector_in_eigenbasis(frame, pi), factors, rate_scale(frame, reservoir))
    return power


def nonlocal_work_rate(frame, P_rates, pi, reservoir, factors=None):
    """I^W_gamma = sum_nu dP_nu omega_nu - generation term"""
    factors = thermal_factors(frame, reservoir) if factors is None else factors
    _, nonlocal_rate = _split_rates(frame, projector_in_eigenbasis(frame, pi), factors,
                                    rate_scale(frame, reservoir), P_rates)
    return nonlocal_rate


def work_record(frame, partition, reservoir, watchdog=None):
    """All per-label work rates with the sum rule checked at every point"""
    n = frame.n
    factors = thermal_factors(frame, reservoir)
    scale = rate_scale(frame, reservoir)

    weights, weight_rates = {}, {}
    power, nonlocal_rate = {}, {}
    for label in partition.labels:
        pi = projector(partition, label, n)
        pi_eig = projector_in_eigenbasis(frame, pi)
        weights[label] = np.clip(np.diagonal(pi_eig, axis1=-2, axis2=-1).real, 0.0, 1.0)
        weight_rates[label] = prob_rates(frame, pi)
        power[label], nonlocal_rate[label] = _split_rates(frame, pi_eig, factors, scale, weight_rates[label])

    rates = subsystem_rates(frame, weights, weight_rates, reservoir, partition.labels, factors)
    w_ext = global_rates(frame, reservoir, factors).W_ext_rate
    total_work = sum(rates[label].Omega_rate for label in partition.labels)

    record = WorkRecord(
        labels=partition.labels,
        work_rate={label: rates[label].Omega_rate for label in partition.labels},
        partitioned_power=power,
        nonlocal_rate=nonlocal_rate,
        W_ext_rate=w_ext,
        sum_rule_residual=w_ext - total_work,
        scale=scale,
        h_norm=frame.scale,
        rates=rates,
    )

    monitor = InvariantWatchdog() if watchdog is None else watchdog
    monitor.check_work(record, frame.s)
    if watchdog is None:
        monitor.raise_if_violated()
    return record


def mechanical_advantage(record, label):
    """eta = W_rate[label] / W_ext_rate, NaN where the external power is ~0"""
    if label not in record.labels:
        raise ValidationError(f"unknown subsystem label '{label}'")
    w_ext = np.asarray(record.W_ext_rate, dtype=float)
    floor = settings.ETA_FLOOR_REL * record.h_norm
    defined = np.abs(w_ext) > floor
    safe = np.where(defined, w_ext, 1.0)
    return np.where(defined, record.work_rate[label] / safe, np.nan)


def commutator_flow(frame, partition, label, reservoir):
    """sum_nu f_nu <nu|[h, h|_gamma]|nu>, which vanishes in equilibrium"""
    pi = projector(partition, label, frame.n)
    h = frame.h
    h_local = partitioned_operator(h, pi)
    commutator = h @ h_local - h_local @ h
    in_eigenbasis = np.conj(np.swapaxes(frame.vectors, -1, -2)) @ commutator @ frame.vectors
    diagonal = np.diagonal(in_eigenbasis, axis1=-2, axis2=-1)
    value = np.sum(thermal_factors(frame, reservoir).f * diagonal, axis=-1)
    # the commutator is anti-Hermitian, so the trace is imaginary
    return np.real(value / 1j)


def perturbative_eta(e1, e2, mu):
    """Low-temperature two-level lever estimate 2 (mu - e2) / (e1 - e2)"""
    delta = e1 - e2
    if delta == 0:
        raise ValidationError("perturbative eta needs e1 != e2")
    return 2.0 * (mu - e2) / delta


def perturbative_eta_multi(mean_occupied, delta, mu):
    """Multi-level form: -(2 / delta) (mean occupied far level - mu)"""
    if delta == 0:
        raise ValidationError("perturbative eta needs a nonzero detuning")
    return -2.0 / delta * (mean_occupied - mu)
