"""
PARTITION THERMO - Besaran termodinamika subsistem berbobot P_nu(gamma), First Law lokal, dan LDOS
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from config.settings import settings
from core.errors import ValidationError
from core.spectral import prob_weights
from core.thermo import thermal_factors


@dataclass(frozen=True)
class SubsystemState:
    label: object
    U: np.ndarray
    S: np.ndarray
    N: np.ndarray
    Omega: np.ndarray


@dataclass(frozen=True)
class SubsystemRates:
    label: object
    U_rate: np.ndarray
    TS_rate: np.ndarray
    N_rate: np.ndarray
    Omega_rate: np.ndarray

    @property
    def W_rate(self):
        """Thermodynamic work rate on the subsystem"""
        return self.Omega_rate


def _check_labels(weights, labels, what):
    if labels is not None and list(weights) != list(labels):
        raise ValidationError(f"{what} labels {list(weights)} do not match partition labels {list(labels)}")


def subsystem_state(frame, P_weights, reservoir, labels=None, factors=None):
    """U, S, N, Omega of every subsystem; P_weights maps label -> P_nu(label)"""
    _check_labels(P_weights, labels, "weight")
    factors = thermal_factors(frame, reservoir) if factors is None else factors
    energies = frame.energies
    states = {}
    for label, weights in P_weights.items():
        states[label] = SubsystemState(
            label=label,
            U=np.sum(weights * factors.f * energies, axis=-1),
            S=np.sum(weights * factors.entropy, axis=-1),
            N=np.sum(weights * factors.f, axis=-1),
            Omega=np.sum(weights * factors.omega, axis=-1),
        )
    return states


def subsystem_rates(frame, P_weights, P_rates, reservoir, labels=None, factors=None):
    """Product-rule derivatives of the subsystem state sums"""
    _check_labels(P_weights, labels, "weight")
    if list(P_weights) != list(P_rates):
        raise ValidationError(f"weight labels {list(P_weights)} and rate labels {list(P_rates)} differ")
    factors = thermal_factors(frame, reservoir) if factors is None else factors
    energies, energy_rates = frame.energies, frame.energy_rates
    mu, temperature = reservoir.chemical_potential, reservoir.temperature

    rates = {}
    for label, weights in P_weights.items():
        weight_rates = P_rates[label]
        rates[label] = SubsystemRates(
            label=label,
            U_rate=np.sum(weight_rates * factors.f * energies
                          + weights * (factors.fdot * energies + factors.f * energy_rates), axis=-1),
            TS_rate=np.sum(temperature * weight_rates * factors.entropy
                           + weights * (energies - mu) * factors.fdot, axis=-1),
            N_rate=np.sum(weight_rates * factors.f + weights * factors.fdot, axis=-1),
            Omega_rate=np.sum(weight_rates * factors.omega + weights * factors.f * energy_rates, axis=-1),
        )
    return rates


def first_law_residual(rates, reservoir):
    """U_rate - TS_rate - mu N_rate - Omega_rate"""
    return rates.U_rate - rates.TS_rate - reservoir.chemical_potential * rates.N_rate - rates.Omega_rate


def ldos(frame, pi, energy_grid, sigma):
    """Gaussian-broadened local density of states of one frame"""
    if not sigma > 0:
        raise ValidationError(f"broadening must be positive, got {sigma}")
    energy_grid = np.asarray(energy_grid, dtype=float)
    if energy_grid.ndim != 1 or np.any(np.diff(energy_grid) < 0):
        raise ValidationError("LDOS energy grid must be a sorted one-dimensional array")
    if frame.is_batched:
        raise ValidationError("LDOS takes a single-point frame")

    weights = prob_weights(frame, pi)
    peaks = norm.pdf(energy_grid[:, None], loc=frame.energies[None, :], scale=sigma)
    return peaks @ weights


def ldos_energy_grid(frame, sigma, points=None):
    """Grid covering every level +- LDOS_PADDING_SIGMAS * sigma, at least 5 points per sigma"""
    if not sigma > 0:
        raise ValidationError(f"broadening must be positive, got {sigma}")
    padding = settings.LDOS_PADDING_SIGMAS * sigma
    span = np.max(frame.energies) - np.min(frame.energies) + 2 * padding
    if points is None:
        points = min(max(settings.LDOS_POINTS, int(np.ceil(5 * span / sigma)) + 1), settings.LDOS_MAX_POINTS)
    return np.linspace(np.min(frame.energies) - padding, np.max(frame.energies) + padding, points)
