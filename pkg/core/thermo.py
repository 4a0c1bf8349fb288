"""
THERMO - Kernel grand-kanonik (Fermi-Dirac, entropi, potensial) dan besaran global
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import entr, expit

from config.settings import settings
from core.errors import ConsistencyError, ValidationError
from security.logger import get_logger

logger = get_logger(__name__)


def _reduced(energy, reservoir):
    temperature = reservoir.temperature
    if not temperature > 0:
        raise ValidationError(f"temperature must be positive, got {temperature}")
    return (np.asarray(energy, dtype=float) - reservoir.chemical_potential) / temperature


def fermi(energy, reservoir):
    """f = 1 / (1 + exp((e - mu) / T))"""
    return expit(-_reduced(energy, reservoir))


def entropy_kernel(energy, reservoir):
    """-f ln f - (1-f) ln(1-f), in the form x f + ln(1 + exp(-x)) at x = |e - mu| / T"""
    a = np.abs(_reduced(energy, reservoir))
    return a * expit(-a) + np.log1p(np.exp(-a))


def grand_kernel(energy, reservoir):
    """omega = -T ln(1 + exp(-(e - mu) / T))"""
    x = _reduced(energy, reservoir)
    return -reservoir.temperature * np.logaddexp(0.0, -x)


def fermi_rate(energy, energy_rate, reservoir):
    """df/ds by the chain rule: -beta f (1 - f) de/ds"""
    x = _reduced(energy, reservoir)
    return -reservoir.beta * expit(-x) * expit(x) * np.asarray(energy_rate, dtype=float)


def entropy_reference(occupation):
    """Binary entropy straight from occupations (cross-check only)"""
    occupation = np.asarray(occupation, dtype=float)
    return entr(occupation) + entr(1.0 - occupation)


@dataclass(frozen=True)
class ThermalFactors:
    """Per-eigenstate kernels at every point of a frame"""

    f: np.ndarray
    fdot: np.ndarray
    entropy: np.ndarray
    omega: np.ndarray


def thermal_factors(frame, reservoir):
    energies = frame.energies
    return ThermalFactors(
        f=fermi(energies, reservoir),
        fdot=fermi_rate(energies, frame.energy_rates, reservoir),
        entropy=entropy_kernel(energies, reservoir),
        omega=grand_kernel(energies, reservoir),
    )


@dataclass(frozen=True)
class GlobalState:
    U: np.ndarray
    S: np.ndarray
    N: np.ndarray
    Omega: np.ndarray

    def residual(self, reservoir):
        return self.Omega - (self.U - reservoir.temperature * self.S - reservoir.chemical_potential * self.N)


@dataclass(frozen=True)
class GlobalRates:
    W_ext_rate: np.ndarray
    Omega_rate: np.ndarray
    U_rate: np.ndarray
    TS_rate: np.ndarray
    N_rate: np.ndarray

    def residual(self, reservoir):
        """U_rate - TS_rate - mu N_rate - Omega_rate"""
        return self.U_rate - self.TS_rate - reservoir.chemical_potential * self.N_rate - self.Omega_rate


def global_state(energies, reservoir):
    """U, S, N, Omega summed over the last axis of energies"""
    energies = np.asarray(energies, dtype=float)
    if not np.all(np.isfinite(energies)):
        raise ValidationError("energies must be finite")
    f = fermi(energies, reservoir)
    state = GlobalState(
        U=np.sum(f * energies, axis=-1),
        S=np.sum(entropy_kernel(energies, reservoir), axis=-1),
        N=np.sum(f, axis=-1),
        Omega=np.sum(grand_kernel(energies, reservoir), axis=-1),
    )

    tolerance = settings.STATE_TOL * np.maximum(1.0, np.abs(state.U))
    residual = np.abs(state.residual(reservoir))
    if np.any(residual > tolerance):
        worst = float(np.max(residual - tolerance))
        raise ConsistencyError(
            f"Omega != U - TS - mu N (excess {worst:.3e})",
            {'quantity': 'global_state', 'magnitude': worst},
        )
    return state


def global_rates(frame, reservoir, factors=None):
    """External power and the rates of the global state functions"""
    factors = thermal_factors(frame, reservoir) if factors is None else factors
    energies, rates = frame.energies, frame.energy_rates
    power = np.sum(factors.f * rates, axis=-1)
    return GlobalRates(
        W_ext_rate=power,
        Omega_rate=power.copy(),
        U_rate=np.sum(factors.f * rates + energies * factors.fdot, axis=-1),
        TS_rate=np.sum((energies - reservoir.chemical_potential) * factors.fdot, axis=-1),
        N_rate=np.sum(factors.fdot, axis=-1),
    )


def rate_scale(frame, reservoir):
    """Magnitude used to make rate tolerances relative"""
    energies = np.abs(frame.energies) + abs(reservoir.chemical_potential)
    drive = np.abs(frame.energy_rates) * (1.0 + reservoir.beta * energies / 4.0)
    return np.maximum(1.0, np.sum(drive, axis=-1))
