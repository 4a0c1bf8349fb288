"""
FOCK ORACLE - Verifikasi independen di ruang Fock (occupation-number basis, exact diagonalization)

Basis state m is a bit mask, bit i = occupation of site i. Creation
operators carry the Jordan-Wigner sign (-1)^(occupied sites below i),
ordered by ascending site index.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from config.settings import settings
from core.errors import CapacityError, ValidationError
from core.spectral import check_hermitian
from security.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class FockSystem:
    n_modes: int
    one_body: np.ndarray
    hamiltonian: np.ndarray
    number_operator: np.ndarray

    @property
    def dim(self):
        return 2 ** self.n_modes


@dataclass(frozen=True)
class GrandDensity:
    rho: np.ndarray
    omega: float
    probabilities: np.ndarray
    levels: np.ndarray

    @property
    def von_neumann_entropy(self):
        return float(np.sum(entr(self.probabilities)))


def _occupations(n_modes):
    masks = np.arange(2 ** n_modes)
    occupied = (masks[:, None] >> np.arange(n_modes)) & 1
    below = np.cumsum(occupied, axis=1) - occupied
    return masks, occupied, below


def _parity_sign(count):
    return np.where(count % 2, -1.0, 1.0)


def second_quantize(operator):
    """sum_ij o_ij c_i^dagger c_j on the 2^n dimensional Fock space"""
    operator = np.asarray(operator, dtype=complex)
    n_modes = operator.shape[0]
    if n_modes > settings.FOCK_MAX_MODES:
        raise CapacityError(f"{n_modes} modes exceed the Fock oracle cap {settings.FOCK_MAX_MODES}")

    masks, occupied, below = _occupations(n_modes)
    fock = np.zeros((2 ** n_modes, 2 ** n_modes), dtype=complex)
    for j in range(n_modes):
        has_j = occupied[:, j] == 1
        removed = masks ^ (1 << j)
        sign_j = _parity_sign(below[:, j])
        for i in range(n_modes):
            amplitude = operator[i, j]
            if amplitude == 0:
                continue
            if i == j:
                fock[masks[has_j], masks[has_j]] += amplitude
                continue
            valid = has_j & (occupied[:, i] == 0)
            count_i = below[:, i] - (1 if j < i else 0)
            sign = sign_j * _parity_sign(count_i)
            target = removed | (1 << i)
            fock[target[valid], masks[valid]] += amplitude * sign[valid]
    return fock


def creation(n_modes, i):
    """Matrix of c_i^dagger"""
    masks, occupied, below = _occupations(n_modes)
    empty = occupied[:, i] == 0
    op = np.zeros((2 ** n_modes, 2 ** n_modes))
    op[(masks | (1 << i))[empty], masks[empty]] = _parity_sign(below[:, i])[empty]
    return op


def fock_build(h):
    """Second-quantized Hamiltonian and number operator of one-body h"""
    h = np.asarray(h, dtype=complex)
    check_hermitian(h, "one-body hamiltonian")
    n_modes = h.shape[0]
    if n_modes > settings.FOCK_MAX_MODES:
        raise CapacityError(f"{n_modes} modes exceed the Fock oracle cap {settings.FOCK_MAX_MODES}")

    _, occupied, _ = _occupations(n_modes)
    system = FockSystem(
        n_modes=n_modes,
        one_body=h,
        hamiltonian=second_quantize(h),
        number_operator=np.diag(occupied.sum(axis=1).astype(float)),
    )
    logger.debug(f"🔧 Fock system built: {n_modes} modes, dim {system.dim}")
    return system


def grand_density(system, reservoir):
    """rho = exp(-beta (H - mu N)) / Z, exponentials shifted by the lowest level"""
    grand_h = system.hamiltonian - reservoir.chemical_potential * system.number_operator
    levels, states = np.linalg.eigh(grand_h)
    weights = np.exp(-reservoir.beta * (levels - levels[0]))
    partition_sum = np.sum(weights)
    probabilities = weights / partition_sum
    rho = (states * probabilities) @ np.conj(states.T)
    omega = levels[0] - reservoir.temperature * np.log(partition_sum)
    return GrandDensity(rho=rho, omega=float(omega), probabilities=probabilities, levels=levels)


def fock_expect(density, one_body):
    """tr(rho O) for a one-body operator (already partitioned if needed)"""
    one_body = np.asarray(one_body)
    dim = density.rho.shape[0]
    if one_body.ndim != 2 or 2 ** one_body.shape[0] != dim:
        raise ValidationError(f"one-body operator of shape {one_body.shape} does not fit Fock dimension {dim}")
    value = np.trace(density.rho @ second_quantize(one_body))
    return float(np.real(value))


def fock_global(system, reservoir):
    """U, S, N, Omega straight from the grand density"""
    density = grand_density(system, reservoir)
    return {
        'U': float(np.real(np.trace(density.rho @ system.hamiltonian))),
        'S': density.von_neumann_entropy,
        'N': float(np.real(np.trace(density.rho @ system.number_operator))),
        'Omega': density.omega,
    }


def random_hermitian(rng, n, scale=1.0):
    """Dense complex Hermitian test matrix from a numpy Generator"""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (a + np.conj(a.T))
