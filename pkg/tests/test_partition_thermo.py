import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import trapezoid

from config.presets import TWO_LEVEL_PARTITION
from core.errors import ValidationError
from core.model import Partition, Reservoir, projector
from core.partition_thermo import (first_law_residual, ldos, ldos_energy_grid, subsystem_rates,
                                   subsystem_state)
from core.spectral import frame_from_matrices, prob_rates, prob_weights
from core.thermo import global_rates, global_state


def _weights(frame, partition):
    weights, rates = {}, {}
    for label in partition.labels:
        pi = projector(partition, label, frame.n)
        weights[label] = prob_weights(frame, pi)
        rates[label] = prob_rates(frame, pi)
    return weights, rates


@pytest.fixture
def three_site():
    return Partition(assignment={"a": "L", "b": "R", "c": "R"}, labels=("L", "R"))


def test_states_add_up_to_global(random_frame, three_site):
    reservoir = Reservoir(0.4, 0.3)
    frame = random_frame(3)
    weights, _ = _weights(frame, three_site)
    states = subsystem_state(frame, weights, reservoir, three_site.labels)
    total = global_state(frame.energies, reservoir)
    for field in ("U", "S", "N", "Omega"):
        assert sum(getattr(state, field) for state in states.values()) == pytest.approx(
            getattr(total, field), abs=1e-12)


def test_local_first_law_and_additivity(random_frame, three_site):
    reservoir = Reservoir(0.25, -0.1)
    frame = random_frame(3)
    weights, rates = _weights(frame, three_site)
    local = subsystem_rates(frame, weights, rates, reservoir, three_site.labels)
    total = global_rates(frame, reservoir)
    for label in three_site.labels:
        assert abs(first_law_residual(local[label], reservoir)) < 1e-11
    assert sum(r.W_rate for r in local.values()) == pytest.approx(total.W_ext_rate, abs=1e-12)
    assert sum(r.N_rate for r in local.values()) == pytest.approx(total.N_rate, abs=1e-12)


def test_split_level_weights():
    frame = frame_from_matrices(0.0, [[0.0, 1.0], [1.0, 0.0]], np.zeros((2, 2)))
    weights, _ = _weights(frame, TWO_LEVEL_PARTITION)
    assert_allclose(weights["1"], [0.5, 0.5])
    states = subsystem_state(frame, weights, Reservoir(0.2, 0.0), ("1", "2"))
    assert states["1"].N == pytest.approx(0.5, abs=1e-14)


def test_mismatched_labels_rejected(symmetric_frame, reservoir):
    weights, rates = _weights(symmetric_frame, TWO_LEVEL_PARTITION)
    with pytest.raises(ValidationError):
        subsystem_state(symmetric_frame, weights, reservoir, ("2", "1"))
    with pytest.raises(ValidationError):
        subsystem_rates(symmetric_frame, weights, {"1": rates["1"]}, reservoir)


def test_ldos_integrates_to_site_count(symmetric_frame):
    pi = projector(TWO_LEVEL_PARTITION, "1", 2)
    sigma = 0.05
    grid = ldos_energy_grid(symmetric_frame, sigma)
    values = ldos(symmetric_frame, pi, grid, sigma)
    assert trapezoid(values, grid) == pytest.approx(1.0, abs=1e-8)
    assert values[np.argmin(np.abs(grid + 1.0))] == pytest.approx(0.5 / (sigma * np.sqrt(2 * np.pi)), rel=1e-3)


def test_ldos_validation(symmetric_frame):
    pi = np.diag([1.0, 0.0])
    with pytest.raises(ValidationError):
        ldos(symmetric_frame, pi, np.linspace(-1, 1, 5), 0.0)
    with pytest.raises(ValidationError):
        ldos(symmetric_frame, pi, np.array([1.0, 0.0]), 0.1)
    with pytest.raises(ValidationError):
        ldos_energy_grid(symmetric_frame, -0.1)
