import numpy as np
import pytest
from numpy.testing import assert_allclose

from analytical.fock_oracle import random_hermitian
from config.presets import TWO_LEVEL_PARTITION
from core.errors import ValidationError
from core.model import Partition, Reservoir, projector
from core.spectral import frame_from_matrices, prob_rates
from core.work import (commutator_flow, mechanical_advantage, nonlocal_work_rate, partitioned_power,
                       perturbative_eta, perturbative_eta_multi, work_record)

FOUR_SITES = Partition(assignment={"a": "A", "b": "B", "c": "B", "d": "C"}, labels=("A", "B", "C"))


def test_symmetric_two_level_point(symmetric_frame, reservoir):
    record = work_record(symmetric_frame, TWO_LEVEL_PARTITION, reservoir)
    assert record.W_ext_rate == pytest.approx(0.5, abs=1e-14)
    assert record.work_rate["1"] == pytest.approx(0.5, abs=1e-12)
    assert record.partitioned_power["1"] == pytest.approx(0.5, abs=1e-14)
    assert record.nonlocal_rate["1"] == pytest.approx(0.0, abs=1e-12)
    assert record.work_rate["2"] == pytest.approx(0.0, abs=1e-12)
    assert mechanical_advantage(record, "1") == pytest.approx(1.0, abs=1e-12)


def test_sum_rule_and_nonlocal_conservation(random_frame):
    reservoir = Reservoir(0.3, 0.2)
    for _ in range(5):
        frame = random_frame(4)
        record = work_record(frame, FOUR_SITES, reservoir)
        assert abs(record.sum_rule_residual) < 1e-11 * record.scale
        assert abs(sum(record.nonlocal_rate.values())) < 1e-11 * record.scale
        for label in FOUR_SITES.labels:
            assert record.work_rate[label] == pytest.approx(
                record.partitioned_power[label] + record.nonlocal_rate[label], abs=1e-11 * record.scale)


def test_standalone_rates_agree_with_record(random_frame):
    reservoir = Reservoir(0.5, 0.0)
    frame = random_frame(4)
    record = work_record(frame, FOUR_SITES, reservoir)
    for label in FOUR_SITES.labels:
        pi = projector(FOUR_SITES, label, 4)
        assert partitioned_power(frame, pi, reservoir) == pytest.approx(record.partitioned_power[label], abs=1e-14)
        assert nonlocal_work_rate(frame, prob_rates(frame, pi), pi, reservoir) == pytest.approx(
            record.nonlocal_rate[label], abs=1e-14)


def test_batched_record(rng):
    h = np.stack([random_hermitian(rng, 3) for _ in range(4)])
    hdot = np.stack([random_hermitian(rng, 3) for _ in range(4)])
    frame = frame_from_matrices(np.linspace(0.0, 1.0, 4), h, hdot)
    partition = Partition(assignment={"x": "A", "y": "B", "z": "B"}, labels=("A", "B"))
    record = work_record(frame, partition, Reservoir(0.2, 0.0))
    assert record.W_ext_rate.shape == (4,)
    for k in range(4):
        single = work_record(frame.at(k), partition, Reservoir(0.2, 0.0))
        assert single.work_rate["A"] == pytest.approx(record.work_rate["A"][k], abs=1e-13)


def test_eta_undefined_without_drive(reservoir):
    frame = frame_from_matrices(0.0, [[0.0, 1.0], [1.0, 0.0]], np.zeros((2, 2)))
    record = work_record(frame, TWO_LEVEL_PARTITION, reservoir)
    assert np.isnan(mechanical_advantage(record, "1"))
    with pytest.raises(ValidationError):
        mechanical_advantage(record, "3")


def test_commutator_flow_vanishes_in_equilibrium(random_frame):
    reservoir = Reservoir(0.4, 0.1)
    frame = random_frame(4)
    for label in FOUR_SITES.labels:
        assert commutator_flow(frame, FOUR_SITES, label, reservoir) == pytest.approx(0.0, abs=1e-12)


def test_perturbative_levers():
    assert perturbative_eta(0.1, -10.0, 0.0) == pytest.approx(20.0 / 10.1)
    assert perturbative_eta(5.0, -10.0, 0.0) == pytest.approx(4.0 / 3.0)
    assert perturbative_eta_multi(-10.0, 10.1, 0.0) == pytest.approx(20.0 / 10.1)
    with pytest.raises(ValidationError):
        perturbative_eta(1.0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        perturbative_eta_multi(-1.0, 0.0, 0.0)


def test_eta_follows_perturbative_estimate_far_from_mu():
    reservoir = Reservoir(1e-4, 0.0)
    e1, e2 = 10.0, -10.0
    frame = frame_from_matrices(0.0, [[e1, 1.0], [1.0, e2]], [[1.0, 0.0], [0.0, 0.0]])
    record = work_record(frame, TWO_LEVEL_PARTITION, reservoir)
    assert mechanical_advantage(record, "1") == pytest.approx(perturbative_eta(e1, e2, 0.0), abs=2e-3)


@pytest.mark.parametrize("factor", [0.5, 2.0, 4.0])
def test_eta_ignores_drive_speed_exactly(random_frame, factor):
    reservoir = Reservoir(0.3, 0.1)
    frame = random_frame(4)
    eta = mechanical_advantage(work_record(frame, FOUR_SITES, reservoir), "A")
    scaled = mechanical_advantage(work_record(frame.scaled_drive(factor), FOUR_SITES, reservoir), "A")
    assert scaled == eta


@pytest.mark.parametrize("factor", [10.0, -3.0, 1e-3])
def test_eta_ignores_drive_speed(random_frame, factor):
    reservoir = Reservoir(0.3, 0.1)
    frame = random_frame(3)
    partition = Partition(assignment={"x": "A", "y": "B", "z": "B"}, labels=("A", "B"))
    record = work_record(frame, partition, reservoir)
    scaled = work_record(frame.scaled_drive(factor), partition, reservoir)
    assert_allclose(scaled.W_ext_rate, factor * record.W_ext_rate, rtol=1e-12)
    assert mechanical_advantage(scaled, "B") == pytest.approx(mechanical_advantage(record, "B"), rel=1e-12)


def test_commutator_flow_vanishes_on_seeded_models():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.choice([2, 3, 4]))
        h = random_hermitian(rng, n)
        frame = frame_from_matrices(0.0, h, random_hermitian(rng, n))
        partition = Partition(assignment={str(i): ("A" if i < n // 2 else "B") for i in range(n)},
                              labels=("A", "B"))
        reservoir = Reservoir(float(rng.uniform(0.05, 2.0)), float(rng.uniform(-1.0, 1.0)))
        scale = max(1.0, np.max(np.abs(h))) ** 2
        for label in partition.labels:
            assert abs(commutator_flow(frame, partition, label, reservoir)) <= 1e-12 * scale
