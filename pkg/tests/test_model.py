import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from config.presets import LATTICE_2X2, TWO_LEVEL, TWO_LEVEL_PARTITION
from core.errors import ConfigurationError, ValidationError
from core.model import (ModelSpec, Partition, Protocol, Reservoir, build_drive_derivative, build_hamiltonian,
                        check_model, hamiltonian_along, projector, projectors)


def test_two_level_hamiltonian():
    h = build_hamiltonian(TWO_LEVEL, {"e1": -1.0, "e2": 1.0, "w": 0.5})
    assert_allclose(h, [[-1.0, 0.5], [0.5, 1.0]])


def test_hamiltonian_batches_over_array_parameters():
    e1 = np.array([-1.0, 0.0, 1.0])
    h = build_hamiltonian(TWO_LEVEL, {"e1": e1, "e2": 2.0, "w": 1.0})
    assert h.shape == (3, 2, 2)
    assert_allclose(h[:, 0, 0].real, e1)
    assert_allclose(h[:, 1, 1].real, 2.0)


def test_lattice_ring_bonds():
    params = {"e1": 0.0, "e2": 0.0, "e3": 0.0, "e4": 0.0, "w": 1.0}
    h = build_hamiltonian(LATTICE_2X2, params).real
    assert_array_equal(h, [[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]])


def test_constant_expressions_and_missing_onsite():
    spec = ModelSpec(sites=("a", "b", "c"), onsite={"a": 0.25}, bonds=(("a", "c", "t"),))
    h = build_hamiltonian(spec, {"t": -0.5})
    assert_allclose(h.real, [[0.25, 0, -0.5], [0, 0, 0], [-0.5, 0, 0]])


@pytest.mark.parametrize("kwargs", [
    {"sites": ()},
    {"sites": ("a", "a")},
    {"sites": ("a",), "onsite": {"b": 1.0}},
    {"sites": ("a", "b"), "bonds": (("a", "a", 1.0),)},
    {"sites": ("a", "b"), "bonds": (("a", "z", 1.0),)},
    {"sites": ("a",), "onsite": {"a": [1.0]}},
])
def test_bad_models_rejected(kwargs):
    with pytest.raises(ConfigurationError):
        ModelSpec(**kwargs)


def test_protocol_interpolation_and_slopes():
    protocol = Protocol(((0.0, {"x": 0.0, "y": 1.0}), (0.5, {"x": 1.0, "y": 1.0}), (1.0, {"x": 1.0, "y": 0.0})))
    params = protocol.params(np.array([0.0, 0.25, 0.5, 0.75, 1.0]))
    assert_allclose(params["x"], [0.0, 0.5, 1.0, 1.0, 1.0])
    assert_allclose(params["y"], [1.0, 1.0, 1.0, 0.5, 0.0])

    slopes = protocol.slopes(np.array([0.0, 0.5, 1.0]))
    # right-derivative at the interior breakpoint, left-derivative at s = 1
    assert_allclose(slopes["x"], [2.0, 0.0, 0.0])
    assert_allclose(slopes["y"], [0.0, -2.0, -2.0])
    assert protocol.driven == {"x", "y"}
    assert_array_equal(protocol.breakpoints, [0.0, 0.5, 1.0])

    left = protocol.slopes(np.array([0.5, 0.5]), segment=[0, 1])
    assert_allclose(left["x"], [2.0, 0.0])
    assert_allclose(left["y"], [0.0, -2.0])
    with pytest.raises(ValidationError):
        protocol.slopes(0.75, segment=0)
    with pytest.raises(ValidationError):
        protocol.slopes(0.5, segment=2)


@pytest.mark.parametrize("waypoints", [
    ((0.0, {"x": 0.0}),),
    ((0.1, {"x": 0.0}), (1.0, {"x": 1.0})),
    ((0.0, {"x": 0.0}), (0.5, {"x": 0.0}), (0.5, {"x": 1.0}), (1.0, {"x": 1.0})),
    ((0.0, {"x": 0.0}), (1.0, {"y": 1.0})),
    ((0.0, {"x": float("nan")}), (1.0, {"x": 1.0})),
])
def test_bad_protocols_rejected(waypoints):
    with pytest.raises(ValidationError):
        Protocol(waypoints)


def test_params_outside_path_rejected():
    protocol = Protocol.linear({"x": 0.0}, {"x": 1.0})
    with pytest.raises(ValidationError):
        protocol.params(1.5)


def test_with_parameter_only_touches_constants():
    protocol = Protocol.linear({"e1": -1.0, "e2": 0.0, "w": 1.0}, {"e1": 1.0, "e2": 0.0, "w": 1.0})
    moved = protocol.with_parameter("e2", 2.0)
    assert all(params["e2"] == 2.0 for _, params in moved.waypoints)
    with pytest.raises(ConfigurationError):
        protocol.with_parameter("e1", 0.0)
    with pytest.raises(ConfigurationError):
        protocol.with_parameter("nope", 0.0)


def test_drive_derivative_is_exact():
    protocol = Protocol.linear({"e1": -1.0, "e2": 1.0, "w": 1.0}, {"e1": 1.0, "e2": 1.0, "w": 0.1})
    hdot = build_drive_derivative(TWO_LEVEL, protocol, 0.3)
    assert_allclose(hdot.real, [[2.0, -0.9], [-0.9, 0.0]])
    step = 1e-6
    fd = (hamiltonian_along(TWO_LEVEL, protocol, 0.3 + step)
          - hamiltonian_along(TWO_LEVEL, protocol, 0.3 - step)) / (2 * step)
    assert_allclose(hdot, fd, atol=1e-8)


def test_check_model_needs_every_parameter():
    protocol = Protocol.linear({"e1": 0.0, "w": 1.0}, {"e1": 1.0, "w": 1.0})
    with pytest.raises(ConfigurationError):
        check_model(TWO_LEVEL, protocol)


def test_projectors_resolve_identity():
    partition = Partition(assignment={"2": "B", "1": "A", "3": "B"}, labels=("A", "B"))
    spec = ModelSpec(sites=("1", "2", "3"))
    aligned = partition.aligned(spec)
    assert aligned.sites == ("1", "2", "3")
    stacked = projectors(aligned, 3)
    assert_allclose(stacked.sum(axis=0), np.eye(3))
    assert_allclose(np.diag(projector(aligned, "A", 3)).real, [1, 0, 0])


@pytest.mark.parametrize("kwargs", [
    {"assignment": {"1": "A", "2": "A"}, "labels": ("A", "B")},
    {"assignment": {"1": "A", "2": "C"}, "labels": ("A", "B")},
    {"assignment": {"1": "A", "2": "B"}, "labels": ("A", "A", "B")},
    {"assignment": {"1": "A", "2": "B"}, "labels": ("A", "B"), "drive": "C"},
])
def test_bad_partitions_rejected(kwargs):
    with pytest.raises(ConfigurationError):
        Partition(**kwargs)


def test_partition_must_cover_model():
    with pytest.raises(ConfigurationError):
        Partition(assignment={"1": "A", "3": "B"}, labels=("A", "B")).aligned(TWO_LEVEL)
    with pytest.raises(ConfigurationError):
        projector(TWO_LEVEL_PARTITION, "3", 2)


@pytest.mark.parametrize("temperature", [0.0, -1.0, float("inf")])
def test_reservoir_needs_positive_temperature(temperature):
    with pytest.raises(ValidationError):
        Reservoir(temperature)
