"""
PRESETS - Model dan protokol siap pakai (dua-level, kisi 2x2, protokol 1/2, L-path, lever)
"""

import numpy as np

from config.experiment_config import ExperimentConfig, SweepSpec
from core.errors import ValidationError
from core.model import ModelSpec, Partition, Protocol, Reservoir

# Two sites coupled by w; subsystem "1" is site 1
TWO_LEVEL = ModelSpec(
    sites=("1", "2"),
    onsite={"1": "e1", "2": "e2"},
    bonds=(("1", "2", "w"),),
)
TWO_LEVEL_PARTITION = Partition(assignment={"1": "1", "2": "2"}, labels=("1", "2"), drive="1")

# 2x2 plaquette, ring bonds 1-2, 2-3, 3-4, 4-1; subsystem "1" is site 1, "2" the rest
LATTICE_2X2 = ModelSpec(
    sites=("1", "2", "3", "4"),
    onsite={"1": "e1", "2": "e2", "3": "e3", "4": "e4"},
    bonds=(("1", "2", "w"), ("2", "3", "w"), ("3", "4", "w"), ("4", "1", "w")),
)
LATTICE_PARTITION = Partition(
    assignment={"1": "1", "2": "2", "3": "2", "4": "2"}, labels=("1", "2"), drive="1",
)

LEVER_E1_RANGE = (5.0, 0.1)


def _grid_values(start, stop, step):
    count = int(round((stop - start) / step)) + 1
    return tuple(float(v) for v in np.round(np.linspace(start, stop, count), 12))


def protocol_1(e2=0.0, mu=0.0, temperature=0.2, grid=None):
    """Only e1 driven, -0.5 -> 0.5, at w = 1"""
    protocol = Protocol.linear({"e1": -0.5, "e2": e2, "w": 1.0}, {"e1": 0.5, "e2": e2, "w": 1.0})
    return ExperimentConfig(
        model=TWO_LEVEL, partition=TWO_LEVEL_PARTITION,
        reservoir=Reservoir(temperature, mu), protocols=(protocol,), grid=grid, name="protocol1",
    )


def protocol_1_e2_sweep(grid=None):
    """Protocol 1 with e2 swept over [-3, 3] in steps of 0.1"""
    config = protocol_1(grid=grid)
    return ExperimentConfig(
        model=config.model, partition=config.partition, reservoir=config.reservoir,
        protocols=config.protocols, grid=grid,
        sweep=SweepSpec("e2", _grid_values(-3.0, 3.0, 0.1)), name="protocol1-e2-sweep",
    )


def protocol_1_long(mu=0.0, temperature=0.2, grid=None):
    """e1 driven -1 -> 1 at e2 = 1, w = 1"""
    protocol = Protocol.linear({"e1": -1.0, "e2": 1.0, "w": 1.0}, {"e1": 1.0, "e2": 1.0, "w": 1.0})
    return ExperimentConfig(
        model=TWO_LEVEL, partition=TWO_LEVEL_PARTITION,
        reservoir=Reservoir(temperature, mu), protocols=(protocol,), grid=grid, name="protocol1-long",
    )


def protocol_1_long_mu_sweep(grid=None):
    config = protocol_1_long(grid=grid)
    return ExperimentConfig(
        model=config.model, partition=config.partition, reservoir=config.reservoir,
        protocols=config.protocols, grid=grid,
        sweep=SweepSpec("mu", _grid_values(-2.0, 2.0, 0.05)), name="protocol1-long-mu-sweep",
    )


def protocol_2(mu=0.0, temperature=0.2, grid=None):
    """e1: -1 -> 1 and w: 1 -> 0.1 together, e2 = 1"""
    protocol = Protocol.linear({"e1": -1.0, "e2": 1.0, "w": 1.0}, {"e1": 1.0, "e2": 1.0, "w": 0.1})
    return ExperimentConfig(
        model=TWO_LEVEL, partition=TWO_LEVEL_PARTITION,
        reservoir=Reservoir(temperature, mu), protocols=(protocol,), grid=grid, name="protocol2",
    )


def protocol_2_mu_sweep(grid=None):
    """Protocol 2 with mu on a 0.05 grid over [-2, 2]"""
    config = protocol_2(grid=grid)
    return ExperimentConfig(
        model=config.model, partition=config.partition, reservoir=config.reservoir,
        protocols=config.protocols, grid=grid,
        sweep=SweepSpec("mu", _grid_values(-2.0, 2.0, 0.05)), name="protocol2-mu-sweep",
    )


def l_paths(e1=(-1.0, 1.0), w=(0.4, 0.04), e2=1.0):
    """Path A moves e1 first then w, path B moves w first then e1"""
    path_a = Protocol((
        (0.0, {"e1": e1[0], "e2": e2, "w": w[0]}),
        (0.5, {"e1": e1[1], "e2": e2, "w": w[0]}),
        (1.0, {"e1": e1[1], "e2": e2, "w": w[1]}),
    ))
    path_b = Protocol((
        (0.0, {"e1": e1[0], "e2": e2, "w": w[0]}),
        (0.5, {"e1": e1[0], "e2": e2, "w": w[1]}),
        (1.0, {"e1": e1[1], "e2": e2, "w": w[1]}),
    ))
    return path_a, path_b


def path_dependence(mu=0.0, temperature=0.2, grid=None):
    return ExperimentConfig(
        model=TWO_LEVEL, partition=TWO_LEVEL_PARTITION,
        reservoir=Reservoir(temperature, mu), protocols=l_paths(), grid=grid, name="pathdep",
    )


def lever_two_level(e1_range=LEVER_E1_RANGE, grid=None):
    """T = 1e-4, mu = 0, w = 1, e2 = -10, e1 swept toward mu from above"""
    protocol = Protocol.linear(
        {"e1": e1_range[0], "e2": -10.0, "w": 1.0}, {"e1": e1_range[1], "e2": -10.0, "w": 1.0},
    )
    return ExperimentConfig(
        model=TWO_LEVEL, partition=TWO_LEVEL_PARTITION,
        reservoir=Reservoir(1e-4, 0.0), protocols=(protocol,), grid=grid, name="lever-two-level",
    )


def lever_lattice(e1_range=LEVER_E1_RANGE, grid=None):
    """2x2 plaquette lever: e = (e1, -10, -2, -10), w = 1"""
    constants = {"e2": -10.0, "e3": -2.0, "e4": -10.0, "w": 1.0}
    protocol = Protocol.linear({"e1": e1_range[0], **constants}, {"e1": e1_range[1], **constants})
    return ExperimentConfig(
        model=LATTICE_2X2, partition=LATTICE_PARTITION,
        reservoir=Reservoir(1e-4, 0.0), protocols=(protocol,), grid=grid, name="lever-lattice",
    )


PRESETS = {
    "protocol1": protocol_1,
    "protocol1-e2-sweep": protocol_1_e2_sweep,
    "protocol1-long": protocol_1_long,
    "protocol1-long-mu-sweep": protocol_1_long_mu_sweep,
    "protocol2": protocol_2,
    "protocol2-mu-sweep": protocol_2_mu_sweep,
    "pathdep": path_dependence,
    "lever-two-level": lever_two_level,
    "lever-lattice": lever_lattice,
}


def get_preset(name, grid=None):
    """ExperimentConfig for a named preset"""
    if name not in PRESETS:
        raise ValidationError(f"unknown preset '{name}', choose from {sorted(PRESETS)}")
    return PRESETS[name](grid=grid)
