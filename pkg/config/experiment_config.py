"""
EXPERIMENT CONFIG - Dokumen JSON eksperimen -> ExperimentConfig tervalidasi
"""

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from config.settings import default_grid
from core.errors import ConfigurationError, ValidationError
from core.model import ModelSpec, Partition, Protocol, Reservoir, check_model
from core.quadrature import check_grid
from security.logger import get_logger

logger = get_logger(__name__)

TOP_LEVEL_KEYS = ("model", "partition", "reservoir", "protocol", "grid", "sweep", "outputs", "seed")
REQUIRED_KEYS = ("model", "partition", "reservoir", "protocol")

PER_LABEL_QUANTITIES = (
    "U", "S", "N", "Omega", "U_rate", "TS_rate", "N_rate", "W_rate",
    "power_part", "nonlocal_rate", "first_law_residual",
)

RESERVOIR_SWEEPS = {"mu": "chemical_potential", "temperature": "temperature"}


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple

    @property
    def targets_reservoir(self):
        return self.parameter in RESERVOIR_SWEEPS


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    partition: Partition
    reservoir: Reservoir
    protocols: tuple
    grid: int = None
    sweep: SweepSpec = None
    outputs: tuple = PER_LABEL_QUANTITIES
    seed: int = 0
    name: str = "custom"

    def __post_init__(self):
        if len(self.protocols) not in (1, 2):
            raise ValidationError("an experiment takes one protocol, or two for a path comparison")
        for protocol in self.protocols:
            check_model(self.model, protocol, self.partition)
        object.__setattr__(self, 'partition', self.partition.aligned(self.model))
        if self.grid is not None:
            object.__setattr__(self, 'grid', check_grid(self.grid))
        unknown = [q for q in self.outputs if q not in PER_LABEL_QUANTITIES]
        if unknown:
            raise ValidationError(f"unknown output quantities: {unknown}")
        if self.sweep is not None:
            _check_sweep(self.sweep, self.protocols)

    @property
    def protocol(self):
        return self.protocols[0]

    @property
    def effective_grid(self):
        return self.grid if self.grid is not None else default_grid(self.reservoir.temperature)

    @property
    def drive_label(self):
        """Label used for eta: the partition's drive label, else the first label"""
        return self.partition.drive if self.partition.drive is not None else self.partition.labels[0]

    def with_grid(self, grid):
        return replace(self, grid=grid)

    def with_protocol(self, protocol):
        return replace(self, protocols=(protocol,))

    def at_sweep_value(self, value, parameter=None):
        """Copy with one sweep value applied and the sweep removed"""
        parameter = parameter or self.sweep.parameter
        if parameter in RESERVOIR_SWEEPS:
            reservoir = replace(self.reservoir, **{RESERVOIR_SWEEPS[parameter]: float(value)})
            return replace(self, reservoir=reservoir, sweep=None)
        protocols = tuple(p.with_parameter(parameter, value) for p in self.protocols)
        return replace(self, protocols=protocols, sweep=None)


def _check_sweep(sweep, protocols):
    values = np.asarray(sweep.values, dtype=float)
    if values.ndim != 1 or len(values) == 0 or not np.all(np.isfinite(values)):
        raise ValidationError("sweep values must be a non-empty list of finite numbers")
    if sweep.parameter in RESERVOIR_SWEEPS:
        if sweep.parameter == "temperature" and np.any(values <= 0):
            raise ValidationError("temperature sweep values must be positive")
        return
    for protocol in protocols:
        if sweep.parameter not in protocol.names:
            raise ConfigurationError(f"sweep parameter '{sweep.parameter}' is not a protocol parameter")
        if sweep.parameter in protocol.driven:
            raise ConfigurationError(f"sweep parameter '{sweep.parameter}' is driven by the protocol")


def _strict(document, allowed, where, required=()):
    if not isinstance(document, dict):
        raise ValidationError(f"{where} must be a JSON object")
    unknown = [key for key in document if key not in allowed]
    if unknown:
        raise ValidationError(f"unknown key(s) in {where}: {unknown}")
    missing = [key for key in required if key not in document]
    if missing:
        raise ValidationError(f"missing key(s) in {where}: {missing}")
    return document


def _expression(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ValidationError(f"{where} must be a number or a parameter name, got {value!r}")
    return float(value) if not isinstance(value, str) else value


def parse_model(document):
    _strict(document, ("sites", "onsite", "bonds"), "model", required=("sites",))
    sites = [str(site) for site in document["sites"]]
    onsite = {str(site): _expression(value, f"onsite[{site}]")
              for site, value in document.get("onsite", {}).items()}
    bonds = []
    for bond in document.get("bonds", []):
        if not isinstance(bond, list) or len(bond) != 3:
            raise ValidationError(f"bond must be [site_a, site_b, amplitude], got {bond!r}")
        bonds.append((str(bond[0]), str(bond[1]), _expression(bond[2], f"bond {bond!r}")))
    return ModelSpec(sites=tuple(sites), onsite=onsite, bonds=tuple(bonds))


def parse_partition(document):
    _strict(document, ("assignment", "labels", "drive"), "partition", required=("assignment", "labels"))
    assignment = {str(site): str(label) for site, label in document["assignment"].items()}
    labels = tuple(str(label) for label in document["labels"])
    drive = document.get("drive")
    return Partition(assignment=assignment, labels=labels, drive=None if drive is None else str(drive))


def parse_reservoir(document):
    _strict(document, ("temperature", "chemical_potential"), "reservoir", required=("temperature",))
    try:
        return Reservoir(temperature=float(document["temperature"]),
                         chemical_potential=float(document.get("chemical_potential", 0.0)))
    except (TypeError, ValueError) as e:
        raise ValidationError(f"reservoir values must be numbers: {e}") from e


def parse_protocol(document):
    _strict(document, ("waypoints",), "protocol", required=("waypoints",))
    waypoints = []
    for index, waypoint in enumerate(document["waypoints"]):
        _strict(waypoint, ("s", "params"), f"protocol waypoint {index}", required=("s", "params"))
        if isinstance(waypoint["s"], bool) or not isinstance(waypoint["s"], (int, float)):
            raise ValidationError(f"waypoint {index} s must be a number")
        if not isinstance(waypoint["params"], dict):
            raise ValidationError(f"waypoint {index} params must be an object")
        params = {}
        for name, value in waypoint["params"].items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"waypoint {index} parameter '{name}' must be a number")
            params[str(name)] = float(value)
        waypoints.append((waypoint["s"], params))
    return Protocol(tuple(waypoints))


def parse_sweep(document):
    if document is None:
        return None
    _strict(document, ("parameter", "values"), "sweep", required=("parameter", "values"))
    values = document["values"]
    if not isinstance(values, list) or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in values):
        raise ValidationError("sweep values must be a list of numbers")
    return SweepSpec(parameter=str(document["parameter"]), values=tuple(float(v) for v in values))


def parse_config(document, name="custom"):
    """Validated ExperimentConfig from an already-decoded JSON document"""
    _strict(document, TOP_LEVEL_KEYS, "config", required=REQUIRED_KEYS)

    protocol_doc = document["protocol"]
    if isinstance(protocol_doc, list):
        if len(protocol_doc) != 2:
            raise ValidationError("a protocol list must hold exactly two protocols")
        protocols = tuple(parse_protocol(p) for p in protocol_doc)
    else:
        protocols = (parse_protocol(protocol_doc),)

    grid = document.get("grid")
    if grid is not None and (isinstance(grid, bool) or not isinstance(grid, int)):
        raise ValidationError(f"grid must be an integer, got {grid!r}")
    seed = document.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ValidationError(f"seed must be an integer, got {seed!r}")
    outputs = document.get("outputs") or PER_LABEL_QUANTITIES
    if not isinstance(outputs, list) and outputs is not PER_LABEL_QUANTITIES:
        raise ValidationError("outputs must be a list of quantity names")

    return ExperimentConfig(
        model=parse_model(document["model"]),
        partition=parse_partition(document["partition"]),
        reservoir=parse_reservoir(document["reservoir"]),
        protocols=protocols,
        grid=grid,
        sweep=parse_sweep(document.get("sweep")),
        outputs=tuple(outputs),
        seed=seed,
        name=name,
    )


def load_config(path):
    """Read and validate a UTF-8 JSON experiment file"""
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ValidationError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ValidationError(f"config {path} is not valid JSON: {e}") from e
    config = parse_config(document, name=path.stem)
    logger.info(f"✅ Config loaded: {path} ({config.model.n} sites, labels {list(config.partition.labels)})")
    return config
