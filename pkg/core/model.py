"""
MODEL - Keluarga Hamiltonian satu-partikel, protokol driving, dan partisi subsistem
"""

from dataclasses import dataclass, field, replace
from numbers import Real

import numpy as np

from core.errors import ConfigurationError, ValidationError


def _is_number(expr):
    return isinstance(expr, Real) and not isinstance(expr, bool)


@dataclass(frozen=True)
class ModelSpec:
    """Sites, onsite expressions and real bonds of a tight-binding family.

    An expression is either a real number or the name of a protocol
    parameter. Sites without an onsite entry sit at zero energy.
    """

    sites: tuple
    onsite: dict = field(default_factory=dict)
    bonds: tuple = ()

    def __post_init__(self):
        sites = tuple(self.sites)
        if not sites:
            raise ConfigurationError("model needs at least one site")
        if len(set(sites)) != len(sites):
            raise ConfigurationError(f"duplicate site labels in {sites}")

        onsite = dict(self.onsite)
        unknown = [site for site in onsite if site not in sites]
        if unknown:
            raise ConfigurationError(f"onsite entries for unknown sites: {unknown}")

        bonds = []
        for bond in self.bonds:
            if len(bond) != 3:
                raise ConfigurationError(f"bond must be (site_a, site_b, amplitude): {bond!r}")
            site_a, site_b, amplitude = bond
            if site_a not in sites or site_b not in sites:
                raise ConfigurationError(f"bond {bond!r} references an unknown site")
            if site_a == site_b:
                raise ConfigurationError(f"bond {bond!r} connects a site to itself")
            bonds.append((site_a, site_b, amplitude))

        for expr in list(onsite.values()) + [b[2] for b in bonds]:
            if not (_is_number(expr) or isinstance(expr, str)):
                raise ConfigurationError(f"expression must be a real number or a parameter name: {expr!r}")

        object.__setattr__(self, 'sites', sites)
        object.__setattr__(self, 'onsite', onsite)
        object.__setattr__(self, 'bonds', tuple(bonds))

    @property
    def n(self):
        return len(self.sites)

    @property
    def parameter_names(self):
        """Names referenced by onsite energies and bonds, in first-use order"""
        names = []
        for expr in list(self.onsite.values()) + [b[2] for b in self.bonds]:
            if isinstance(expr, str) and expr not in names:
                names.append(expr)
        return tuple(names)

    def index(self, site):
        return self.sites.index(site)


@dataclass(frozen=True)
class Protocol:
    """Piecewise-linear path s -> params(s) through ordered waypoints.

    waypoints: sequence of (s, {name: value}); s strictly increasing from 0
    to 1 and every waypoint carries the same parameter names.
    """

    waypoints: tuple

    def __post_init__(self):
        waypoints = tuple((float(s), dict(params)) for s, params in self.waypoints)
        if len(waypoints) < 2:
            raise ValidationError("protocol needs at least two waypoints")

        s_values = np.array([s for s, _ in waypoints])
        if s_values[0] != 0.0 or s_values[-1] != 1.0:
            raise ValidationError(f"protocol must start at s=0 and end at s=1, got {s_values[0]}..{s_values[-1]}")
        if np.any(np.diff(s_values) <= 0):
            raise ValidationError(f"waypoint s-values must strictly increase: {s_values.tolist()}")

        names = set(waypoints[0][1])
        for s, params in waypoints:
            if set(params) != names:
                raise ValidationError(f"waypoint s={s} has parameters {sorted(params)}, expected {sorted(names)}")
            for name, value in params.items():
                if not _is_number(value) or not np.isfinite(value):
                    raise ValidationError(f"parameter {name} at s={s} is not a finite real: {value!r}")

        object.__setattr__(self, 'waypoints', waypoints)

    @classmethod
    def linear(cls, start, end):
        """Single segment from start params to end params"""
        return cls(((0.0, start), (1.0, end)))

    @property
    def breakpoints(self):
        return np.array([s for s, _ in self.waypoints])

    @property
    def names(self):
        return tuple(self.waypoints[0][1])

    @property
    def driven(self):
        """Parameters whose value changes somewhere along the path"""
        return frozenset(
            name for name in self.names
            if len({params[name] for _, params in self.waypoints}) > 1
        )

    def _values(self, name):
        return np.array([params[name] for _, params in self.waypoints], dtype=float)

    def _segment(self, s):
        # right-derivative at interior breakpoints, left-derivative at s=1
        index = np.searchsorted(self.breakpoints, s, side='right') - 1
        return np.clip(index, 0, len(self.waypoints) - 2)

    def params(self, s):
        """Parameter values at s (scalar or array)"""
        s = self._check_s(s)
        return {name: np.interp(s, self.breakpoints, self._values(name)) for name in self.names}

    def slopes(self, s, segment=None):
        """Exact d params / ds at s; segment picks the one-sided slope at a breakpoint"""
        s = self._check_s(s)
        if segment is None:
            segment = self._segment(s)
        else:
            segment = np.broadcast_to(np.asarray(segment, dtype=int), s.shape)
            if np.any((segment < 0) | (segment > len(self.waypoints) - 2)):
                raise ValidationError(f"segment index outside 0..{len(self.waypoints) - 2}")
            bounds = self.breakpoints
            if np.any((s < bounds[segment]) | (s > bounds[segment + 1])):
                raise ValidationError("path parameter lies outside its segment")
        breakpoints = self.breakpoints
        widths = np.diff(breakpoints)
        return {
            name: (np.diff(self._values(name)) / widths)[segment]
            for name in self.names
        }

    def endpoints(self):
        return dict(self.waypoints[0][1]), dict(self.waypoints[-1][1])

    def with_parameter(self, name, value):
        """Copy with a constant parameter set to value in every waypoint"""
        if name not in self.names:
            raise ConfigurationError(f"protocol has no parameter '{name}'")
        if name in self.driven:
            raise ConfigurationError(f"parameter '{name}' is driven and cannot be swept as a constant")
        return replace(self, waypoints=tuple(
            (s, {**params, name: float(value)}) for s, params in self.waypoints
        ))

    @staticmethod
    def _check_s(s):
        s = np.asarray(s, dtype=float)
        if np.any((s < 0.0) | (s > 1.0)) or not np.all(np.isfinite(s)):
            raise ValidationError(f"path parameter outside [0, 1]: {s}")
        return s


@dataclass(frozen=True)
class Partition:
    """Assignment of every site to exactly one subsystem label"""

    assignment: dict
    labels: tuple
    drive: object = None

    def __post_init__(self):
        assignment = dict(self.assignment)
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"duplicate subsystem labels in {labels}")
        stray = sorted({str(label) for label in assignment.values() if label not in labels})
        if stray:
            raise ConfigurationError(f"assignment uses undeclared labels: {stray}")
        unused = [label for label in labels if label not in assignment.values()]
        if unused:
            raise ConfigurationError(f"labels with no sites: {unused}")
        if self.drive is not None and self.drive not in labels:
            raise ConfigurationError(f"drive label '{self.drive}' is not a subsystem label")
        object.__setattr__(self, 'assignment', assignment)
        object.__setattr__(self, 'labels', labels)

    @property
    def sites(self):
        return tuple(self.assignment)

    def aligned(self, spec):
        """Reorder the assignment to the model's site order"""
        if set(self.assignment) != set(spec.sites):
            missing = [site for site in spec.sites if site not in self.assignment]
            extra = [site for site in self.assignment if site not in spec.sites]
            raise ConfigurationError(f"partition does not cover the model sites (missing {missing}, unknown {extra})")
        return replace(self, assignment={site: self.assignment[site] for site in spec.sites})


@dataclass(frozen=True)
class Reservoir:
    temperature: float
    chemical_potential: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.temperature) or self.temperature <= 0:
            raise ValidationError(f"temperature must be positive and finite, got {self.temperature}")
        if not np.isfinite(self.chemical_potential):
            raise ValidationError(f"chemical potential must be finite, got {self.chemical_potential}")

    @property
    def beta(self):
        return 1.0 / self.temperature

    @property
    def mu(self):
        return self.chemical_potential


def _assemble(spec, resolve):
    """Fill an (..., n, n) complex matrix from resolved expressions"""
    onsite = {site: resolve(expr) for site, expr in spec.onsite.items()}
    bonds = [(spec.index(a), spec.index(b), resolve(expr)) for a, b, expr in spec.bonds]
    batch = np.broadcast_shapes(*(np.shape(v) for v in onsite.values()),
                                *(np.shape(b[2]) for b in bonds), ())

    n = spec.n
    h = np.zeros(batch + (n, n), dtype=complex)
    for site, value in onsite.items():
        i = spec.index(site)
        h[..., i, i] += value
    for i, j, value in bonds:
        h[..., i, j] += value
        h[..., j, i] += np.conj(value)
    return h


def _resolver(params, constant_value):
    def resolve(expr):
        if isinstance(expr, str):
            if expr not in params:
                raise ConfigurationError(f"unresolved parameter '{expr}'")
            return np.asarray(params[expr], dtype=float)
        return constant_value(expr)
    return resolve


def build_hamiltonian(spec, params):
    """h(params); params values may be arrays, giving a stacked (..., n, n) result"""
    return _assemble(spec, _resolver(params, float))


def build_drive_derivative(spec, protocol, s, segment=None):
    """Exact dh/ds along the protocol at s (scalar or array)"""
    missing = [name for name in spec.parameter_names if name not in protocol.names]
    if missing:
        raise ConfigurationError(f"unresolved parameter '{missing[0]}'")
    return _assemble(spec, _resolver(protocol.slopes(s, segment), lambda expr: 0.0))


def hamiltonian_along(spec, protocol, s):
    """h(params(s)) for scalar or array s"""
    return build_hamiltonian(spec, protocol.params(s))


def projector(partition, label, n):
    """Diagonal 0/1 projector onto the sites carrying label"""
    if label not in partition.labels:
        raise ConfigurationError(f"unknown subsystem label '{label}'")
    if n != len(partition.assignment):
        raise ConfigurationError(f"partition covers {len(partition.assignment)} sites, matrix has {n}")
    diagonal = np.array([1.0 if partition.assignment[site] == label else 0.0 for site in partition.sites])
    return np.diag(diagonal).astype(complex)


def projectors(partition, n):
    """All projectors stacked in label order, shape (L, n, n)"""
    return np.stack([projector(partition, label, n) for label in partition.labels])


def check_model(spec, protocol, partition=None):
    """Every parameter the model references must come from the protocol"""
    missing = [name for name in spec.parameter_names if name not in protocol.names]
    if missing:
        raise ConfigurationError(f"model references parameters missing from the protocol: {missing}")
    if partition is not None:
        partition.aligned(spec)
