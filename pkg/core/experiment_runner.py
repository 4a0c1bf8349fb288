"""
EXPERIMENT RUNNER - Integrasi protokol, sweep parameter, perbandingan jalur, dan lever scan
"""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from analytical.closed_forms import two_level_closed_form
from analytical.fock_oracle import fock_build, fock_expect, fock_global, grand_density, random_hermitian
from config.experiment_config import PER_LABEL_QUANTITIES
from config.settings import settings
from core.errors import ConsistencyError, ValidationError
from core.model import Partition, projector
from core.partition_thermo import ldos, ldos_energy_grid, subsystem_state
from core.quadrature import breakpoint_grid, richardson
from core.spectral import fd_check as spectral_fd_check
from core.spectral import frame_from_matrices, make_frame, partitioned_operator, prob_weights, spectral_path
from core.thermo import global_rates, global_state, rate_scale, thermal_factors
from core.work import mechanical_advantage, work_record
from security.logger import get_logger, subthermo_logger
from security.performance_monitor import PerformanceMonitor
from security.watchdog import InvariantWatchdog

logger = get_logger(__name__)

TOTAL_KEYS = ("W", "dU", "dS", "dN", "TdS", "power_part", "nonlocal")


@dataclass
class RunResult:
    name: str
    labels: tuple
    drive_label: object
    reservoir: object
    driven: tuple
    grid: int
    series: pd.DataFrame
    totals: dict
    errors: dict
    w_ext: float
    w_ext_error: float
    delta_omega: float
    endpoint_states: dict
    endpoint_deltas: dict
    quadrature_error: float
    warnings: list = field(default_factory=list)
    fd_report: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    @property
    def eta(self):
        return self.series["eta"].to_numpy()

    @property
    def endpoint_mismatch(self):
        """|integrated W_ext - (Omega(1) - Omega(0))|"""
        return abs(self.w_ext - self.delta_omega)


@dataclass
class LeverScan:
    parameter: str
    table: pd.DataFrame
    result: RunResult

    @property
    def max_eta(self):
        eta = self.table["eta"].to_numpy()
        return float(np.nanmax(eta)) if np.any(np.isfinite(eta)) else float("nan")

    @property
    def undefined_points(self):
        return int(np.count_nonzero(np.isnan(self.table["eta"].to_numpy())))


@dataclass
class PathComparison:
    results: tuple
    differences: dict
    tolerances: dict

    def table(self):
        rows = []
        first, second = self.results
        for label, diffs in self.differences.items():
            for key in ("W", "power_part", "nonlocal"):
                rows.append({
                    "label": label,
                    "quantity": key,
                    "path_A": first.totals[label][key],
                    "path_B": second.totals[label][key],
                    "difference": diffs[key],
                    "quadrature_error": first.errors[label][key] + second.errors[label][key],
                })
        return pd.DataFrame(rows, columns=["label", "quantity", "path_A", "path_B",
                                           "difference", "quadrature_error"])


def _evaluate(config, frame, reservoir, watchdog):
    """Pointwise thermodynamics of a stacked frame"""
    partition = config.partition
    factors = thermal_factors(frame, reservoir)
    weights = {label: prob_weights(frame, projector(partition, label, frame.n))
               for label in partition.labels}

    record = work_record(frame, partition, reservoir, watchdog)
    states = subsystem_state(frame, weights, reservoir, partition.labels, factors)
    total_state = global_state(frame.energies, reservoir)
    total_rates = global_rates(frame, reservoir, factors)
    scale = rate_scale(frame, reservoir)

    watchdog.check_first_law(record.rates, reservoir, frame.s, scale)
    watchdog.check_global(total_state, states, total_rates, record.rates, reservoir, frame.s, scale)
    return record, states, total_state


def _series(config, protocol, frame, record, states, reservoir, eta, take):
    """Per-s table in the fixed output column order"""
    columns = {"s": frame.s[take]}
    params = protocol.params(frame.s[take])
    for name in protocol.names:
        if name in protocol.driven:
            columns[name] = params[name]

    for label in config.partition.labels:
        rates = record.rates[label]
        block = {
            "U": states[label].U, "S": states[label].S, "N": states[label].N,
            "Omega": states[label].Omega,
            "U_rate": rates.U_rate, "TS_rate": rates.TS_rate, "N_rate": rates.N_rate,
            "W_rate": rates.Omega_rate,
            "power_part": record.partitioned_power[label],
            "nonlocal_rate": record.nonlocal_rate[label],
            "first_law_residual": (rates.U_rate - rates.TS_rate
                                   - reservoir.chemical_potential * rates.N_rate - rates.Omega_rate),
        }
        for quantity in PER_LABEL_QUANTITIES:
            if quantity in config.outputs:
                columns[f"{quantity}_{label}"] = np.asarray(block[quantity])[take]

    columns["W_ext_rate"] = record.W_ext_rate[take]
    columns["sum_rule_residual"] = record.sum_rule_residual[take]
    columns["eta"] = eta[take]
    return pd.DataFrame(columns)


def _integrate(quad_grid, named_values):
    """{name: (fine integral, Richardson error)} over the refined grid"""
    names = list(named_values)
    stacked = np.stack([np.asarray(named_values[name], dtype=float) for name in names])
    fine = quad_grid.integrate(stacked)
    coarse = quad_grid.coarsen().integrate(stacked[:, quad_grid.coarse_index])
    errors = richardson(fine, coarse)
    return {name: (float(fine[i]), float(errors[i])) for i, name in enumerate(names)}


def _fd_points(protocol, count, step):
    """Interior s values kept away from breakpoints"""
    breakpoints = protocol.breakpoints
    points = []
    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        for k in range(count):
            points.append(a + (b - a) * (k + 0.5) / count)
    return [s for s in points if np.min(np.abs(breakpoints - s)) > 2 * step]


def _quad_grid(config, protocol):
    return breakpoint_grid(protocol.breakpoints, config.effective_grid).refine()


def _result_from_frame(config, protocol, frame, quad_grid, reservoir):
    """Integrate a precomputed stacked frame at one reservoir"""
    watchdog = InvariantWatchdog()
    watchdog.check_frames(frame)
    record, states, total_state = _evaluate(config, frame, reservoir, watchdog)
    watchdog.raise_if_violated()

    labels = config.partition.labels
    drive = config.drive_label
    eta = mechanical_advantage(record, drive)

    integrands = {"W_ext": record.W_ext_rate}
    for label in labels:
        rates = record.rates[label]
        integrands.update({
            (label, "W"): rates.Omega_rate,
            (label, "dU"): rates.U_rate,
            (label, "dS"): rates.TS_rate / reservoir.temperature,
            (label, "dN"): rates.N_rate,
            (label, "TdS"): rates.TS_rate,
            (label, "power_part"): record.partitioned_power[label],
            (label, "nonlocal"): record.nonlocal_rate[label],
        })
    integrals = _integrate(quad_grid, integrands)

    totals = {label: {key: integrals[(label, key)][0] for key in TOTAL_KEYS} for label in labels}
    errors = {label: {key: integrals[(label, key)][1] for key in TOTAL_KEYS} for label in labels}
    w_ext, w_ext_error = integrals["W_ext"]

    def endpoint(k):
        snapshot = {label: {q: float(np.asarray(getattr(states[label], q))[k])
                            for q in ("U", "S", "N", "Omega")} for label in labels}
        snapshot["global"] = {q: float(np.asarray(getattr(total_state, q))[k])
                              for q in ("U", "S", "N", "Omega")}
        return snapshot

    start, end = endpoint(0), endpoint(-1)
    endpoint_deltas = {
        key: {q: end[key][q] - start[key][q] for q in ("U", "S", "N", "Omega")}
        for key in list(labels) + ["global"]
    }
    delta_omega = endpoint_deltas["global"]["Omega"]

    warnings = list(frame.warnings)
    tolerance = max(4.0 * w_ext_error, 1e-9 * max(1.0, abs(delta_omega)))
    if abs(w_ext - delta_omega) > tolerance:
        warnings.append(f"integrated W_ext {w_ext:.12g} differs from endpoint dOmega "
                        f"{delta_omega:.12g} by more than {tolerance:.3e}")
    take = quad_grid.report_index  # requested grid, one row per distinct s
    undefined = int(np.count_nonzero(np.isnan(eta[take])))
    if undefined:
        warnings.append(f"eta undefined at {undefined} grid point(s) where W_ext_rate ~ 0")

    return RunResult(
        name=config.name,
        labels=labels,
        drive_label=drive,
        reservoir=reservoir,
        driven=tuple(name for name in protocol.names if name in protocol.driven),
        grid=config.effective_grid,
        series=_series(config, protocol, frame, record, states, reservoir, eta, take),
        totals=totals,
        errors=errors,
        w_ext=w_ext,
        w_ext_error=w_ext_error,
        delta_omega=delta_omega,
        endpoint_states={"start": start, "end": end},
        endpoint_deltas=endpoint_deltas,
        quadrature_error=max([w_ext_error] + [e for label in labels for e in errors[label].values()]),
        warnings=warnings,
    )


def run_protocol(config, fd_check=False, protocol_index=0):
    """Evaluate, check and integrate one protocol of the config"""
    protocol = config.protocols[protocol_index]
    monitor = PerformanceMonitor()
    monitor.start(config.name)

    quad_grid = _quad_grid(config, protocol)
    logger.info(f"🚀 Running '{config.name}' on grid {config.effective_grid} "
                f"({len(quad_grid.s)} evaluation points, T={config.reservoir.temperature}, "
                f"mu={config.reservoir.chemical_potential})")
    frame = spectral_path(config.model, protocol, quad_grid.s, quad_grid.segment_index)
    result = _result_from_frame(config, protocol, frame, quad_grid, config.reservoir)

    if fd_check:
        step = settings.FD_CHECK_STEP
        for s in _fd_points(protocol, settings.FD_CHECK_POINTS, step):
            report = spectral_fd_check(config.model, protocol, s, config.partition, step)
            result.fd_report.append(report)
            if max(report['energy_rate_error'], report['prob_rate_error']) > 1e-6:
                result.warnings.append(f"finite-difference check off at s={s:.6f}: {report}")

    result.metrics = monitor.stop(frames=len(quad_grid.s))
    subthermo_logger.log_run_summary(result)
    return result


def run_lever_scan(config):
    """eta against the single driven parameter"""
    protocol = config.protocol
    driven = [name for name in protocol.names if name in protocol.driven]
    if len(driven) != 1:
        raise ValidationError(f"a lever scan needs exactly one driven parameter, got {driven}")
    parameter = driven[0]

    result = run_protocol(config)
    series = result.series
    drive = result.drive_label
    table = pd.DataFrame({
        "s": series["s"],
        parameter: series[parameter],
        "eta": series["eta"],
        f"W_rate_{drive}": series[f"W_rate_{drive}"] if f"W_rate_{drive}" in series else np.nan,
        "W_ext_rate": series["W_ext_rate"],
    })
    scan = LeverScan(parameter=parameter, table=table, result=result)
    logger.info(f"📊 Lever scan '{config.name}': max eta = {scan.max_eta:.6f} "
                f"({scan.undefined_points} undefined point(s))")
    return scan


def _same_endpoints(first, second):
    for left, right in zip(first.endpoints(), second.endpoints()):
        if set(left) != set(right):
            return False
        if any(abs(left[name] - right[name]) > 1e-12 * max(1.0, abs(left[name])) for name in left):
            return False
    return True


def run_path_dependence(config_a, config_b=None):
    """Compare two protocols with shared endpoints"""
    if config_b is None:
        if len(config_a.protocols) != 2:
            raise ValidationError("path comparison needs two protocols")
        config_b = config_a.with_protocol(config_a.protocols[1])
        config_a = config_a.with_protocol(config_a.protocols[0])
    if not _same_endpoints(config_a.protocol, config_b.protocol):
        raise ValidationError("path comparison protocols do not share endpoints")

    first, second = run_protocol(config_a), run_protocol(config_b)
    differences, tolerances = {}, {}
    for label in first.labels:
        differences[label] = {key: first.totals[label][key] - second.totals[label][key]
                              for key in ("W", "power_part", "nonlocal")}
        combined = first.errors[label]["W"] + second.errors[label]["W"]
        tolerances[label] = max(4.0 * combined, settings.PATH_AGREEMENT_TOL)
        if abs(differences[label]["W"]) > tolerances[label]:
            raise ConsistencyError(
                f"work on {label} differs between paths by {differences[label]['W']:.3e}",
                {'quantity': 'W', 'label': label, 'magnitude': abs(differences[label]['W']),
                 'tolerance': tolerances[label]},
            )
        logger.info(f"📊 Paths [{label}]: dW={differences[label]['W']:+.3e} "
                    f"dPower={differences[label]['power_part']:+.6f} "
                    f"dNonlocal={differences[label]['nonlocal']:+.6f}")
    return PathComparison(results=(first, second), differences=differences, tolerances=tolerances)


def _sweep_row(parameter, value, result):
    row = {parameter: value, "W_ext": result.w_ext, "dOmega": result.delta_omega,
           "quadrature_error": result.quadrature_error}
    for label in result.labels:
        for key in ("W", "dU", "dS", "dN", "power_part", "nonlocal"):
            row[f"{key}_{label}"] = result.totals[label][key]
        row[f"dOmega_{label}"] = result.endpoint_deltas[label]["Omega"]
    return row


def _model_sweep_point(config, value):
    point = config.at_sweep_value(value)
    return _sweep_row(config.sweep.parameter, value, run_protocol(point))


def run_sweep(config, n_jobs=None):
    """One row of integrated totals per sweep value, in sweep order"""
    if config.sweep is None:
        raise ValidationError("config has no sweep section")
    sweep = config.sweep
    n_jobs = settings.SWEEP_JOBS if n_jobs is None else n_jobs
    logger.info(f"🔄 Sweep '{config.name}' over {sweep.parameter}: {len(sweep.values)} values")

    if sweep.targets_reservoir:
        # frames do not depend on the reservoir: diagonalize once
        protocol = config.protocol
        grid_config = config
        if config.grid is None and sweep.parameter == "temperature":
            grid_config = config.with_grid(max(config.at_sweep_value(v).effective_grid for v in sweep.values))
        quad_grid = _quad_grid(grid_config, protocol)
        frame = spectral_path(config.model, protocol, quad_grid.s, quad_grid.segment_index)
        rows = []
        for value in sweep.values:
            point = grid_config.at_sweep_value(value)
            result = _result_from_frame(point, protocol, frame, quad_grid, point.reservoir)
            rows.append(_sweep_row(sweep.parameter, value, result))
    else:
        rows = Parallel(n_jobs=n_jobs)(
            delayed(_model_sweep_point)(config, value) for value in sweep.values
        )

    table = pd.DataFrame(rows)
    table.attrs["parameter"] = sweep.parameter
    return table


def _oracle_rows(frame, partition, reservoir, model_name):
    """Free-fermion sums against the Fock-space grand density at one frame"""
    system = fock_build(frame.h)
    density = grand_density(system, reservoir)
    exact = fock_global(system, reservoir)
    total = global_state(frame.energies, reservoir)
    scale = max(1.0, abs(float(total.U)), abs(float(total.Omega)))
    tolerance = settings.STATE_TOL

    rows = []

    def add(check, value, reference):
        error = abs(float(value) - float(reference)) / scale
        rows.append({"model": model_name, "s": float(frame.s), "check": check,
                     "error": error, "tolerance": tolerance, "passed": error <= tolerance})

    for quantity in ("U", "S", "N", "Omega"):
        add(f"global_{quantity}", getattr(total, quantity), exact[quantity])

    weights = {label: prob_weights(frame, projector(partition, label, frame.n)) for label in partition.labels}
    states = subsystem_state(frame, weights, reservoir, partition.labels)
    for label in partition.labels:
        pi = projector(partition, label, frame.n)
        add(f"U_{label}", states[label].U, fock_expect(density, partitioned_operator(frame.h, pi)))
        add(f"N_{label}", states[label].N, fock_expect(density, pi))
    add("sum_S", sum(state.S for state in states.values()), density.von_neumann_entropy)

    # closed forms only where the eigenbasis is unique
    resolved = float(frame.min_gap) > float(frame.degeneracy_threshold)
    if frame.n == 2 and resolved and np.allclose(np.imag(frame.h), 0.0):
        e_minus, e_plus, p_minus, p_plus = two_level_closed_form(
            frame.h[0, 0].real, frame.h[1, 1].real, abs(frame.h[0, 1]))
        site_one = np.diag([1.0, 0.0])
        closed = [("e_minus", frame.energies[0], e_minus), ("e_plus", frame.energies[1], e_plus),
                  ("P_minus", prob_weights(frame, site_one)[0], p_minus),
                  ("P_plus", prob_weights(frame, site_one)[1], p_plus)]
        for check, value, reference in closed:
            error = abs(float(value) - float(reference))
            rows.append({"model": model_name, "s": float(frame.s), "check": f"closed_form_{check}",
                         "error": error, "tolerance": 1e-12 * scale, "passed": error <= 1e-12 * scale})
    return rows


def run_oracle_check(config, samples=5, random_models=10):
    """Cross-check the config model and seeded random models against the Fock oracle"""
    protocol = config.protocol
    frame = spectral_path(config.model, protocol, np.linspace(0.0, 1.0, samples))
    rows = []
    for k in range(samples):
        rows.extend(_oracle_rows(frame.at(k), config.partition, config.reservoir, config.name))

    rng = np.random.default_rng(config.seed)
    for index in range(random_models):
        n = int(rng.choice([2, 3, 4]))
        h = random_hermitian(rng, n)
        partition = Partition(assignment={str(i): ("A" if i == 0 else "B") for i in range(n)},
                              labels=("A", "B"))
        random_frame = frame_from_matrices(0.0, h, np.zeros((n, n)))
        rows.extend(_oracle_rows(random_frame, partition, config.reservoir, f"random-{index}"))

    table = pd.DataFrame(rows, columns=["model", "s", "check", "error", "tolerance", "passed"])
    failed = table[~table["passed"]]
    logger.info(f"🔍 Oracle check: {len(table)} comparisons, {len(failed)} failed, "
                f"worst error {table['error'].max():.3e}")
    if len(failed):
        worst = failed.loc[failed["error"].idxmax()]
        raise ConsistencyError(
            f"oracle mismatch on {worst['model']} {worst['check']}: {worst['error']:.3e}",
            {'quantity': worst['check'], 'label': worst['model'], 'magnitude': float(worst['error']),
             'tolerance': float(worst['tolerance'])},
        )
    return table


def ldos_table(config, s=0.0, sigma=None):
    """Broadened LDOS of every subsystem at one path point"""
    sigma = settings.LDOS_SIGMA_OVER_T * config.reservoir.temperature if sigma is None else sigma
    frame = make_frame(config.model, config.protocol, s)
    energies = ldos_energy_grid(frame, sigma)
    columns = {"energy": energies}
    for label in config.partition.labels:
        columns[f"ldos_{label}"] = ldos(frame, projector(config.partition, label, frame.n), energies, sigma)
    table = pd.DataFrame(columns)
    table.attrs.update({"s": float(s), "sigma": float(sigma)})
    return table
