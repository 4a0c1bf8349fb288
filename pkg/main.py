#!/usr/bin/env python3
"""
SUBTHERMO MAIN - Simulator termodinamika subsistem untuk fermion bebas
Command line: run, lever, pathdep, sweep, oracle-check, ldos
"""

import argparse
import sys

from config.experiment_config import load_config
from config.presets import PRESETS, get_preset
from config.settings import settings
from core.errors import SubThermoError, ValidationError
from core.experiment_runner import (ldos_table, run_lever_scan, run_oracle_check, run_path_dependence,
                                    run_protocol, run_sweep)
from data.result_writer import emit, render
from security.logger import get_logger, setup_logging

logger = get_logger('main')

COMMANDS = ("run", "lever", "pathdep", "sweep", "oracle-check", "ldos")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="subthermo",
        description="Partitioned grand-canonical thermodynamics of driven free-fermion systems",
    )
    parser.add_argument("--version", action="version", version=f"{settings.SYSTEM_NAME} {settings.VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for command in COMMANDS:
        sub = subparsers.add_parser(command)
        source = sub.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", help="JSON experiment file")
        source.add_argument("--preset", choices=sorted(PRESETS), help="built-in experiment")
        sub.add_argument("--out", help="output file (stdout when omitted)")
        sub.add_argument("--grid", type=int, help="grid size, a power of two >= 16")
        sub.add_argument("--format", dest="output_format", choices=("csv", "plot"), default="csv")
        sub.add_argument("--log-level", default=settings.LOG_LEVEL)
        sub.add_argument("--log-dir", default=settings.LOG_DIR)
        sub.add_argument("--no-file-log", action="store_true", help="console logging only")

        if command == "run":
            sub.add_argument("--fd-check", action="store_true",
                             help="compare analytic rates with finite differences")
        elif command == "sweep":
            sub.add_argument("--jobs", type=int, default=settings.SWEEP_JOBS)
        elif command == "oracle-check":
            sub.add_argument("--samples", type=int, default=5)
            sub.add_argument("--random-models", type=int, default=10)
        elif command == "ldos":
            sub.add_argument("--s", type=float, default=0.0, dest="s_value")
            sub.add_argument("--sigma", type=float, help="broadening (default T/4)")

    return parser


class SubThermoCLI:
    def __init__(self, args):
        self.args = args
        setup_logging(args.log_level, enable_file_logging=not args.no_file_log, log_dir=args.log_dir)

    def load(self):
        """ExperimentConfig from --config or --preset, with --grid applied"""
        if self.args.config:
            config = load_config(self.args.config)
        else:
            config = get_preset(self.args.preset)
        if self.args.grid is not None:
            config = config.with_grid(self.args.grid)
        return config

    def execute(self):
        command = self.args.command.replace("-", "_")
        config = self.load()
        logger.info(f"🚀 {self.args.command}: '{config.name}'")
        result = getattr(self, f"cmd_{command}")(config)
        self.write(result)
        return 0

    def cmd_run(self, config):
        result = run_protocol(config, fd_check=self.args.fd_check)
        for warning in result.warnings:
            logger.warning(f"⚠️ {warning}")
        return result

    def cmd_lever(self, config):
        return run_lever_scan(config)

    def cmd_pathdep(self, config):
        return run_path_dependence(config).table()

    def cmd_sweep(self, config):
        if self.args.jobs < 1 and self.args.jobs != -1:
            raise ValidationError(f"--jobs must be >= 1 or -1, got {self.args.jobs}")
        return run_sweep(config, n_jobs=self.args.jobs)

    def cmd_oracle_check(self, config):
        return run_oracle_check(config, samples=self.args.samples, random_models=self.args.random_models)

    def cmd_ldos(self, config):
        if not 0.0 <= self.args.s_value <= 1.0:
            raise ValidationError(f"--s must lie in [0, 1], got {self.args.s_value}")
        return ldos_table(config, s=self.args.s_value, sigma=self.args.sigma)

    def write(self, result):
        if self.args.out:
            emit(result, self.args.out, self.args.output_format)
        else:
            sys.stdout.write(render(result, self.args.output_format))


def main(argv=None):
    """Exit code: 0 ok, 2 bad input, 3 numerical or invariant failure"""
    args = build_parser().parse_args(argv)
    try:
        return SubThermoCLI(args).execute()
    except SubThermoError as e:
        diagnostics = getattr(e, 'diagnostics', None)
        logger.error(f"❌ {type(e).__name__}: {e}" + (f" {diagnostics}" if diagnostics else ""))
        return e.exit_code
    except Exception as e:
        logger.critical(f"💥 CRITICAL ERROR: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
