"""
LOGGER - Logging sistem multi-level dengan rotasi
"""

import logging
import logging.handlers
import sys
from pathlib import Path

from config.settings import settings


class SubThermoLogger:
    def __init__(self):
        self.logger = logging.getLogger('SubThermo')
        self.setup_complete = False

    def setup_logging(self, log_level="INFO", enable_file_logging=True, log_dir=None):
        """Setup console + rotating file logging"""
        if self.setup_complete:
            return

        try:
            self.logger.setLevel(getattr(logging, log_level.upper(), logging.INFO))
            self.logger.handlers.clear()

            detailed_formatter = logging.Formatter(
                '%(asctime)s | %(levelname)-8s | %(name)-20s | %(message)s',
                datefmt='%Y-%m-%d %H:%M:%S'
            )
            simple_formatter = logging.Formatter(
                '%(asctime)s | %(levelname)-8s | %(message)s',
                datefmt='%H:%M:%S'
            )

            # Console goes to stderr so stdout stays clean for piped output
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setLevel(logging.INFO)
            console_handler.setFormatter(simple_formatter)
            self.logger.addHandler(console_handler)

            if enable_file_logging:
                log_path = Path(log_dir or settings.LOG_DIR)
                log_path.mkdir(parents=True, exist_ok=True)

                file_handler = logging.handlers.RotatingFileHandler(
                    log_path / 'subthermo.log',
                    maxBytes=10*1024*1024,  # 10MB
                    backupCount=5,
                    encoding='utf-8'
                )
                file_handler.setLevel(logging.DEBUG)
                file_handler.setFormatter(detailed_formatter)
                self.logger.addHandler(file_handler)

                error_handler = logging.handlers.RotatingFileHandler(
                    log_path / 'errors.log',
                    maxBytes=5*1024*1024,  # 5MB
                    backupCount=3,
                    encoding='utf-8'
                )
                error_handler.setLevel(logging.ERROR)
                error_handler.setFormatter(detailed_formatter)
                self.logger.addHandler(error_handler)

            self.setup_complete = True
            self.logger.debug(f"🚀 {settings.SYSTEM_NAME} {settings.VERSION} logger initialized (level {log_level}, "
                              f"file logging {'on' if enable_file_logging else 'off'})")

        except Exception as e:
            print(f"❌ Logger setup failed: {e}", file=sys.stderr)
            logging.basicConfig(
                level=logging.INFO,
                format='%(asctime)s | %(levelname)-8s | %(message)s',
                datefmt='%H:%M:%S'
            )

    def get_logger(self, name=None):
        """Get logger instance"""
        if name:
            return logging.getLogger(f'SubThermo.{name}')
        return self.logger

    def log_run_summary(self, result):
        """One INFO line per integrated subsystem total plus the global line"""
        try:
            for label, totals in result.totals.items():
                self.logger.info(
                    f"📊 {label} | W={totals['W']:+.10f} | dU={totals['dU']:+.10f} | "
                    f"dS={totals['dS']:+.10f} | dN={totals['dN']:+.10f} | "
                    f"power={totals['power_part']:+.10f} | nonlocal={totals['nonlocal']:+.10f}"
                )
            self.logger.info(
                f"📊 global | W_ext={result.w_ext:+.10f} | dOmega={result.delta_omega:+.10f} | "
                f"quad_err={result.quadrature_error:.2e}"
            )
            for warning in result.warnings:
                self.logger.warning(f"⚠️ {warning}")
        except Exception as e:
            self.logger.error(f"❌ Run summary logging error: {e}")

    def log_invariant_violation(self, issue):
        """Log a watchdog issue dict"""
        message = (f"🚨 {issue['severity'].upper()} - {issue['type']}"
                   f" [{issue.get('label', '-')}] at s={issue.get('s')}: "
                   f"{issue['value']:.3e} (threshold: {issue['threshold']:.3e})")
        if issue['severity'] == 'critical':
            self.logger.error(message)
        else:
            self.logger.warning(message)


# Global logger instance
subthermo_logger = SubThermoLogger()


def setup_logging(log_level="INFO", enable_file_logging=True, log_dir=None):
    """Setup logging (global function)"""
    subthermo_logger.setup_logging(log_level, enable_file_logging, log_dir)


def get_logger(name=None):
    """Get logger instance (global function)"""
    return subthermo_logger.get_logger(name)
