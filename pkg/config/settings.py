"""
SUBTHERMO SYSTEM SETTINGS & PARAMETERS
"""

from core.errors import ValidationError


class Settings:
    """Main system settings"""

    # ===== SYSTEM CONFIG =====
    SYSTEM_NAME = "SubThermo"
    VERSION = "1.0"
    LOG_LEVEL = "INFO"
    LOG_DIR = "logs"
    ENABLE_FILE_LOGGING = True

    # ===== SPECTRAL =====
    EIGH_MAX_DIM = 64
    JACOBI_MAX_SWEEPS = 60
    HERMITIAN_TOL = 1e-12
    DEGENERACY_REL = 1e-9          # delta_deg = DEGENERACY_REL * max(1, |h|_max)
    TRACKING_OVERLAP_MIN = 0.1

    # ===== INVARIANT TOLERANCES (relative to scale) =====
    STATE_TOL = 1e-10
    FIRST_LAW_TOL = 1e-10
    SUM_RULE_TOL = 1e-11
    IMAG_RESIDUE_TOL = 1e-12
    ETA_FLOOR_REL = 1e-12

    # ===== RUNNER =====
    MIN_GRID = 16
    DEFAULT_GRID = 2 ** 11
    LOW_T_GRID = 2 ** 14
    LOW_T_THRESHOLD = 0.1          # T below this gets LOW_T_GRID
    SWEEP_JOBS = 1
    FD_CHECK_STEP = 1e-5
    FD_CHECK_POINTS = 5
    PATH_AGREEMENT_TOL = 1e-8

    # ===== ORACLE =====
    FOCK_MAX_MODES = 12

    # ===== OUTPUT =====
    CSV_DIGITS = 17
    LDOS_SIGMA_OVER_T = 0.25
    LDOS_PADDING_SIGMAS = 8.0
    LDOS_POINTS = 2001
    LDOS_MAX_POINTS = 400001

    def __init__(self):
        """Initialize settings and validate them"""
        self.validate_settings()

    def validate_settings(self):
        """Validate that settings are coherent"""
        problems = []

        for name in ("MIN_GRID", "DEFAULT_GRID", "LOW_T_GRID"):
            value = getattr(self, name)
            if value < 16 or value & (value - 1):
                problems.append(f"{name}={value} is not a power of two >= 16")

        for name in ("HERMITIAN_TOL", "DEGENERACY_REL", "STATE_TOL", "FIRST_LAW_TOL",
                     "SUM_RULE_TOL", "IMAG_RESIDUE_TOL", "ETA_FLOOR_REL"):
            if getattr(self, name) <= 0:
                problems.append(f"{name} must be positive")

        if not 1 <= self.FOCK_MAX_MODES <= 16:
            problems.append("FOCK_MAX_MODES must lie in [1, 16]")

        if problems:
            raise ValidationError(f"Invalid settings: {problems}")


# Global settings instance
settings = Settings()


def default_grid(temperature):
    """Default quadrature grid for a reservoir temperature"""
    if temperature < Settings.LOW_T_THRESHOLD:
        return Settings.LOW_T_GRID
    return Settings.DEFAULT_GRID
