"""
SPECTRAL - Diagonalisasi sesaat, gauge kontinu sepanjang protokol, dan laju analitik P_nu(gamma)
"""

from dataclasses import dataclass, replace

import numpy as np

from config.settings import settings
from core.errors import CapacityError, DegeneracyError, ValidationError
from core.jacobi import jacobi_diagonalize
from core.model import build_drive_derivative, hamiltonian_along, projector
from security.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SpectralFrame:
    """Eigen-decomposition of h(s) plus drive matrix elements.

    Arrays may carry a leading grid axis: s has shape (G,), energies (G, n),
    vectors/drive_elems/h/hdot (G, n, n). A single point has no leading axis.
    """

    s: np.ndarray
    h: np.ndarray
    hdot: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    drive_elems: np.ndarray
    energy_rates: np.ndarray
    min_gap: np.ndarray
    warnings: tuple = ()

    @property
    def n(self):
        return self.energies.shape[-1]

    @property
    def is_batched(self):
        return self.energies.ndim == 2

    def __len__(self):
        return self.energies.shape[0] if self.is_batched else 1

    def at(self, k):
        """Single-point frame k of a batched frame"""
        if not self.is_batched:
            return self
        return replace(
            self, s=self.s[k], h=self.h[k], hdot=self.hdot[k], energies=self.energies[k],
            vectors=self.vectors[k], drive_elems=self.drive_elems[k],
            energy_rates=self.energy_rates[k], min_gap=self.min_gap[k], warnings=(),
        )

    def scaled_drive(self, factor):
        """Same frame with hdot multiplied by factor"""
        return replace(
            self, hdot=self.hdot * factor, drive_elems=self.drive_elems * factor,
            energy_rates=self.energy_rates * factor,
        )

    @property
    def scale(self):
        """max(1, |h|_max) per point"""
        return np.maximum(1.0, np.max(np.abs(self.h), axis=(-2, -1)))

    @property
    def degeneracy_threshold(self):
        return settings.DEGENERACY_REL * self.scale


def _dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def check_hermitian(h, what="matrix"):
    h = np.asarray(h)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise ValidationError(f"{what} must be square, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValidationError(f"{what} has non-finite entries")
    scale = np.maximum(1.0, np.max(np.abs(h), axis=(-2, -1), initial=0.0))
    asymmetry = np.max(np.abs(h - _dagger(h)), axis=(-2, -1), initial=0.0)
    if np.any(asymmetry > settings.HERMITIAN_TOL * scale):
        raise ValidationError(f"{what} is not Hermitian (asymmetry {np.max(asymmetry):.3e})")


def eigh(h):
    """Ascending eigenvalues and gauge-fixed eigenvectors of Hermitian h.

    Within a numerically degenerate cluster, columns are ordered by the
    index of their largest-magnitude entry. Each column is phased so its
    largest-magnitude entry is real positive.
    """
    h = np.asarray(h, dtype=complex)
    check_hermitian(h, "hamiltonian")
    n = h.shape[-1]
    if n > settings.EIGH_MAX_DIM:
        raise CapacityError(f"matrix dimension {n} exceeds the eigensolver cap {settings.EIGH_MAX_DIM}")

    raw_energies, raw_vectors = jacobi_diagonalize(h)

    order = np.argsort(raw_energies, axis=-1, kind='stable')
    energies = np.take_along_axis(raw_energies, order, axis=-1)
    vectors = np.take_along_axis(raw_vectors, order[..., None, :], axis=-1)

    # degenerate clusters: re-order by the position of the dominant component
    scale = np.maximum(1.0, np.max(np.abs(h), axis=(-2, -1), initial=0.0))
    delta = np.asarray(settings.DEGENERACY_REL * scale)
    gaps = np.diff(energies, axis=-1)
    cluster = np.concatenate(
        [np.zeros(energies.shape[:-1] + (1,), dtype=int),
         np.cumsum(gaps > delta[..., None], axis=-1)], axis=-1)
    dominant = np.argmax(np.abs(vectors), axis=-2)
    key = cluster * (n + 1) + dominant
    order = np.argsort(key, axis=-1, kind='stable')
    energies = np.take_along_axis(energies, order, axis=-1)
    vectors = np.take_along_axis(vectors, order[..., None, :], axis=-1)

    return energies, _fix_gauge(vectors)


def _fix_gauge(vectors):
    dominant = np.argmax(np.abs(vectors), axis=-2)
    lead = np.take_along_axis(vectors, dominant[..., None, :], axis=-2)[..., 0, :]
    magnitude = np.abs(lead)
    phase = np.where(magnitude > 0, np.conj(lead) / np.where(magnitude > 0, magnitude, 1.0), 1.0)
    return vectors * phase[..., None, :]


def _overlaps(prev_vectors, vectors):
    """<nu_prev|nu> per column"""
    return np.sum(np.conj(prev_vectors) * vectors, axis=-2)


def _phases(overlaps):
    magnitude = np.abs(overlaps)
    return np.where(magnitude > 0, np.conj(overlaps) / np.where(magnitude > 0, magnitude, 1.0), 1.0)


def gauge_align(prev_vectors, vectors):
    """Phase each column so <nu_prev|nu> is real and nonnegative"""
    prev_vectors = np.asarray(prev_vectors)
    vectors = np.asarray(vectors)
    if prev_vectors.shape != vectors.shape:
        raise ValidationError(f"gauge_align shape mismatch {prev_vectors.shape} vs {vectors.shape}")
    overlaps = _overlaps(prev_vectors, vectors)
    weak = np.abs(overlaps) < settings.TRACKING_OVERLAP_MIN
    if np.any(weak):
        logger.warning(f"⚠️ Gauge tracking overlap below {settings.TRACKING_OVERLAP_MIN} "
                       f"for columns {np.flatnonzero(weak).tolist()} (possible crossing)")
    return vectors * _phases(overlaps)[..., None, :]


def _align_path(s, vectors):
    """Sequential max-overlap alignment along a stacked (G, n, n) path"""
    if vectors.shape[0] < 2:
        return vectors, ()
    overlaps = _overlaps(vectors[:-1], vectors[1:])
    phases = np.cumprod(_phases(overlaps), axis=0)
    aligned = vectors.copy()
    aligned[1:] *= phases[:, None, :]

    warnings = []
    worst = np.min(np.abs(overlaps), axis=-1)
    for k in np.flatnonzero(worst < settings.TRACKING_OVERLAP_MIN):
        warnings.append(
            f"gauge tracking overlap {worst[k]:.3f} < {settings.TRACKING_OVERLAP_MIN} between "
            f"s={s[k]:.6f} and s={s[k + 1]:.6f} (possible crossing, refine the grid)"
        )
    return aligned, tuple(warnings)


def frame_from_matrices(s, h, hdot):
    """Build a frame from h and dh/ds directly (single or stacked)"""
    h = np.asarray(h, dtype=complex)
    hdot = np.asarray(hdot, dtype=complex)
    check_hermitian(hdot, "drive derivative")
    energies, vectors = eigh(h)
    drive_elems = _dagger(vectors) @ hdot @ vectors
    drive_elems = 0.5 * (drive_elems + _dagger(drive_elems))
    energy_rates = np.diagonal(drive_elems, axis1=-2, axis2=-1).real.copy()
    if energies.shape[-1] > 1:
        min_gap = np.min(np.diff(energies, axis=-1), axis=-1)
    else:
        min_gap = np.full(energies.shape[:-1], np.inf)
    return SpectralFrame(
        s=np.asarray(s, dtype=float), h=h, hdot=hdot, energies=energies, vectors=vectors,
        drive_elems=drive_elems, energy_rates=energy_rates, min_gap=min_gap,
    )


def make_frame(spec, protocol, s, segment=None):
    """Frame at s without path alignment (standalone gauge)"""
    shape = np.shape(s) + (spec.n, spec.n)
    h = np.broadcast_to(hamiltonian_along(spec, protocol, s), shape)
    hdot = np.broadcast_to(build_drive_derivative(spec, protocol, s, segment), shape)
    return frame_from_matrices(s, h, hdot)


def spectral_path(spec, protocol, s_grid, segment=None):
    """Stacked frame over an ascending s grid with continuous gauge.

    With a per-node segment index, a breakpoint may repeat once per segment
    it closes or opens; each copy carries that segment's drive.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.ndim != 1:
        raise ValidationError("s grid must be one-dimensional")
    steps = np.diff(s_grid)
    if segment is None:
        if np.any(steps <= 0):
            raise ValidationError("s grid must be strictly increasing")
    else:
        segment = np.asarray(segment, dtype=int)
        if segment.shape != s_grid.shape or np.any(np.diff(segment) < 0):
            raise ValidationError("segment index must match the s grid and never decrease")
        repeated = steps == 0
        if np.any(steps < 0) or np.any(repeated & (np.diff(segment) == 0)):
            raise ValidationError("s grid must increase within each segment")
    frame = make_frame(spec, protocol, s_grid, segment)
    vectors, warnings = _align_path(s_grid, frame.vectors)
    drive_elems = _dagger(vectors) @ frame.hdot @ vectors
    drive_elems = 0.5 * (drive_elems + _dagger(drive_elems))
    for warning in warnings:
        logger.warning(f"⚠️ {warning}")
    return replace(frame, vectors=vectors, drive_elems=drive_elems, warnings=warnings)


def projector_in_eigenbasis(frame, pi):
    """<nu|pi|mu>"""
    return _dagger(frame.vectors) @ np.asarray(pi, dtype=complex) @ frame.vectors


def prob_weights(frame, pi):
    """P_nu(gamma) = <nu|pi|nu>"""
    pi_eig = projector_in_eigenbasis(frame, pi)
    return np.clip(np.diagonal(pi_eig, axis1=-2, axis2=-1).real, 0.0, 1.0)


def inverse_gaps(frame):
    """1/(e_nu - e_mu) off the diagonal, 0 on it"""
    diff = frame.energies[..., :, None] - frame.energies[..., None, :]
    off = ~np.eye(frame.n, dtype=bool)
    with np.errstate(divide='ignore'):
        return np.where(off, 1.0 / np.where(off, diff, 1.0), 0.0)


def check_gap(frame):
    """DegeneracyError at the first point whose gap is below threshold"""
    bad = np.atleast_1d(frame.min_gap <= frame.degeneracy_threshold)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        s = float(np.atleast_1d(frame.s)[k])
        gap = float(np.atleast_1d(frame.min_gap)[k])
        raise DegeneracyError(
            f"spectrum degenerate at s={s:.9f} (gap {gap:.3e}); refine the grid or "
            f"adjust parameters to avoid the crossing", s=s, min_gap=gap,
        )


def prob_rates(frame, pi):
    """dP_nu(gamma)/ds = 2 Re sum_{mu != nu} <nu|pi|mu> M_{mu nu} / (e_nu - e_mu)"""
    check_gap(frame)
    pi_eig = projector_in_eigenbasis(frame, pi)
    terms = pi_eig * np.swapaxes(frame.drive_elems, -1, -2) * inverse_gaps(frame)
    return 2.0 * np.real(np.sum(terms, axis=-1))


def partitioned_operator(operator, pi):
    """o|_gamma = (pi o + o pi) / 2"""
    operator = np.asarray(operator, dtype=complex)
    pi = np.asarray(pi, dtype=complex)
    return 0.5 * (pi @ operator + operator @ pi)


def fd_check(spec, protocol, s, partition, step=None):
    """Largest |analytic - central difference| for eigenvalue and weight rates at s"""
    step = settings.FD_CHECK_STEP if step is None else step
    s = float(s)
    if s - step < 0.0 or s + step > 1.0:
        raise ValidationError(f"fd_check needs s in [{step}, {1 - step}], got {s}")

    centre = make_frame(spec, protocol, s)
    lower = make_frame(spec, protocol, s - step)
    upper = make_frame(spec, protocol, s + step)

    energy_fd = (upper.energies - lower.energies) / (2 * step)
    report = {
        's': s,
        'energy_rate_error': float(np.max(np.abs(centre.energy_rates - energy_fd))),
        'prob_rate_error': 0.0,
    }
    for label in partition.labels:
        pi = projector(partition, label, spec.n)
        fd = (prob_weights(upper, pi) - prob_weights(lower, pi)) / (2 * step)
        error = float(np.max(np.abs(prob_rates(centre, pi) - fd)))
        report['prob_rate_error'] = max(report['prob_rate_error'], error)
    logger.debug(f"🔧 FD check at s={s:.6f}: {report}")
    return report
