"""
JACOBI - Cyclic Jacobi eigensolver untuk matriks Hermitian kecil (batched)

Works on stacks (..., n, n). Every (p, q) pair is visited in the same
row-cyclic order on every sweep, so identical input gives identical output.
"""

import numpy as np

from config.settings import settings
from core.errors import NumericalError
from security.logger import get_logger

logger = get_logger(__name__)


def _rotate(a, v, p, q, tiny):
    """Zero a[..., p, q] on every matrix of the batch"""
    apq = a[:, p, q]
    magnitude = np.abs(apq)
    active = magnitude > tiny

    # phase step: D = diag(.., conj(e), ..) on column q makes a[p, q] real positive
    e = np.where(active, apq / np.where(active, magnitude, 1.0), 1.0)
    a[:, :, q] *= np.conj(e)[:, None]
    a[:, q, :] *= e[:, None]
    v[:, :, q] *= np.conj(e)[:, None]

    app = a[:, p, p].real
    aqq = a[:, q, q].real
    safe = np.where(active, magnitude, 1.0)
    theta = (aqq - app) / (2.0 * safe)
    sign = np.where(theta >= 0.0, 1.0, -1.0)
    with np.errstate(over='ignore'):
        t = sign / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
    t = np.where(np.isfinite(t) & active, t, 0.0)
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    c_col, s_col = c[:, None], s[:, None]
    col_p = a[:, :, p].copy()
    col_q = a[:, :, q].copy()
    a[:, :, p] = c_col * col_p - s_col * col_q
    a[:, :, q] = s_col * col_p + c_col * col_q

    row_p = a[:, p, :].copy()
    row_q = a[:, q, :].copy()
    a[:, p, :] = c_col * row_p - s_col * row_q
    a[:, q, :] = s_col * row_p + c_col * row_q

    a[:, p, q] = 0.0
    a[:, q, p] = 0.0
    a[:, p, p] = a[:, p, p].real
    a[:, q, q] = a[:, q, q].real

    vec_p = v[:, :, p].copy()
    vec_q = v[:, :, q].copy()
    v[:, :, p] = c_col * vec_p - s_col * vec_q
    v[:, :, q] = s_col * vec_p + c_col * vec_q


def _off_norm(a):
    n = a.shape[-1]
    off = a * (1.0 - np.eye(n))
    return np.sqrt(np.sum(np.abs(off) ** 2, axis=(-2, -1)))


def jacobi_diagonalize(h, max_sweeps=None, rel_tol=None):
    """Raw eigenvalues/eigenvectors of Hermitian h (..., n, n), unsorted.

    Returns (energies, vectors) with vectors[..., :, k] the k-th eigenvector.
    Raises NumericalError if the off-diagonal norm has not dropped below
    rel_tol * ||h||_F after max_sweeps sweeps.
    """
    max_sweeps = settings.JACOBI_MAX_SWEEPS if max_sweeps is None else max_sweeps
    h = np.asarray(h, dtype=complex)
    batch_shape, n = h.shape[:-2], h.shape[-1]
    rel_tol = n * 1e-15 if rel_tol is None else rel_tol

    a = h.reshape((-1, n, n)).copy()
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()

    norm = np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))
    threshold = rel_tol * norm
    tiny = np.finfo(float).tiny * 16

    sweeps = 0
    off = _off_norm(a)
    while np.any(off > threshold):
        if sweeps >= max_sweeps:
            worst = float(np.max(off / np.where(norm > 0, norm, 1.0)))
            raise NumericalError(
                f"Jacobi did not converge after {max_sweeps} sweeps "
                f"(relative off-diagonal residual {worst:.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q, tiny)
        sweeps += 1
        off = _off_norm(a)

    logger.debug(f"🔧 Jacobi converged in {sweeps} sweeps for {a.shape[0]} matrices of size {n}")
    energies = np.diagonal(a, axis1=-2, axis2=-1).real
    return energies.reshape(batch_shape + (n,)), v.reshape(batch_shape + (n, n))
