from __future__ import annotations

import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.errors import (
    InvalidSubsystemError,
    NoConvergenceError,
    NotHermitianError,
    NotPositiveSemidefiniteError,
    TraceNotOneError,
    ValidationError,
)
from src.models import ComplexMatrix8, DensityMatrix

logger = logging.getLogger(__name__)

DIM = 8
HERMITIAN_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-9
PSD_TOLERANCE = 1e-10
JACOBI_TOLERANCE = 1e-13
JACOBI_MAX_SWEEPS = 100

IDENTITY2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY8 = np.eye(DIM, dtype=np.complex128)


def as_matrix8(entries: ArrayLike) -> ComplexMatrix8:
    matrix = np.array(entries, dtype=np.complex128, copy=True)
    if matrix.shape != (DIM, DIM):
        raise ValidationError(f"expected an 8x8 matrix, got shape {matrix.shape}")
    return matrix


def hermiticity_defect(matrix: ArrayLike) -> float:
    m = np.asarray(matrix, dtype=np.complex128)
    return float(np.max(np.abs(m - m.conj().T)))


def require_hermitian(matrix: ArrayLike) -> None:
    defect = hermiticity_defect(matrix)
    if defect > HERMITIAN_TOLERANCE:
        raise NotHermitianError(f"matrix is not Hermitian: max |M[i][j] - conj(M[j][i])| = {defect:.3e}")


def kron3(a: ArrayLike, b: ArrayLike, c: ArrayLike) -> ComplexMatrix8:
    return np.kron(np.kron(np.asarray(a, dtype=np.complex128), b), c)


def hermitian_eigenvalues(matrix: ArrayLike) -> NDArray[np.float64]:
    """Eigenvalues (ascending) of a Hermitian 8x8 matrix by cyclic complex Jacobi rotations."""
    a = as_matrix8(matrix)
    require_hermitian(a)
    a = (a + a.conj().T) / 2.0
    threshold = JACOBI_TOLERANCE * max(1.0, float(np.linalg.norm(a)))

    for sweep in range(JACOBI_MAX_SWEEPS + 1):
        off = math.sqrt(max(0.0, float(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2))))
        if off <= threshold:
            logger.debug("jacobi converged: sweeps=%d off=%.3e", sweep, off)
            return np.sort(np.diag(a).real)
        if sweep == JACOBI_MAX_SWEEPS:
            break
        for p in range(DIM - 1):
            for q in range(p + 1, DIM):
                _rotate(a, p, q)

    raise NoConvergenceError(f"jacobi eigensolver exceeded {JACOBI_MAX_SWEEPS} sweeps (off-diagonal norm {off:.3e})")


def _rotate(a: ComplexMatrix8, p: int, q: int) -> None:
    apq = a[p, q]
    magnitude = abs(apq)
    if magnitude == 0.0:
        return
    phase = apq / magnitude
    theta = (a[q, q].real - a[p, p].real) / (2.0 * magnitude)
    t = 1.0 / (abs(theta) + math.hypot(theta, 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    # G = diag(1, conj(phase)) on (p, q) times the real rotation; a <- G^H a G
    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * np.conj(phase) * col_q
    a[:, q] = s * col_p + c * np.conj(phase) * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * phase * row_q
    a[q, :] = s * row_p + c * phase * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real


def make_density_matrix(entries: ArrayLike) -> DensityMatrix:
    matrix = as_matrix8(entries)
    require_hermitian(matrix)
    trace = np.trace(matrix)
    if abs(trace - 1.0) > TRACE_TOLERANCE:
        raise TraceNotOneError(f"density matrix trace must be 1: |tr(M) - 1| = {abs(trace - 1.0):.3e}")
    smallest = float(hermitian_eigenvalues(matrix)[0])
    if smallest < -PSD_TOLERANCE:
        raise NotPositiveSemidefiniteError(
            f"density matrix must be positive semidefinite: min eigenvalue = {smallest:.3e}"
        )
    return DensityMatrix(matrix)


def partial_transpose(rho: DensityMatrix, subsystem: int) -> ComplexMatrix8:
    if subsystem not in (1, 2, 3):
        raise InvalidSubsystemError(f"subsystem must be 1, 2 or 3, got {subsystem!r}")
    tensor = np.asarray(rho.matrix).reshape((2,) * 6)
    tensor = np.swapaxes(tensor, subsystem - 1, subsystem + 2)
    return tensor.reshape(DIM, DIM).copy()


def partial_transpose_min_eigenvalue(rho: DensityMatrix) -> float:
    """Smallest partial-transpose eigenvalue over the three single-qubit cuts."""
    return min(float(hermitian_eigenvalues(partial_transpose(rho, k))[0]) for k in (1, 2, 3))


def expectation(matrix: ArrayLike, rho: DensityMatrix) -> float:
    m = as_matrix8(matrix)
    require_hermitian(m)
    value = complex(np.einsum("ij,ji->", m, rho.matrix))
    if abs(value.imag) > HERMITIAN_TOLERANCE:
        raise NotHermitianError(f"expectation value has imaginary part {value.imag:.3e}")
    return value.real
