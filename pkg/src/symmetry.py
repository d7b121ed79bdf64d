from __future__ import annotations

import itertools
import logging
import math

import numpy as np
from numpy.typing import NDArray

from src.errors import NotHermitianError, ValidationError
from src.geometry import SQRT3, classify, require_in_triangle
from src.linalg import HERMITIAN_TOLERANCE, IDENTITY2, SIGMA_X, kron3, make_density_matrix
from src.models import ComplexMatrix8, DensityMatrix, SloccClass, SymCoords, SymmetryElement

logger = logging.getLogger(__name__)

PERMUTATIONS: tuple[tuple[int, int, int], ...] = tuple(itertools.permutations(range(3)))  # type: ignore[assignment]

# bit k of basis index i belongs to qubit k + 1 (qubit 1 is the most significant bit)
_BITS = np.array([[(i >> (2 - k)) & 1 for k in range(3)] for i in range(8)], dtype=np.int64)
_SIGNS = 1 - 2 * _BITS
# phase exponents of U(phi1, phi2) per basis state: phi1 * (s1 - s3) + phi2 * (s2 - s3)
_PHASE_WEIGHTS = np.stack([_SIGNS[:, 0] - _SIGNS[:, 2], _SIGNS[:, 1] - _SIGNS[:, 2]], axis=1).astype(np.float64)

_PHASE_INVARIANT_MASK = np.eye(8, dtype=bool)
_PHASE_INVARIANT_MASK[0, 7] = True
_PHASE_INVARIANT_MASK[7, 0] = True


def _z_rotation(phi: float) -> NDArray[np.complex128]:
    """exp(i * phi * sigma_z)."""
    return np.diag([np.exp(1j * phi), np.exp(-1j * phi)])


def _index_map(permutation: tuple[int, int, int], flip: bool) -> NDArray[np.int64]:
    """Basis index i is sent to index_map[i] by the flip-after-permutation operator."""
    permuted = _BITS[:, list(permutation)]
    if flip:
        permuted = 1 - permuted
    return permuted @ np.array([4, 2, 1], dtype=np.int64)


def realize(e: SymmetryElement) -> ComplexMatrix8:
    """Unitary Z(phi1, phi2) . X^flip . P(permutation)."""
    index_map = _index_map(e.permutation, False)
    permutation = np.zeros((8, 8), dtype=np.complex128)
    permutation[index_map, np.arange(8)] = 1.0
    flip = kron3(SIGMA_X, SIGMA_X, SIGMA_X) if e.flip else kron3(IDENTITY2, IDENTITY2, IDENTITY2)
    rotation = kron3(_z_rotation(e.phi1), _z_rotation(e.phi2), _z_rotation(-(e.phi1 + e.phi2)))
    return rotation @ flip @ permutation


def discrete_elements() -> list[SymmetryElement]:
    return [SymmetryElement(permutation=p, flip=f) for p in PERMUTATIONS for f in (False, True)]


def twirl_coordinates(rho: DensityMatrix) -> SymCoords:
    m = rho.matrix
    x = (m[0, 7] + m[7, 0]) / 2.0
    if abs(x.imag) > HERMITIAN_TOLERANCE:
        raise NotHermitianError(f"GHZ coherence has imaginary part {x.imag:.3e}")
    y = (m[0, 0].real + m[7, 7].real - 0.25) / SQRT3
    return SymCoords(float(x.real), float(y))


def reconstruct_state(c: SymCoords) -> DensityMatrix:
    require_in_triangle(c)
    matrix = np.diag(np.full(8, (1.0 - 4.0 * c.y / SQRT3) / 8.0)).astype(np.complex128)
    matrix[0, 0] = matrix[7, 7] = SQRT3 * c.y / 2.0 + 1.0 / 8.0
    matrix[0, 7] = matrix[7, 0] = c.x
    return make_density_matrix(matrix)


def class_lower_bound(rho: DensityMatrix) -> SloccClass:
    """Class of the twirled state; the class of rho itself is at least this."""
    return classify(twirl_coordinates(rho))


def _finish(matrix: ComplexMatrix8) -> DensityMatrix:
    hermitian = (matrix + matrix.conj().T) / 2.0
    return make_density_matrix(hermitian / np.trace(hermitian).real)


def group_average_exact(rho: DensityMatrix) -> DensityMatrix:
    """Exact twirl: phase integration, then the average over the 12 discrete elements."""
    phase_averaged = np.where(_PHASE_INVARIANT_MASK, rho.matrix, 0.0)
    total = np.zeros((8, 8), dtype=np.complex128)
    for element in discrete_elements():
        u = realize(element)
        total += u @ phase_averaged @ u.conj().T
    return _finish(total / 12.0)


def sampled_twirl(rho: DensityMatrix, n: int, seed: int) -> DensityMatrix:
    """Monte-Carlo group average over n random symmetry elements; n = 0 means the exact average."""
    if n < 0:
        raise ValidationError(f"sample count must be >= 0, got {n!r}")
    if n == 0:
        return group_average_exact(rho)

    rng = np.random.default_rng(seed)
    permutation_index = rng.integers(0, len(PERMUTATIONS), size=n)
    flips = rng.integers(0, 2, size=n).astype(bool)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=(n, 2))

    total = np.zeros((8, 8), dtype=np.complex128)
    for k, permutation in enumerate(PERMUTATIONS):
        for flip in (False, True):
            selected = (permutation_index == k) & (flips == flip)
            if not selected.any():
                continue
            phases = np.exp(1j * (angles[selected] @ _PHASE_WEIGHTS.T))
            # sum over samples of z_j * conj(z_l)
            phase_sum = phases.T @ phases.conj()
            inverse = np.argsort(_index_map(permutation, flip))
            total += phase_sum * rho.matrix[np.ix_(inverse, inverse)]
    logger.debug("sampled twirl: n=%d seed=%d", n, seed)
    return _finish(total / n)
