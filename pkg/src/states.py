from __future__ import annotations

import math

import numpy as np

from src.errors import ValidationError
from src.linalg import IDENTITY8, make_density_matrix
from src.models import DensityMatrix, PureState8


def ket(bits: str) -> PureState8:
    """Computational basis state, e.g. ket("001")."""
    if len(bits) != 3 or any(ch not in "01" for ch in bits):
        raise ValidationError(f"basis label must be three bits, got {bits!r}")
    amplitudes = np.zeros(8, dtype=np.complex128)
    amplitudes[int(bits, 2)] = 1.0
    return PureState8(amplitudes)


def ghz_state(sign: int = 1) -> PureState8:
    if sign not in (1, -1):
        raise ValidationError(f"GHZ sign must be +1 or -1, got {sign!r}")
    amplitudes = np.zeros(8, dtype=np.complex128)
    amplitudes[0] = 1.0 / math.sqrt(2.0)
    amplitudes[7] = sign / math.sqrt(2.0)
    return PureState8(amplitudes)


def w_state() -> PureState8:
    amplitudes = np.zeros(8, dtype=np.complex128)
    amplitudes[[1, 2, 4]] = 1.0 / math.sqrt(3.0)
    return PureState8(amplitudes)


def w_plus_minus_minus_state() -> PureState8:
    """(|++-> + |+-+> + |-++>)/sqrt3, the W-type state with maximal GHZ overlap."""
    plus = np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2.0)
    minus = np.array([1.0, -1.0], dtype=np.complex128) / math.sqrt(2.0)
    amplitudes = (
        np.kron(np.kron(plus, plus), minus)
        + np.kron(np.kron(plus, minus), plus)
        + np.kron(np.kron(minus, plus), plus)
    ) / math.sqrt(3.0)
    return PureState8(amplitudes)


def projector(psi: PureState8) -> DensityMatrix:
    return make_density_matrix(np.outer(psi.amplitudes, psi.amplitudes.conj()))


def maximally_mixed() -> DensityMatrix:
    return make_density_matrix(IDENTITY8 / 8.0)


def rho_r() -> DensityMatrix:
    """Uniform mixture of |001> ... |110>, the bottom corner of the triangle."""
    diagonal = np.full(8, 1.0 / 6.0)
    diagonal[[0, 7]] = 0.0
    return make_density_matrix(np.diag(diagonal))


def mixture(rho0: DensityMatrix, rho1: DensityMatrix, p: float) -> DensityMatrix:
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"mixing weight must lie in [0, 1], got {p!r}")
    return make_density_matrix((1.0 - p) * rho0.matrix + p * rho1.matrix)


def pseudo_pure(p: float) -> DensityMatrix:
    """GHZ state mixed with white noise: p * pi_GHZ+ + (1 - p) * 1/8."""
    return mixture(maximally_mixed(), projector(ghz_state(1)), p)
