from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from numpy.typing import NDArray

from src.errors import DegenerateLineError, OutsideTriangleError, ValidationError, WitnessSignError

# 8x8 complex array, basis order |000>, |001>, ..., |111> (index = binary q1q2q3).
ComplexMatrix8 = NDArray[np.complex128]

UNIT_NORM_TOLERANCE = 1e-12


def _frozen_array(values: object, dtype: type = np.complex128) -> NDArray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated three-qubit mixed state. Build it with `linalg.make_density_matrix`."""

    matrix: ComplexMatrix8

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _frozen_array(self.matrix))


@dataclass(frozen=True, eq=False)
class PureState8:
    amplitudes: NDArray[np.complex128]

    def __post_init__(self) -> None:
        amplitudes = _frozen_array(self.amplitudes)
        if amplitudes.shape != (8,):
            raise ValidationError(f"pure state needs 8 amplitudes, got shape {amplitudes.shape}")
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
            raise ValidationError(f"pure state is not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")
        object.__setattr__(self, "amplitudes", amplitudes)


@dataclass(frozen=True)
class SymCoords:
    x: float
    y: float

    def mirrored(self) -> SymCoords:
        return SymCoords(-self.x, self.y)


class SloccClass(IntEnum):
    SEPARABLE = 0
    BISEPARABLE = 1
    W = 2
    GHZ = 3

    @property
    def label(self) -> str:
        return _SLOCC_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> SloccClass:
        text = str(label or "").strip().lower()
        for member, name in _SLOCC_LABELS.items():
            if text in (name.lower(), member.name.lower()):
                return member
        raise ValidationError(f"unknown SLOCC class label: {label!r}")


_SLOCC_LABELS = {
    SloccClass.SEPARABLE: "Separable",
    SloccClass.BISEPARABLE: "Biseparable",
    SloccClass.W: "WClass",
    SloccClass.GHZ: "GhzClass",
}


@dataclass(frozen=True)
class Line:
    """Locus alpha*x + beta*y + gamma = 0 in triangle coordinates."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        if self.alpha == 0.0 and self.beta == 0.0:
            raise DegenerateLineError("line needs (alpha, beta) != (0, 0)")

    def value(self, c: SymCoords) -> float:
        return self.alpha * c.x + self.beta * c.y + self.gamma

    def normalized(self) -> Line:
        """Unit normal, oriented so the origin side is nonnegative."""
        norm = math.hypot(self.alpha, self.beta)
        sign = -1.0 if self.gamma < 0.0 else 1.0
        return Line(sign * self.alpha / norm, sign * self.beta / norm, sign * self.gamma / norm)


@dataclass(frozen=True)
class Witness:
    """GHZ-symmetric witness a*1 + b*pi_GHZ+ + c*pi_GHZ-."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if not self.origin_value > 0.0:
            raise WitnessSignError(
                f"witness must be positive on the maximally mixed state: a + (b + c)/8 = {self.origin_value:.6g}"
            )

    @property
    def origin_value(self) -> float:
        return self.a + (self.b + self.c) / 8.0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class MixingLine:
    """state(p) = (1 - p) * noise + p * target, in triangle coordinates."""

    noise: SymCoords
    target: SymCoords

    def __post_init__(self) -> None:
        from src.geometry import in_triangle

        for name, point in (("noise", self.noise), ("target", self.target)):
            if not in_triangle(point):
                raise OutsideTriangleError(f"mixing line {name} end {point} is outside the triangle")
        if self.noise == self.target:
            raise DegenerateLineError("mixing line endpoints must differ")

    def state(self, p: float) -> SymCoords:
        return SymCoords(
            (1.0 - p) * self.noise.x + p * self.target.x,
            (1.0 - p) * self.noise.y + p * self.target.y,
        )

    def mirrored(self) -> MixingLine:
        return MixingLine(self.noise.mirrored(), self.target.mirrored())


@dataclass(frozen=True)
class SymmetryElement:
    """Qubit permutation, optional sigma_x triple flip, correlated z-rotation angles.

    `permutation[k]` names the input qubit that lands on output qubit k.
    """

    permutation: tuple[int, int, int] = (0, 1, 2)
    flip: bool = False
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self) -> None:
        if tuple(sorted(self.permutation)) != (0, 1, 2):
            raise ValidationError(f"not a permutation of three qubits: {self.permutation!r}")


@dataclass
class OptimalWitnessResult:
    witness: Witness
    threshold: float
    target_class: SloccClass
    crossing_v: float | None = None
    mirrored: bool = False
