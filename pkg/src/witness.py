from __future__ import annotations

import logging

import numpy as np

from src import geometry
from src.errors import (
    DegenerateWitnessError,
    LineCrossesUninterestingError,
    NoiseNotLowerError,
    TargetNotInClassError,
    ValidationError,
)
from src.geometry import CLASS_TOLERANCE, SQRT3
from src.linalg import IDENTITY8, expectation
from src.models import ComplexMatrix8, DensityMatrix, Line, MixingLine, OptimalWitnessResult, SloccClass, SymCoords, Witness

logger = logging.getLogger(__name__)

OPTIMALITY_TOLERANCE = 1e-9

_PI_GHZ_PLUS = np.zeros((8, 8), dtype=np.complex128)
_PI_GHZ_PLUS[np.ix_([0, 7], [0, 7])] = 0.5
_PI_GHZ_MINUS = _PI_GHZ_PLUS.copy()
_PI_GHZ_MINUS[0, 7] = _PI_GHZ_MINUS[7, 0] = -0.5


def expectation_sym(w: Witness, c: SymCoords) -> float:
    geometry.require_in_triangle(c)
    return (w.b - w.c) * c.x + (SQRT3 / 2.0) * (w.b + w.c) * c.y + w.a + (w.b + w.c) / 8.0


def to_matrix(w: Witness) -> ComplexMatrix8:
    return w.a * IDENTITY8 + w.b * _PI_GHZ_PLUS + w.c * _PI_GHZ_MINUS


def zero_line(w: Witness) -> Line:
    if w.b == 0.0 and w.c == 0.0:
        raise DegenerateWitnessError(f"witness {w.as_tuple()} is a multiple of the identity and has no zero-line")
    return Line(w.b - w.c, SQRT3 * (w.b + w.c) / 2.0, w.origin_value).normalized()


def witness_from_line(l: Line, uninteresting: SloccClass) -> Witness:
    """GHZ-symmetric witness vanishing on `l`, unique up to a positive factor."""
    unit = l.normalized()
    if unit.gamma <= 0.0:
        raise LineCrossesUninterestingError("line passes through the maximally mixed state")
    minimum = geometry.support_minimum(unit, uninteresting)
    if minimum < -CLASS_TOLERANCE:
        raise LineCrossesUninterestingError(
            f"line cuts into the {uninteresting.label} region: min functional = {minimum:.3e}"
        )
    b_plus_c = 2.0 * unit.beta / SQRT3
    b = (unit.alpha + b_plus_c) / 2.0
    c = (b_plus_c - unit.alpha) / 2.0
    return Witness(unit.gamma - b_plus_c / 8.0, b, c)


def bisep_sep_witness() -> Witness:
    return Witness(1.0, -4.0, 2.0)


def genuine_witness() -> Witness:
    return Witness(0.5, -1.0, 0.0)


def projection_witness() -> Witness:
    return Witness(0.75, -1.0, 0.0)


def ghz_tangent_witness(v0: float) -> Witness:
    """Optimal GHZ-class witness tangent to the GHZ/W boundary at parameter v0."""
    v0 = float(v0)
    if not abs(v0) <= 1.0:
        raise ValidationError(f"boundary parameter must satisfy |v| <= 1, got {v0!r}")
    return Witness(0.75, -3.0 / (v0 * v0 - 2.0 * v0 + 4.0), -3.0 / (v0 * v0 + 2.0 * v0 + 4.0))


def mirror(w: Witness) -> Witness:
    return Witness(w.a, w.c, w.b)


def witness_for_class(target_class: SloccClass, v0: float | None = None, mirrored: bool = False) -> Witness:
    if target_class is SloccClass.BISEPARABLE:
        w = bisep_sep_witness()
    elif target_class is SloccClass.W:
        w = genuine_witness()
    elif target_class is SloccClass.GHZ:
        if v0 is None:
            raise ValidationError("GhzClass witness needs the boundary parameter v0")
        w = ghz_tangent_witness(v0)
    else:
        raise ValidationError("there is no class below Separable to separate from")
    return mirror(w) if mirrored else w


def detection_threshold(w: Witness, line: MixingLine) -> float | None:
    """Smallest p with negative expectation on (p, 1]; None if the target is not detected."""
    e0 = expectation_sym(w, line.noise)
    e1 = expectation_sym(w, line.target)
    if e1 >= 0.0:
        return None
    if e0 <= 0.0:
        return 0.0
    return e0 / (e0 - e1)


def solve_optimal_witness(line: MixingLine, target_class: SloccClass) -> OptimalWitnessResult:
    if target_class is SloccClass.SEPARABLE:
        raise ValidationError("target class must be Biseparable, WClass or GhzClass")
    bound = SloccClass(target_class - 1)
    found = geometry.classify(line.target)
    if found < target_class:
        raise TargetNotInClassError(f"target {line.target} is {found.label}, not at least {target_class.label}")
    noise_class = geometry.classify(line.noise)
    if noise_class > bound:
        raise NoiseNotLowerError(f"noise {line.noise} is {noise_class.label}, must be at most {bound.label}")

    mirrored = line.target.x < 0.0
    v0 = geometry.curve_crossing(line) if target_class is SloccClass.GHZ else None
    w = witness_for_class(target_class, v0=v0, mirrored=mirrored)
    threshold = detection_threshold(w, line)
    if threshold is None:
        raise TargetNotInClassError(f"target {line.target} sits on the {bound.label} border and is not detected")
    logger.info(
        "optimal witness: class=%s a=%.12g b=%.12g c=%.12g threshold=%.12g v0=%s mirrored=%s",
        target_class.label,
        w.a,
        w.b,
        w.c,
        threshold,
        "-" if v0 is None else f"{v0:.12g}",
        mirrored,
    )
    return OptimalWitnessResult(witness=w, threshold=threshold, target_class=target_class, crossing_v=v0, mirrored=mirrored)


def optimal_witness_for_noise(line: MixingLine, target_class: SloccClass) -> tuple[Witness, float]:
    result = solve_optimal_witness(line, target_class)
    return result.witness, result.threshold


def detects(w: Witness, rho: DensityMatrix) -> bool:
    return expectation(to_matrix(w), rho) < 0.0


def is_optimal_for_symmetric(w: Witness, bound: SloccClass) -> bool:
    """Zero-line touches the region {classify <= bound} without cutting into it."""
    minimum = geometry.support_minimum(zero_line(w), bound)
    return -OPTIMALITY_TOLERANCE <= minimum <= OPTIMALITY_TOLERANCE


def is_optimal_on_line(w: Witness, line: MixingLine, bound: SloccClass) -> bool:
    """No interesting state on `line` escapes detection by `w`."""
    if geometry.support_minimum(zero_line(w), bound) < -OPTIMALITY_TOLERANCE:
        return False
    threshold = detection_threshold(w, line)
    if threshold is None:
        return False
    return abs(threshold - geometry.crossing_parameter(line, bound)) <= OPTIMALITY_TOLERANCE


def full_rank_zero_point(w: Witness) -> SymCoords | None:
    """A strictly interior (full-rank) state on the zero-line, if the line passes through the interior."""
    chord = geometry.clip_line_to_triangle(zero_line(w))
    if chord is None:
        return None
    start, end = chord
    midpoint = SymCoords((start.x + end.x) / 2.0, (start.y + end.y) / 2.0)
    if not geometry.in_triangle(midpoint) or not geometry.is_full_rank(midpoint):
        return None
    return midpoint
