from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.errors import AmbiguousCrossingError, NoCrossingError, OutsideTriangleError, ValidationError
from src.models import Line, MixingLine, SloccClass, SymCoords

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
Y_MIN = -1.0 / (4.0 * SQRT3)
Y_MAX = SQRT3 / 4.0
TRIANGLE_TOLERANCE = 1e-12
CLASS_TOLERANCE = 1e-10
PPT_TOLERANCE = 1e-12
ROOT_TOLERANCE = 1e-12
ON_SEGMENT_TOLERANCE = 1e-10
TANGENT_GRID_STEP = 1e-3
CROSSING_GRID_POINTS = 2001
_DERIVATIVE_STEP = 1e-6

ORIGIN = SymCoords(0.0, 0.0)
GHZ_PLUS_CORNER = SymCoords(0.5, Y_MAX)
GHZ_MINUS_CORNER = SymCoords(-0.5, Y_MAX)
RHO_R_CORNER = SymCoords(0.0, Y_MIN)
APEX = SymCoords(0.0, Y_MAX)
CURVE_END = SymCoords(3.0 / 8.0, 1.0 / (2.0 * SQRT3))

_SEPARABLE_VERTICES = (RHO_R_CORNER, SymCoords(1.0 / 8.0, 0.0), APEX, SymCoords(-1.0 / 8.0, 0.0))
_BISEPARABLE_VERTICES = (
    RHO_R_CORNER,
    SymCoords(0.25, 1.0 / (4.0 * SQRT3)),
    APEX,
    SymCoords(-0.25, 1.0 / (4.0 * SQRT3)),
)
_TRIANGLE_VERTICES = (RHO_R_CORNER, GHZ_PLUS_CORNER, GHZ_MINUS_CORNER)


def triangle_x_limit(y: float) -> float:
    return SQRT3 * y / 2.0 + 1.0 / 8.0


def in_triangle(c: SymCoords) -> bool:
    return (
        Y_MIN - TRIANGLE_TOLERANCE <= c.y <= Y_MAX + TRIANGLE_TOLERANCE
        and abs(c.x) <= triangle_x_limit(c.y) + TRIANGLE_TOLERANCE
    )


def require_in_triangle(c: SymCoords) -> None:
    if not in_triangle(c):
        raise OutsideTriangleError(f"point ({c.x!r}, {c.y!r}) is outside the triangle of GHZ-symmetric states")


def snap_to_triangle(c: SymCoords, tol: float) -> SymCoords:
    """Clamp a point lying within `tol` of the triangle onto it."""
    if in_triangle(c):
        return c
    y = min(max(c.y, Y_MIN), Y_MAX)
    limit = max(triangle_x_limit(y), 0.0)
    x = min(max(c.x, -limit), limit)
    distance = math.hypot(c.x - x, c.y - y)
    if distance > tol:
        raise OutsideTriangleError(
            f"point ({c.x!r}, {c.y!r}) is outside the triangle by {distance:.3e} (snap tolerance {tol:.1e})"
        )
    logger.warning("coordinates snapped onto triangle: x=%r y=%r -> x=%r y=%r", c.x, c.y, x, y)
    return SymCoords(x, y)


# GHZ/W boundary curve. The private helpers accept any |v| < 2 so that
# derivative stencils may step slightly past the ends.


def _curve_x(v: ArrayLike) -> NDArray[np.float64]:
    v = np.asarray(v, dtype=np.float64)
    return (v**5 + 8.0 * v**3) / (8.0 * (4.0 - v**2))


def _curve_y(v: ArrayLike) -> NDArray[np.float64]:
    v = np.asarray(v, dtype=np.float64)
    return (SQRT3 / 4.0) * (4.0 - v**2 - v**4) / (4.0 - v**2)


def _curve_dx(v: ArrayLike) -> NDArray[np.float64]:
    v = np.asarray(v, dtype=np.float64)
    return 3.0 * v**2 * (32.0 + 4.0 * v**2 - v**4) / (8.0 * (4.0 - v**2) ** 2)


def _curve_dy(v: ArrayLike) -> NDArray[np.float64]:
    v = np.asarray(v, dtype=np.float64)
    return -(SQRT3 / 2.0) * v**3 * (8.0 - v**2) / (4.0 - v**2) ** 2


def _tangent_direction(v: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Curve velocity divided by v^2/(4 - v^2)^2; nonzero at the apex v = 0."""
    v = np.asarray(v, dtype=np.float64)
    return 3.0 * (32.0 + 4.0 * v**2 - v**4) / 8.0, -(SQRT3 / 2.0) * v * (8.0 - v**2)


def _tangent_direction_derivative(v: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    v = np.asarray(v, dtype=np.float64)
    return 1.5 * v * (2.0 - v**2), -(SQRT3 / 2.0) * (8.0 - 3.0 * v**2)


def _tangent_coefficients(v: ArrayLike) -> tuple[NDArray, NDArray, NDArray]:
    """Unit-normal tangent lines (alpha, beta, gamma), origin side positive."""
    tx, ty = _tangent_direction(v)
    norm = np.hypot(tx, ty)
    alpha = ty / norm
    beta = -tx / norm
    gamma = -(alpha * _curve_x(v) + beta * _curve_y(v))
    return alpha, beta, gamma


def _require_boundary_param(v: float) -> float:
    v = float(v)
    if not abs(v) <= 1.0:
        raise ValidationError(f"boundary parameter must satisfy |v| <= 1, got {v!r}")
    return v


def boundary_point(v: float) -> SymCoords:
    v = _require_boundary_param(v)
    return SymCoords(float(_curve_x(v)), float(_curve_y(v)))


def boundary_tangent(v: float) -> Line:
    v = _require_boundary_param(v)
    alpha, beta, gamma = _tangent_coefficients(v)
    return Line(float(alpha), float(beta), float(gamma)).normalized()


_TANGENT_GRID = np.linspace(-1.0, 1.0, int(round(2.0 / TANGENT_GRID_STEP)) + 1)
_TANGENT_ALPHA, _TANGENT_BETA, _TANGENT_GAMMA = _tangent_coefficients(_TANGENT_GRID)


def _refine_minimum(
    value: Callable[[float], float],
    derivative: Callable[[float], float],
    lo: float,
    hi: float,
    start: float,
    best: float,
) -> tuple[float, float]:
    """Safeguarded Newton on the derivative inside [lo, hi]; returns the lowest sampled value."""
    v = start
    best_v = start
    for _ in range(60):
        d1 = derivative(v)
        d2 = (derivative(v + _DERIVATIVE_STEP) - derivative(v - _DERIVATIVE_STEP)) / (2.0 * _DERIVATIVE_STEP)
        if d1 > 0.0:
            hi = v
        else:
            lo = v
        candidate = v - d1 / d2 if d2 > 0.0 else math.nan
        if not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        current = value(candidate)
        if current < best:
            best, best_v = current, candidate
        if abs(candidate - v) < 1e-14 or hi - lo < 1e-14:
            break
        v = candidate
    return best, best_v


def _minimize_over_curve(
    values: NDArray[np.float64],
    value: Callable[[float], float],
    derivative: Callable[[float], float],
) -> tuple[float, float]:
    index = int(np.argmin(values))
    lo = float(_TANGENT_GRID[max(index - 1, 0)])
    hi = float(_TANGENT_GRID[min(index + 1, len(_TANGENT_GRID) - 1)])
    start = float(_TANGENT_GRID[index])
    return _refine_minimum(value, derivative, lo, hi, start, float(values[index]))


def min_tangent_functional(c: SymCoords) -> tuple[float, float]:
    """Minimum over v in [-1, 1] of the origin-positive tangent functional at c, and its argmin."""
    values = _TANGENT_ALPHA * c.x + _TANGENT_BETA * c.y + _TANGENT_GAMMA

    def value(v: float) -> float:
        alpha, beta, gamma = _tangent_coefficients(v)
        return float(alpha * c.x + beta * c.y + gamma)

    def derivative(v: float) -> float:
        tx, ty = _tangent_direction(v)
        dtx, dty = _tangent_direction_derivative(v)
        norm = math.hypot(float(tx), float(ty))
        ux = c.x - float(_curve_x(v))
        uy = c.y - float(_curve_y(v))
        f = (float(ty) * ux - float(tx) * uy) / norm
        return (float(dty) * ux - float(dtx) * uy) / norm - f * (float(ty * dty + tx * dtx)) / norm**2

    return _minimize_over_curve(values, value, derivative)


def _in_at_most_w(c: SymCoords) -> bool:
    minimum, _ = min_tangent_functional(c)
    return minimum >= -CLASS_TOLERANCE


def classify(c: SymCoords) -> SloccClass:
    require_in_triangle(c)
    ax = abs(c.x)
    if ax <= 1.0 / 8.0 - c.y / (2.0 * SQRT3) + CLASS_TOLERANCE:
        return SloccClass.SEPARABLE
    if -2.0 * ax - SQRT3 * c.y + 0.75 >= -CLASS_TOLERANCE:
        return SloccClass.BISEPARABLE
    if _in_at_most_w(c):
        return SloccClass.W
    return SloccClass.GHZ


def classify_grid(xs: ArrayLike, ys: ArrayLike, chunk: int = 2048) -> NDArray[np.int64]:
    """Vectorized classify for rasterization; points outside the triangle map to -1."""
    x = np.asarray(xs, dtype=np.float64).ravel()
    y = np.asarray(ys, dtype=np.float64).ravel()
    ax = np.abs(x)
    result = np.full(x.shape, int(SloccClass.GHZ), dtype=np.int64)

    inside = (
        (y >= Y_MIN - TRIANGLE_TOLERANCE)
        & (y <= Y_MAX + TRIANGLE_TOLERANCE)
        & (ax <= SQRT3 * y / 2.0 + 1.0 / 8.0 + TRIANGLE_TOLERANCE)
    )
    min_tangent = np.empty(x.shape)
    for start in range(0, x.size, chunk):
        stop = start + chunk
        block = (
            _TANGENT_ALPHA[:, None] * x[None, start:stop]
            + _TANGENT_BETA[:, None] * y[None, start:stop]
            + _TANGENT_GAMMA[:, None]
        )
        min_tangent[start:stop] = block.min(axis=0)

    result[min_tangent >= -CLASS_TOLERANCE] = int(SloccClass.W)
    result[-2.0 * ax - SQRT3 * y + 0.75 >= -CLASS_TOLERANCE] = int(SloccClass.BISEPARABLE)
    result[ax <= 1.0 / 8.0 - y / (2.0 * SQRT3) + CLASS_TOLERANCE] = int(SloccClass.SEPARABLE)
    result[~inside] = -1
    return result.reshape(np.shape(xs))


def is_ppt(c: SymCoords) -> bool:
    require_in_triangle(c)
    return 1.0 / 8.0 - c.y / (2.0 * SQRT3) - abs(c.x) >= -PPT_TOLERANCE


def is_full_rank(c: SymCoords) -> bool:
    require_in_triangle(c)
    return (
        c.y < Y_MAX - TRIANGLE_TOLERANCE
        and c.y > Y_MIN + TRIANGLE_TOLERANCE
        and abs(c.x) < triangle_x_limit(c.y) - TRIANGLE_TOLERANCE
    )


def support_minimum(line: Line, bound: SloccClass) -> float:
    """Minimum of the normalized line functional over the region {classify <= bound}."""
    unit = line.normalized()
    if bound is SloccClass.SEPARABLE:
        return min(unit.value(p) for p in _SEPARABLE_VERTICES)
    if bound is SloccClass.BISEPARABLE:
        return min(unit.value(p) for p in _BISEPARABLE_VERTICES)
    if bound is SloccClass.GHZ:
        return min(unit.value(p) for p in _TRIANGLE_VERTICES)

    def value(v: float) -> float:
        return float(unit.alpha * _curve_x(v) + unit.beta * _curve_y(v) + unit.gamma)

    def derivative(v: float) -> float:
        return float(unit.alpha * _curve_dx(v) + unit.beta * _curve_dy(v))

    values = unit.alpha * _curve_x(_TANGENT_GRID) + unit.beta * _curve_y(_TANGENT_GRID) + unit.gamma
    curve_min, _ = _minimize_over_curve(values, value, derivative)
    return min(curve_min, unit.value(RHO_R_CORNER))


def line_curve_intersection(p0: SymCoords, p1: SymCoords) -> float:
    """Parameter v0 in [0, 1] where the segment p0-p1 meets the GHZ/W boundary curve."""
    dx = p1.x - p0.x
    dy = p1.y - p0.y
    length = math.hypot(dx, dy)
    if length == 0.0:
        raise NoCrossingError("segment endpoints coincide")
    zero = ROOT_TOLERANCE * length

    def crossing(v: float) -> float:
        return float((_curve_x(v) - p0.x) * dy - (_curve_y(v) - p0.y) * dx)

    def crossing_derivative(v: float) -> float:
        return float(_curve_dx(v) * dy - _curve_dy(v) * dx)

    grid = np.linspace(0.0, 1.0, CROSSING_GRID_POINTS)
    values = (_curve_x(grid) - p0.x) * dy - (_curve_y(grid) - p0.y) * dx
    near_zero = np.abs(values) <= zero

    roots: list[float] = []
    for i in range(len(grid)):
        if near_zero[i]:
            if not roots or grid[i] - roots[-1] > 2.0 * (grid[1] - grid[0]):
                roots.append(float(grid[i]))
            continue
        if i + 1 < len(grid) and not near_zero[i + 1] and values[i] * values[i + 1] < 0.0:
            roots.append(_bisect_root(crossing, crossing_derivative, float(grid[i]), float(grid[i + 1])))

    on_segment = []
    for v in roots:
        point = boundary_point(v)
        t = ((point.x - p0.x) * dx + (point.y - p0.y) * dy) / length**2
        if -ON_SEGMENT_TOLERANCE <= t <= 1.0 + ON_SEGMENT_TOLERANCE:
            on_segment.append(v)

    logger.debug("line-curve roots: candidates=%d on_segment=%d", len(roots), len(on_segment))
    if not on_segment:
        raise NoCrossingError(f"segment ({p0.x}, {p0.y})-({p1.x}, {p1.y}) does not cross the GHZ/W boundary")
    if len(on_segment) > 1:
        raise AmbiguousCrossingError(f"segment crosses the GHZ/W boundary {len(on_segment)} times: {on_segment}")
    logger.info("line-curve crossing found: v0=%.12f brackets=%d", on_segment[0], len(roots))
    return on_segment[0]


def _bisect_root(
    fn: Callable[[float], float],
    derivative: Callable[[float], float],
    lo: float,
    hi: float,
) -> float:
    f_lo = fn(lo)
    while hi - lo > ROOT_TOLERANCE:
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    v = 0.5 * (lo + hi)
    slope = derivative(v)
    if slope != 0.0:
        polished = v - fn(v) / slope
        # Newton polish only if it stays in the bracket and improves the residual
        if lo <= polished <= hi and abs(fn(polished)) < abs(fn(v)):
            v = polished
    return v


def curve_crossing(line: MixingLine) -> float:
    """Boundary parameter v0 >= 0 where `line`, mirrored to the target's x >= 0 half, meets the curve."""
    sign = -1.0 if line.target.x < 0.0 else 1.0
    start = SymCoords(sign * line.noise.x, line.noise.y)
    end = SymCoords(sign * line.target.x, line.target.y)
    if start.x < 0.0:
        # all x = 0 states are separable, so the segment enters the x >= 0 half below the curve
        s = -start.x / (end.x - start.x)
        start = SymCoords(0.0, start.y + s * (end.y - start.y))
    return line_curve_intersection(start, end)


def crossing_parameter(line: MixingLine, bound: SloccClass) -> float:
    """Mixing parameter p at which `line` leaves the region {classify <= bound}."""
    if bound is SloccClass.GHZ:
        raise ValidationError("no state lies above the GhzClass region")
    noise, target = line.noise, line.target
    sign = -1.0 if target.x < 0.0 else 1.0
    nx = sign * noise.x
    dx, dy = sign * target.x - nx, target.y - noise.y

    if bound is SloccClass.W:
        point = boundary_point(curve_crossing(line))
        return ((point.x - nx) * dx + (point.y - noise.y) * dy) / (dx * dx + dy * dy)

    # polygon edge on the target side: x = k0 - k1 * y
    k0, k1 = (1.0 / 8.0, 1.0 / (2.0 * SQRT3)) if bound is SloccClass.SEPARABLE else (3.0 / 8.0, SQRT3 / 2.0)
    denominator = dx + k1 * dy
    if denominator == 0.0:
        raise NoCrossingError("mixing line runs parallel to the class boundary")
    return (k0 - nx - k1 * noise.y) / denominator


def clip_line_to_triangle(line: Line) -> tuple[SymCoords, SymCoords] | None:
    """Chord of the triangle cut out by `line`, or None if the line misses it."""
    unit = line.normalized()
    anchor = (-unit.gamma * unit.alpha, -unit.gamma * unit.beta)
    direction = (-unit.beta, unit.alpha)
    t_lo, t_hi = -math.inf, math.inf
    # half-planes n . p + k >= 0: below the top edge, inside the right and left edges
    for nx, ny, k in ((0.0, -1.0, Y_MAX), (-1.0, SQRT3 / 2.0, 1.0 / 8.0), (1.0, SQRT3 / 2.0, 1.0 / 8.0)):
        offset = nx * anchor[0] + ny * anchor[1] + k
        rate = nx * direction[0] + ny * direction[1]
        if rate == 0.0:
            if offset < 0.0:
                return None
            continue
        bound = -offset / rate
        if rate > 0.0:
            t_lo = max(t_lo, bound)
        else:
            t_hi = min(t_hi, bound)
    if not t_lo <= t_hi:
        return None
    return (
        SymCoords(anchor[0] + t_lo * direction[0], anchor[1] + t_lo * direction[1]),
        SymCoords(anchor[0] + t_hi * direction[0], anchor[1] + t_hi * direction[1]),
    )


def boundary_samples(n: int, lo: float = -1.0, hi: float = 1.0) -> tuple[NDArray, NDArray, NDArray]:
    """n uniformly spaced parameters on [lo, hi] with the boundary coordinates at each."""
    if n < 2:
        raise ValidationError(f"need at least 2 boundary samples, got {n!r}")
    if not -1.0 <= lo < hi <= 1.0:
        raise ValidationError(f"boundary parameter range must lie in [-1, 1], got [{lo!r}, {hi!r}]")
    v = np.linspace(lo, hi, n)
    return v, _curve_x(v), _curve_y(v)
