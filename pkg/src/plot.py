from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import Polygon
from numpy.typing import NDArray

from src import geometry
from src.geometry import APEX, CURVE_END, GHZ_MINUS_CORNER, GHZ_PLUS_CORNER, ORIGIN, RHO_R_CORNER, SQRT3, Y_MAX, Y_MIN
from src.models import SloccClass, SymCoords, Witness
from src.witness import zero_line

logger = logging.getLogger(__name__)

VIEWPORT_POINTS = (1000.0, 900.0)
AREA_CHECK_RESOLUTION = 400
AREA_CHECK_TOLERANCE = 0.005
SVG_HASH_SALT = "ghz-witness"

REGION_COLORS: dict[SloccClass, str] = {
    SloccClass.GHZ: "#b3b3b3",
    SloccClass.W: "#f5e050",
    SloccClass.BISEPARABLE: "#86c98a",
    SloccClass.SEPARABLE: "#6fa3d9",
}
PSEUDO_PURE_COLOR = "#e020e0"
WITNESS_COLORS = ("#c0392b", "#2c3e50", "#8e44ad", "#d35400", "#16a085")

_BISEPARABLE_RIGHT = SymCoords(0.25, 1.0 / (4.0 * SQRT3))
_SEPARABLE_RIGHT = SymCoords(1.0 / 8.0, 0.0)


@dataclass(frozen=True)
class RegionPolygon:
    slocc_class: SloccClass
    vertices: NDArray[np.float64]


@dataclass
class PlotOverlays:
    states: list[tuple[str, SymCoords]] = field(default_factory=list)
    witnesses: list[Witness] = field(default_factory=list)
    pseudo_pure: bool = False


@dataclass(frozen=True)
class AreaCheck:
    polygon_areas: dict[SloccClass, float]
    raster_areas: dict[SloccClass, float]
    triangle_area: float

    @property
    def coverage_error(self) -> float:
        """|sum of region areas - triangle area| relative to the triangle."""
        return abs(sum(self.polygon_areas.values()) - self.triangle_area) / self.triangle_area

    @property
    def max_discrepancy(self) -> float:
        return max(
            abs(self.polygon_areas[k] - self.raster_areas[k]) / self.triangle_area for k in self.polygon_areas
        )

    @property
    def ok(self) -> bool:
        return self.coverage_error <= AREA_CHECK_TOLERANCE and self.max_discrepancy <= AREA_CHECK_TOLERANCE


def _points(*corners: SymCoords) -> NDArray[np.float64]:
    return np.array([[c.x, c.y] for c in corners], dtype=np.float64)


def _mirror(vertices: NDArray[np.float64]) -> NDArray[np.float64]:
    return vertices * np.array([-1.0, 1.0])


def region_polygons(curve_samples: int) -> list[RegionPolygon]:
    """Polygons tiling the triangle, two mirror pieces per entangled class; the curve uses `curve_samples` points per half."""
    _, xs, ys = geometry.boundary_samples(curve_samples, 0.0, 1.0)
    curve = np.column_stack([xs, ys])

    ghz_right = np.vstack([_points(APEX, GHZ_PLUS_CORNER), curve[::-1]])
    w_right = np.vstack([curve, _points(_BISEPARABLE_RIGHT)])
    biseparable_right = _points(_SEPARABLE_RIGHT, _BISEPARABLE_RIGHT, APEX)
    separable = _points(RHO_R_CORNER, _SEPARABLE_RIGHT, APEX, SymCoords(-_SEPARABLE_RIGHT.x, 0.0))

    polygons = [RegionPolygon(SloccClass.SEPARABLE, separable)]
    for slocc_class, right in (
        (SloccClass.BISEPARABLE, biseparable_right),
        (SloccClass.W, w_right),
        (SloccClass.GHZ, ghz_right),
    ):
        polygons.append(RegionPolygon(slocc_class, right))
        polygons.append(RegionPolygon(slocc_class, _mirror(right)))
    return polygons


def polygon_area(vertices: NDArray[np.float64]) -> float:
    """Shoelace area of a simple polygon."""
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def triangle_area() -> float:
    return polygon_area(_points(RHO_R_CORNER, GHZ_PLUS_CORNER, GHZ_MINUS_CORNER))


def rasterized_areas(resolution: int = AREA_CHECK_RESOLUTION) -> dict[SloccClass, float]:
    """Region areas from classify_grid on cell centres of the triangle's bounding box."""
    dx = 1.0 / resolution
    dy = (Y_MAX - Y_MIN) / resolution
    xs = -0.5 + dx * (np.arange(resolution) + 0.5)
    ys = Y_MIN + dy * (np.arange(resolution) + 0.5)
    grid_x, grid_y = np.meshgrid(xs, ys)
    classes = geometry.classify_grid(grid_x, grid_y)
    return {k: float(np.count_nonzero(classes == int(k))) * dx * dy for k in SloccClass}


def area_self_check(curve_samples: int, resolution: int = AREA_CHECK_RESOLUTION) -> AreaCheck:
    polygon_areas = {k: 0.0 for k in SloccClass}
    for polygon in region_polygons(curve_samples):
        polygon_areas[polygon.slocc_class] += polygon_area(polygon.vertices)
    check = AreaCheck(polygon_areas, rasterized_areas(resolution), triangle_area())
    for k in SloccClass:
        logger.debug(
            "region area: class=%s polygon=%.6f raster=%.6f", k.label, check.polygon_areas[k], check.raster_areas[k]
        )
    logger.info(
        "area self-check: coverage_error=%.2e max_discrepancy=%.2e ok=%s",
        check.coverage_error,
        check.max_discrepancy,
        check.ok,
    )
    return check


def render_svg(path: Path, overlays: PlotOverlays, curve_samples: int) -> None:
    width, height = VIEWPORT_POINTS
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig = Figure(figsize=(width / 72.0, height / 72.0), dpi=72)
        ax = fig.add_axes((0.06, 0.06, 0.9, 0.9))
        ax.set_aspect("equal")
        ax.set_xlim(-0.55, 0.55)
        ax.set_ylim(Y_MIN - 0.05, Y_MAX + 0.05)
        ax.set_xlabel("x")
        ax.set_ylabel("y")

        drawn: set[SloccClass] = set()
        for polygon in region_polygons(curve_samples):
            label = None if polygon.slocc_class in drawn else polygon.slocc_class.label
            drawn.add(polygon.slocc_class)
            ax.add_patch(
                Polygon(polygon.vertices, closed=True, facecolor=REGION_COLORS[polygon.slocc_class], edgecolor="none", label=label)
            )
        ax.add_patch(
            Polygon(_points(RHO_R_CORNER, GHZ_PLUS_CORNER, GHZ_MINUS_CORNER), closed=True, fill=False, edgecolor="black", linewidth=1.0)
        )

        if overlays.pseudo_pure:
            ax.plot([ORIGIN.x, GHZ_PLUS_CORNER.x], [ORIGIN.y, GHZ_PLUS_CORNER.y], color=PSEUDO_PURE_COLOR, linewidth=2.0, label="pseudo-pure")

        for index, w in enumerate(overlays.witnesses):
            chord = geometry.clip_line_to_triangle(zero_line(w))
            if chord is None:
                logger.warning("witness zero-line misses the triangle: a=%r b=%r c=%r", w.a, w.b, w.c)
                continue
            start, end = chord
            ax.plot(
                [start.x, end.x],
                [start.y, end.y],
                color=WITNESS_COLORS[index % len(WITNESS_COLORS)],
                linestyle="--",
                linewidth=1.5,
                label=f"witness ({w.a:.6g}, {w.b:.6g}, {w.c:.6g})",
            )

        for label, point in overlays.states:
            ax.plot([point.x], [point.y], marker="o", color="black", markersize=5, linestyle="none")
            ax.annotate(label, (point.x, point.y), textcoords="offset points", xytext=(6, 4), fontsize=9)

        ax.annotate("GHZ+", (GHZ_PLUS_CORNER.x, GHZ_PLUS_CORNER.y), textcoords="offset points", xytext=(-10, 6), fontsize=9)
        ax.annotate("GHZ-", (GHZ_MINUS_CORNER.x, GHZ_MINUS_CORNER.y), textcoords="offset points", xytext=(-10, 6), fontsize=9)
        ax.annotate("rho_r", (RHO_R_CORNER.x, RHO_R_CORNER.y), textcoords="offset points", xytext=(6, -10), fontsize=9)
        ax.plot([CURVE_END.x, -CURVE_END.x], [CURVE_END.y, CURVE_END.y], marker=".", color="black", linestyle="none")
        ax.legend(loc="lower right", fontsize=9, frameon=False)

        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info("svg written: path=%s witnesses=%d states=%d", path, len(overlays.witnesses), len(overlays.states))
