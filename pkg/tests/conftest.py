from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import strategies as st

from src.geometry import SQRT3, Y_MAX, Y_MIN
from src.linalg import make_density_matrix
from src.models import DensityMatrix, SymCoords


def random_density_matrix(rng: np.random.Generator, rank: int = 8) -> DensityMatrix:
    """Ginibre construction: G G^H / tr(G G^H) with an 8 x rank complex Gaussian G."""
    g = rng.normal(size=(8, rank)) + 1j * rng.normal(size=(8, rank))
    m = g @ g.conj().T
    return make_density_matrix(m / np.trace(m).real)


def triangle_points(rng: np.random.Generator, n: int) -> list[SymCoords]:
    """Uniform samples of the triangle via barycentric folding."""
    corners = np.array([[0.0, Y_MIN], [0.5, Y_MAX], [-0.5, Y_MAX]])
    u = rng.random((n, 2))
    fold = u.sum(axis=1) > 1.0
    u[fold] = 1.0 - u[fold]
    points = corners[0] + u[:, :1] * (corners[1] - corners[0]) + u[:, 1:] * (corners[2] - corners[0])
    return [SymCoords(float(x), float(y)) for x, y in points]


@st.composite
def triangle_coords(draw: st.DrawFn) -> SymCoords:
    y = draw(st.floats(min_value=Y_MIN, max_value=Y_MAX, allow_nan=False))
    limit = max(SQRT3 * y / 2.0 + 1.0 / 8.0, 0.0)
    t = draw(st.floats(min_value=-1.0, max_value=1.0, allow_nan=False))
    return SymCoords(t * limit, y)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def random_states(rng: np.random.Generator) -> list[DensityMatrix]:
    return [random_density_matrix(rng, rank=int(rng.integers(1, 9))) for _ in range(20)]


@pytest.fixture
def pseudo_pure_coords() -> list[SymCoords]:
    return [SymCoords(p / 2.0, SQRT3 * p / 4.0) for p in np.linspace(0.0, 1.0, 11)]


def assert_close(actual: float, expected: float, tol: float) -> None:
    assert math.isclose(actual, expected, abs_tol=tol), f"{actual!r} != {expected!r} (tol {tol})"
