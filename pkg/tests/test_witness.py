from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import (
    DegenerateWitnessError,
    LineCrossesUninterestingError,
    NoiseNotLowerError,
    OutsideTriangleError,
    TargetNotInClassError,
    ValidationError,
    WitnessSignError,
)
from src.geometry import (
    CURVE_END,
    GHZ_MINUS_CORNER,
    GHZ_PLUS_CORNER,
    ORIGIN,
    RHO_R_CORNER,
    SQRT3,
    Y_MAX,
    boundary_point,
    boundary_tangent,
    classify,
    in_triangle,
    is_full_rank,
)
from src.linalg import IDENTITY8, expectation
from src.models import Line, MixingLine, SloccClass, SymCoords, Witness
from src.states import ghz_state, maximally_mixed, projector
from src.symmetry import reconstruct_state, twirl_coordinates
from src.witness import (
    bisep_sep_witness,
    detection_threshold,
    detects,
    expectation_sym,
    full_rank_zero_point,
    genuine_witness,
    ghz_tangent_witness,
    is_optimal_for_symmetric,
    is_optimal_on_line,
    mirror,
    optimal_witness_for_noise,
    projection_witness,
    solve_optimal_witness,
    to_matrix,
    witness_for_class,
    witness_from_line,
    zero_line,
)
from tests.conftest import random_density_matrix, triangle_coords, triangle_points

V_WS = 0.980701
PSEUDO_PURE = MixingLine(ORIGIN, GHZ_PLUS_CORNER)
RHO_R_LINE = MixingLine(RHO_R_CORNER, GHZ_PLUS_CORNER)


@st.composite
def witnesses(draw: st.DrawFn) -> Witness:
    b = draw(st.floats(min_value=-5.0, max_value=5.0, allow_nan=False))
    c = draw(st.floats(min_value=-5.0, max_value=5.0, allow_nan=False))
    margin = draw(st.floats(min_value=0.01, max_value=5.0, allow_nan=False))
    return Witness(margin - (b + c) / 8.0, b, c)


def assert_proportional(w: Witness, reference: Witness, spread: float = 1e-12) -> None:
    ratios = [
        value / ref for value, ref in zip(w.as_tuple(), reference.as_tuple()) if abs(ref) > 1e-15
    ]
    assert all(r > 0.0 for r in ratios)
    assert max(ratios) - min(ratios) <= spread * max(ratios)
    for value, ref in zip(w.as_tuple(), reference.as_tuple()):
        if abs(ref) <= 1e-15:
            assert abs(value) <= 1e-12


class TestWitnessType:
    def test_sign_convention(self):
        with pytest.raises(WitnessSignError):
            Witness(0.0, -1.0, 0.0)

    def test_origin_value(self):
        assert bisep_sep_witness().origin_value == pytest.approx(0.75)


class TestExpectation:
    def test_examples(self):
        assert expectation_sym(bisep_sep_witness(), ORIGIN) == pytest.approx(0.75)
        assert expectation_sym(genuine_witness(), GHZ_PLUS_CORNER) == pytest.approx(-0.5)
        assert expectation_sym(bisep_sep_witness(), SymCoords(1.0 / 8.0, 0.0)) == pytest.approx(0.0, abs=1e-15)
        assert expectation_sym(bisep_sep_witness(), SymCoords(0.0, Y_MAX)) == pytest.approx(0.0, abs=1e-15)
        assert expectation_sym(bisep_sep_witness(), GHZ_PLUS_CORNER) == pytest.approx(-3.0)
        assert expectation_sym(genuine_witness(), SymCoords(0.25, 1.0 / (4.0 * SQRT3))) == pytest.approx(0.0, abs=1e-15)
        assert expectation_sym(genuine_witness(), ORIGIN) == pytest.approx(3.0 / 8.0)
        assert expectation_sym(projection_witness(), CURVE_END) == pytest.approx(0.0, abs=1e-15)
        assert expectation_sym(projection_witness(), ORIGIN) == pytest.approx(5.0 / 8.0)

    @given(witnesses(), triangle_coords())
    @settings(max_examples=200, deadline=None)
    def test_matches_matrix_expectation(self, w: Witness, c: SymCoords):
        full = expectation(to_matrix(w), reconstruct_state(c))
        assert expectation_sym(w, c) == pytest.approx(full, abs=1e-12)

    @given(witnesses(), triangle_coords())
    def test_mirror_covariance(self, w: Witness, c: SymCoords):
        assert expectation_sym(mirror(w), c.mirrored()) == expectation_sym(w, c)

    def test_outside_triangle(self):
        with pytest.raises(OutsideTriangleError):
            expectation_sym(genuine_witness(), SymCoords(0.6, 0.4))


class TestToMatrix:
    def test_identity_and_projector(self):
        np.testing.assert_allclose(to_matrix(Witness(1.0, 0.0, 0.0)), IDENTITY8)
        np.testing.assert_allclose(to_matrix(Witness(0.0, 1.0, 0.0)), projector(ghz_state(1)).matrix, atol=1e-15)
        np.testing.assert_allclose(to_matrix(Witness(0.0, 0.0, 1.0)), projector(ghz_state(-1)).matrix, atol=1e-15)

    def test_tangent_witness_at_curve_end(self):
        expected = (
            0.75 * IDENTITY8 - projector(ghz_state(1)).matrix - (3.0 / 7.0) * projector(ghz_state(-1)).matrix
        )
        np.testing.assert_allclose(to_matrix(ghz_tangent_witness(1.0)), expected, atol=1e-15)


class TestZeroLine:
    def _assert_line(self, line: Line, alpha: float, beta: float, gamma: float):
        expected = Line(alpha, beta, gamma).normalized()
        assert (line.alpha, line.beta, line.gamma) == pytest.approx(
            (expected.alpha, expected.beta, expected.gamma), abs=1e-15
        )

    def test_separable_boundary(self):
        self._assert_line(zero_line(bisep_sep_witness()), -6.0, -SQRT3, 0.75)

    def test_biseparable_boundary(self):
        self._assert_line(zero_line(genuine_witness()), -2.0, -SQRT3, 0.75)

    def test_apex_tangent_is_top_edge(self):
        line = zero_line(Witness(0.75, -0.75, -0.75))
        assert line.alpha == 0.0
        assert -line.gamma / line.beta == pytest.approx(SQRT3 / 4.0)

    def test_degenerate(self):
        with pytest.raises(DegenerateWitnessError):
            zero_line(Witness(1.0, 0.0, 0.0))


class TestWitnessFromLine:
    def test_separable_boundary_line(self):
        line = Line(-1.0, -1.0 / (2.0 * SQRT3), 1.0 / 8.0)
        assert_proportional(witness_from_line(line, SloccClass.SEPARABLE), bisep_sep_witness())

    def test_biseparable_boundary_line(self):
        line = Line(-2.0, -SQRT3, 0.75)
        assert_proportional(witness_from_line(line, SloccClass.BISEPARABLE), genuine_witness())

    @pytest.mark.parametrize("v0", [-1.0, -0.6, -0.1, 0.25, 0.5, V_WS, 1.0])
    def test_boundary_tangent_gives_tangent_witness(self, v0: float):
        assert_proportional(witness_from_line(boundary_tangent(v0), SloccClass.W), ghz_tangent_witness(v0), 1e-10)

    def test_round_trip_through_zero_line(self):
        cases = [
            (bisep_sep_witness(), SloccClass.SEPARABLE),
            (genuine_witness(), SloccClass.BISEPARABLE),
            (projection_witness(), SloccClass.W),
            (ghz_tangent_witness(0.3), SloccClass.W),
        ]
        for w, bound in cases:
            assert_proportional(witness_from_line(zero_line(w), bound), w)

    def test_rejects_cutting_line(self):
        with pytest.raises(LineCrossesUninterestingError):
            witness_from_line(Line(-1.0, 0.0, 0.05), SloccClass.SEPARABLE)

    def test_rejects_line_through_origin(self):
        with pytest.raises(LineCrossesUninterestingError):
            witness_from_line(Line(1.0, 1.0, 0.0), SloccClass.SEPARABLE)


class TestConstructors:
    def test_exact_triples(self):
        assert bisep_sep_witness().as_tuple() == (1.0, -4.0, 2.0)
        assert genuine_witness().as_tuple() == (0.5, -1.0, 0.0)
        assert projection_witness().as_tuple() == (0.75, -1.0, 0.0)

    def test_tangent_witness_examples(self):
        assert ghz_tangent_witness(1.0).as_tuple() == pytest.approx((0.75, -1.0, -3.0 / 7.0), abs=1e-16)
        assert ghz_tangent_witness(V_WS).as_tuple() == pytest.approx((0.75, -0.999876, -0.433327), abs=1e-5)
        assert ghz_tangent_witness(0.0).as_tuple() == (0.75, -0.75, -0.75)

    def test_witness_for_class(self):
        assert witness_for_class(SloccClass.BISEPARABLE) == bisep_sep_witness()
        assert witness_for_class(SloccClass.W, mirrored=True) == mirror(genuine_witness())
        assert witness_for_class(SloccClass.GHZ, v0=1.0) == ghz_tangent_witness(1.0)
        with pytest.raises(ValidationError):
            witness_for_class(SloccClass.GHZ)
        with pytest.raises(ValidationError):
            witness_for_class(SloccClass.SEPARABLE)

    def test_tangent_witness_range(self):
        with pytest.raises(ValidationError):
            ghz_tangent_witness(1.5)

    @given(st.floats(min_value=-1.0, max_value=1.0, allow_nan=False))
    @settings(max_examples=100)
    def test_tangency(self, v0: float):
        assert abs(expectation_sym(ghz_tangent_witness(v0), boundary_point(v0))) <= 1e-12

    def test_mirror(self):
        assert mirror(ghz_tangent_witness(1.0)).as_tuple() == pytest.approx((0.75, -3.0 / 7.0, -1.0))
        w = ghz_tangent_witness(0.4)
        assert mirror(mirror(w)) == w
        assert expectation_sym(mirror(bisep_sep_witness()), GHZ_MINUS_CORNER) < 0.0


class TestPositivity:
    @pytest.fixture(scope="class")
    def samples(self) -> list[tuple[SymCoords, SloccClass]]:
        points = triangle_points(np.random.default_rng(7), 2000)
        return [(c, classify(c)) for c in points]

    @pytest.mark.parametrize(
        "w, bound",
        [
            (bisep_sep_witness(), SloccClass.SEPARABLE),
            (genuine_witness(), SloccClass.BISEPARABLE),
            (projection_witness(), SloccClass.W),
            (ghz_tangent_witness(V_WS), SloccClass.W),
            (ghz_tangent_witness(-0.5), SloccClass.W),
            (ghz_tangent_witness(0.0), SloccClass.W),
        ],
    )
    def test_nonnegative_on_uninteresting_states(self, samples, w: Witness, bound: SloccClass):
        for c, k in samples:
            if k <= bound:
                assert expectation_sym(w, c) >= -1e-10


class TestThresholds:
    @pytest.mark.parametrize(
        "w, expected, tol",
        [
            (bisep_sep_witness(), 0.2, 1e-12),
            (genuine_witness(), 3.0 / 7.0, 1e-12),
            (ghz_tangent_witness(V_WS), 0.69554, 1e-4),
            (projection_witness(), 5.0 / 7.0, 1e-12),
        ],
    )
    def test_pseudo_pure_ladder(self, w: Witness, expected: float, tol: float):
        assert detection_threshold(w, PSEUDO_PURE) == pytest.approx(expected, abs=tol)

    def test_undetected_target(self):
        assert detection_threshold(genuine_witness(), MixingLine(ORIGIN, SymCoords(0.1, 0.0))) is None

    def test_noise_already_detected(self):
        line = MixingLine(SymCoords(0.45, Y_MAX), GHZ_PLUS_CORNER)
        assert detection_threshold(genuine_witness(), line) == 0.0


class TestOptimalWitnessForNoise:
    def test_white_noise_ghz(self):
        w, p = optimal_witness_for_noise(PSEUDO_PURE, SloccClass.GHZ)
        assert w.as_tuple() == pytest.approx((0.75, -0.999876, -0.433327), abs=1e-5)
        assert p == pytest.approx(0.69554, abs=1e-4)

    def test_white_noise_genuine(self):
        w, p = optimal_witness_for_noise(PSEUDO_PURE, SloccClass.W)
        assert w == genuine_witness()
        assert p == pytest.approx(3.0 / 7.0, abs=1e-12)

    def test_white_noise_entanglement(self):
        w, p = optimal_witness_for_noise(PSEUDO_PURE, SloccClass.BISEPARABLE)
        assert w == bisep_sep_witness()
        assert p == pytest.approx(0.2, abs=1e-12)

    def test_rho_r_noise_gives_curve_end_witness(self):
        result = solve_optimal_witness(RHO_R_LINE, SloccClass.GHZ)
        assert result.witness.as_tuple() == pytest.approx((0.75, -1.0, -3.0 / 7.0), abs=1e-12)
        assert result.threshold == pytest.approx(0.75, abs=1e-12)
        assert result.crossing_v == pytest.approx(1.0, abs=1e-12)

    def test_mirrored_target(self):
        result = solve_optimal_witness(MixingLine(ORIGIN, GHZ_MINUS_CORNER), SloccClass.GHZ)
        assert result.mirrored
        assert result.witness.as_tuple() == pytest.approx((0.75, -0.433327, -0.999876), abs=1e-5)
        assert result.threshold == pytest.approx(0.69554, abs=1e-4)

    def test_negative_expectation_beyond_threshold(self):
        w, p = optimal_witness_for_noise(PSEUDO_PURE, SloccClass.GHZ)
        for q in np.linspace(p + 1e-6, 1.0, 25):
            assert expectation_sym(w, PSEUDO_PURE.state(float(q))) < 0.0
        assert expectation_sym(w, PSEUDO_PURE.state(p)) == pytest.approx(0.0, abs=1e-12)

    def test_target_not_in_class(self):
        with pytest.raises(TargetNotInClassError):
            optimal_witness_for_noise(MixingLine(ORIGIN, SymCoords(0.1, 0.1)), SloccClass.GHZ)

    def test_noise_not_lower(self):
        with pytest.raises(NoiseNotLowerError):
            optimal_witness_for_noise(MixingLine(GHZ_PLUS_CORNER, SymCoords(0.45, Y_MAX)), SloccClass.GHZ)

    def test_separable_target_class(self):
        with pytest.raises(ValidationError):
            optimal_witness_for_noise(PSEUDO_PURE, SloccClass.SEPARABLE)


class TestDetects:
    def test_examples(self):
        assert detects(genuine_witness(), projector(ghz_state(1)))
        assert not detects(genuine_witness(), maximally_mixed())

    def test_twirl_keeps_detection(self, rng: np.random.Generator):
        for _ in range(50):
            rho = random_density_matrix(rng, rank=1)
            twirled = reconstruct_state(twirl_coordinates(rho))
            for w in (genuine_witness(), projection_witness(), ghz_tangent_witness(0.7)):
                value = expectation(to_matrix(w), rho)
                assert expectation(to_matrix(w), twirled) == pytest.approx(value, abs=1e-12)
                if detects(w, rho):
                    assert detects(w, twirled)


class TestOptimality:
    def test_tangent_witnesses(self):
        assert is_optimal_for_symmetric(bisep_sep_witness(), SloccClass.SEPARABLE)
        assert is_optimal_for_symmetric(genuine_witness(), SloccClass.BISEPARABLE)
        for v0 in np.linspace(-1.0, 1.0, 21):
            assert is_optimal_for_symmetric(ghz_tangent_witness(float(v0)), SloccClass.W)

    def test_projection_touches_curve_end(self):
        assert is_optimal_for_symmetric(projection_witness(), SloccClass.W)
        assert is_optimal_on_line(projection_witness(), RHO_R_LINE, SloccClass.W)
        assert not is_optimal_on_line(projection_witness(), PSEUDO_PURE, SloccClass.W)

    def test_loose_witness_is_not_optimal(self):
        assert not is_optimal_for_symmetric(Witness(1.0, -1.0, 0.0), SloccClass.SEPARABLE)

    def test_optimal_on_line_for_constructed_witnesses(self):
        assert is_optimal_on_line(genuine_witness(), PSEUDO_PURE, SloccClass.BISEPARABLE)
        assert is_optimal_on_line(bisep_sep_witness(), PSEUDO_PURE, SloccClass.SEPARABLE)
        w, _ = optimal_witness_for_noise(PSEUDO_PURE, SloccClass.GHZ)
        assert is_optimal_on_line(w, PSEUDO_PURE, SloccClass.W)

    @pytest.mark.parametrize("v0", [-0.9, -0.4, 0.05, 0.5, V_WS])
    def test_full_rank_zero_point(self, v0: float):
        w = ghz_tangent_witness(v0)
        point = full_rank_zero_point(w)
        assert point is not None
        assert in_triangle(point) and is_full_rank(point)
        assert expectation_sym(w, point) == pytest.approx(0.0, abs=1e-12)

    def test_apex_tangent_has_no_full_rank_zero(self):
        assert full_rank_zero_point(ghz_tangent_witness(0.0)) is None
