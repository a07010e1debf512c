import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from grainflow.errors import (
    ContractViolationError,
    ConvergenceError,
    InvalidGeometryError,
    NoInteriorEquilibriumError,
)
from grainflow.geometry import (
    AnchorSet,
    angle_condition,
    edge_vectors,
    equilateral_anchors,
    fermat_objective,
    fermat_point,
    line_tension,
    unit_sum_residual,
)

from conftest import grid_minimizer, interior_angles

coord = st.floats(-10, 10, allow_nan=False)
triangle = st.lists(st.tuples(coord, coord), min_size=3, max_size=3)


class TestAnchors:
    def test_rejects_coincident(self):
        with pytest.raises(InvalidGeometryError):
            AnchorSet.of((0, 0), (0, 0), (1, 1))

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidGeometryError):
            AnchorSet.of((0, 0), (np.nan, 0), (1, 1))

    def test_points_read_only(self, eq_anchors):
        with pytest.raises(ValueError):
            eq_anchors.points[0, 0] = 5.0


class TestEdgeVectors:
    def test_unit_cross(self):
        an = AnchorSet.of((1, 0), (0, 1), (-1, 0))
        ev = edge_vectors(an, (0, 0))
        np.testing.assert_array_equal(ev.b, [[1, 0], [0, 1], [-1, 0]])
        np.testing.assert_array_equal(ev.lengths, [1, 1, 1])

    def test_coincident_zero(self):
        an = AnchorSet.of((1, 0), (0, 1), (-1, 0))
        assert edge_vectors(an, (1, 0)).lengths[0] == 0.0

    def test_pythagoras(self):
        an = AnchorSet.of((2, 0), (0, 2), (-2, 0))
        np.testing.assert_allclose(edge_vectors(an, (0, 1)).lengths, [math.sqrt(5), 1, math.sqrt(5)], rtol=1e-15)


class TestAngleCondition:
    def test_equilateral(self, eq_anchors):
        cond = angle_condition(eq_anchors)
        assert cond.flags == (True, True, True) and cond.ok
        np.testing.assert_allclose(cond.sums, math.sqrt(3), rtol=1e-14)

    def test_obtuse_150(self):
        th = math.radians(75)
        an = AnchorSet.of((0, 0), (math.sin(th), -math.cos(th)), (-math.sin(th), -math.cos(th)))
        cond = angle_condition(an)
        assert cond.flags[0] is False and not cond.ok
        assert cond.sums[0] == pytest.approx(2 * math.cos(th), rel=1e-12)

    def test_right_isoceles(self):
        cond = angle_condition(AnchorSet.of((0, 0), (1, 0), (0, 1)))
        assert cond.ok
        # 90 degree vertex: |(1,0)+(0,1)| = sqrt 2; 45 degree vertices: 2 cos 22.5
        np.testing.assert_allclose(cond.sums, [math.sqrt(2), 2 * math.cos(math.pi / 8), 2 * math.cos(math.pi / 8)],
                                   rtol=1e-14)

    def test_collinear(self):
        with pytest.raises(InvalidGeometryError):
            angle_condition(AnchorSet.of((0, 0), (1, 0), (2, 0)))

    @given(triangle)
    def test_matches_interior_angle(self, pts):
        pts = np.array(pts)
        try:
            an = AnchorSet(pts)
        except InvalidGeometryError:
            assume(False)
        assume(an.area() > 1e-3)
        ang = interior_angles(pts)
        assume(np.all(np.abs(ang - 120.0) > 1e-4))
        assert angle_condition(an).flags == tuple(bool(a < 120.0) for a in ang)


class TestFermatPoint:
    def test_equilateral_exact(self, eq_anchors):
        eq = fermat_point(eq_anchors)
        assert np.all(np.abs(eq.a_inf) <= 1e-12)
        assert eq.converged and eq.residual < 1e-12

    def test_right_triangle_grid_oracle(self):
        an = AnchorSet.of((0, 0), (1, 0), (0, 1))
        eq = fermat_point(an)
        np.testing.assert_allclose(eq.a_inf, grid_minimizer(an), atol=1e-6)
        # known closed form for this triangle: x = y = (3 - sqrt 3)/6
        np.testing.assert_allclose(eq.a_inf, (3 - math.sqrt(3)) / 6, atol=1e-12)

    def test_refuses_obtuse(self):
        with pytest.raises(NoInteriorEquilibriumError):
            fermat_point(AnchorSet.of((-1, 0), (1, 0), (0, 0.2)))

    def test_convergence_error_carries_iterate(self):
        an = AnchorSet.of((0, 0), (1, 0), (0.3, 0.9))
        with pytest.raises(ConvergenceError) as ei:
            fermat_point(an, tol=0.0, max_iter=2)
        assert ei.value.last_iterate is not None

    @given(triangle)
    def test_residual_and_optimality(self, pts):
        try:
            an = AnchorSet(np.array(pts))
        except InvalidGeometryError:
            assume(False)
        assume(an.area() > 1e-2)
        ang = interior_angles(an.points)
        assume(np.all(ang < 119.0))
        eq = fermat_point(an)
        assert eq.converged and eq.residual <= 1e-12
        assert eq.residual == unit_sum_residual(an, eq.a_inf)
        assert np.min(eq.b_inf.lengths) > 0
        rng = np.random.default_rng(0)
        w = rng.dirichlet(np.ones(3), size=1000)
        probes = w @ an.points
        f0 = fermat_objective(an, eq.a_inf)
        assert all(f0 <= fermat_objective(an, p) + 1e-11 for p in probes)

    def test_near_120_degrees(self):
        th = math.radians(60 - 1e-3)  # apex angle just under 120
        an = AnchorSet.of((0, 0), (math.sin(th), -math.cos(th)), (-math.sin(th), -math.cos(th)))
        eq = fermat_point(an)
        assert eq.converged and eq.residual < 1e-12


class TestLineTension:
    @pytest.mark.parametrize("edge, mis, want", [
        ((1, 0), 0.0, (1, 0)),
        ((0, 1), 2.0, (0, 3)),
        ((-1, 0), 1.0, (-1.5, 0)),
    ])
    def test_examples(self, edge, mis, want):
        np.testing.assert_array_equal(line_tension(np.array(edge, float), mis), want)

    def test_non_unit(self):
        with pytest.raises(ContractViolationError):
            line_tension(np.array([2.0, 0.0]), 0.0)

    @given(st.floats(0, 2 * math.pi), st.floats(-5, 5))
    def test_norm(self, th, mis):
        e = np.array([math.cos(th), math.sin(th)])
        assert abs(np.linalg.norm(line_tension(e, mis)) - (1 + 0.5 * mis * mis)) <= 1e-14 * (1 + mis * mis)
