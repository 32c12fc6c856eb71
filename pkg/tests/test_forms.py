from fractions import Fraction

import numpy as np
import pytest

from lutzforms import kernels
from lutzforms.chart import ANGLE, LINEAR, RADIAL, Chart
from lutzforms.errors import (BadAssignment, ChartMismatch, DegreeZero, NotTopDegree, PoleOnRegion,
                              ZeroVolume)
from lutzforms.forms import (DiagonalMetric, DifferentialForm, VectorField, ext_d, hodge_star,
                             interior, pullback, restrict, top_ratio, wedge, wedge_power)
from lutzforms.scalar import Exact, ScalarExpr, coord, cos, sin

from strategies import CHART, PROFILES, sample_points

XY = Chart.of([("x", LINEAR), ("y", LINEAR)])
POLAR = Chart.of([("r", RADIAL), ("t", ANGLE)])


def X(i, e=1):
    return ScalarExpr.atom(coord(i, e))


def test_basis_sign_and_reordering():
    assert DifferentialForm.basis(XY, "y", "x") == -DifferentialForm.basis(XY, "x", "y")
    assert DifferentialForm.basis(XY, "x", "x").is_zero()
    f = DifferentialForm.basis(XY, "x", "y") * X(0)
    assert f.coefficient("y", "x") == -X(0)


def test_wedge_power_of_symplectic_form():
    ch = Chart.of([(n, LINEAR) for n in ("p1", "q1", "p2", "q2")])
    w = DifferentialForm.basis(ch, 0, 1) + DifferentialForm.basis(ch, 2, 3)
    assert wedge_power(w, 2) == DifferentialForm.basis(ch, 0, 1, 2, 3) * 2


def test_restrict_at_exact_values():
    a = DifferentialForm.basis(POLAR, "t") * ScalarExpr.atom(sin(0, True))
    r = restrict(a, {"r": Exact.sqrt_pi(Fraction(1, 2))})
    assert r == DifferentialForm.basis(POLAR.drop([0]), 0)


def test_restrict_rejects_inexact_values_that_matter():
    a = DifferentialForm.basis(XY, "y") * X(0)
    with pytest.raises(BadAssignment):
        restrict(a, {"x": 0.3})
    assert restrict(DifferentialForm.basis(XY, "y"), {"x": 0.3}) == \
        DifferentialForm.basis(XY.drop([0]), 0)


def test_restrict_unknown_coordinate():
    with pytest.raises(BadAssignment):
        restrict(DifferentialForm.basis(XY, "y"), {"w": 1})


def test_pullback_along_polynomial_map():
    # (u, v) -> (u v, u + v)
    uv = Chart.of([("u", LINEAR), ("v", LINEAR)])
    a = DifferentialForm.basis(XY, "x", "y")
    pb = pullback(a, uv, [X(0) * X(1), X(0) + X(1)])
    assert pb == DifferentialForm.basis(uv, 0, 1) * (X(1) - X(0))


def test_pullback_rejects_trig():
    a = DifferentialForm.basis(XY, "x") * ScalarExpr.atom(cos(1))
    with pytest.raises(BadAssignment):
        pullback(a, XY, [X(0), X(1)])


def test_chart_mismatch():
    with pytest.raises(ChartMismatch):
        DifferentialForm.basis(XY, "x") + DifferentialForm.basis(POLAR, "r")
    with pytest.raises(ChartMismatch):
        interior(VectorField(POLAR, {0: 1}), DifferentialForm.basis(XY, "x"))


def test_interior_of_function():
    with pytest.raises(DegreeZero):
        interior(VectorField(XY, {0: 1}), DifferentialForm.function(XY, X(0)))


def test_top_ratio_errors():
    with pytest.raises(NotTopDegree):
        top_ratio(DifferentialForm.basis(XY, "x"), DifferentialForm.basis(XY, "x", "y"))
    with pytest.raises(ZeroVolume):
        top_ratio(DifferentialForm.basis(XY, "x", "y"), DifferentialForm.zero(XY, 2))


def test_hodge_star_polar():
    g = DiagonalMetric.cylindrical(POLAR)
    assert hodge_star(DifferentialForm.basis(POLAR, "r"), g) == DifferentialForm.basis(POLAR, "t") * X(0)
    assert hodge_star(DifferentialForm.function(POLAR, 1), g) == DifferentialForm.basis(POLAR, 0, 1) * X(0)


def test_metric_vanishing_on_region():
    g = DiagonalMetric.cylindrical(POLAR)
    with pytest.raises(PoleOnRegion):
        hodge_star(DifferentialForm.basis(POLAR, "r"), g, region_points=[[0.0, 1.0]])


def test_exterior_derivative_of_twisted_one_form():
    # d(cos r^2 dphi + r^2 sin r^2 dtheta) on (phi, r, theta)
    ch = Chart.of([("phi", ANGLE), ("r", RADIAL), ("theta", ANGLE)])
    a = DifferentialForm.basis(ch, 0) * ScalarExpr.atom(cos(1, True)) + \
        DifferentialForm.basis(ch, 2) * (X(1, 2) * ScalarExpr.atom(sin(1, True)))
    da = ext_d(a)
    assert da.coefficient(0, 1) == X(1) * ScalarExpr.atom(sin(1, True)) * 2
    assert da.coefficient(1, 2) == X(1) * ScalarExpr.atom(sin(1, True)) * 2 + \
        X(1, 3) * ScalarExpr.atom(cos(1, True)) * 2


class TestKernels:
    exprs = [X(0) * ScalarExpr.atom(sin(1, True)) + X(3, 2),
             ScalarExpr.atom(cos(2)) * X(1, -1)]

    def test_numpy_and_compiled_paths_agree(self):
        pts = np.array(sample_points(5, 64) + [[0.1, 0.0, 0.2, 0.3]])
        a, pa = kernels.eval_grid(self.exprs, pts, dim=CHART.dim, use_numba=False)
        b, pb = kernels.eval_grid(self.exprs, pts, dim=CHART.dim, use_numba=True)
        assert np.array_equal(pa, pb)
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)

    @pytest.mark.parametrize("use_numba", [False, True])
    def test_poles_are_masked(self, use_numba):
        pts = np.array([[0.1, 0.0, 0.2, 0.3], [0.1, 1.0, 0.2, 0.3]])
        vals, pole = kernels.eval_grid(self.exprs, pts, dim=CHART.dim, use_numba=use_numba)
        assert pole.tolist() == [True, False]
        assert np.isnan(vals[0, 1]) and vals[0, 0] == pytest.approx(0.09)

    def test_profiles_route_through_python(self):
        from lutzforms.scalar import evaluate, fn
        e = ScalarExpr.atom(fn("h", 1, True, 1))
        pts = np.array(sample_points(9, 8))
        vals, _ = kernels.eval_grid([e], pts, PROFILES, dim=CHART.dim)
        np.testing.assert_allclose(vals[:, 0], [evaluate(e, p, PROFILES) for p in pts], rtol=1e-14)

    def test_env_switch(self, monkeypatch):
        monkeypatch.setenv("LUTZFORMS_DISABLE_NUMBA", "1")
        assert not kernels.numba_enabled()
