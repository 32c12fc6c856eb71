import math

import numpy as np
import pytest

from lutzforms.contact import ContactClass
from lutzforms.errors import BadIndex, NotTransverse
from lutzforms.forms import VectorField, ext_d, lie_derivative
from lutzforms.handles import (HandleRegion, MembershipStatus, handle_membership, induced_form,
                               liouville_primitive, make_handle, proportional,
                               round_handle_report)
from lutzforms.scalar import ScalarExpr, evaluate

ALL_HANDLES = [(m, k) for m in range(1, 5) for k in range(1, m + 1)]


def linear_matrices(h):
    """omega_0 as an antisymmetric matrix and X as its (constant) Jacobian, numerically."""
    d = h.chart.dim
    W = np.zeros((d, d))
    for (i, j), c in h.omega0.components.items():
        W[i, j] = float(c.constant_value())
        W[j, i] = -W[i, j]
    J = np.zeros((d, d))
    rng = np.random.default_rng(3)
    x = rng.uniform(-1, 1, d)
    for k, comp in h.X.components.items():
        for i in range(d):
            e = np.zeros(d)
            e[i] = 1e-3
            J[k, i] = (evaluate(comp, x + e) - evaluate(comp, x - e)) / 2e-3
    return W, J


@pytest.mark.parametrize("m,k", ALL_HANDLES)
def test_liouville_identity(m, k):
    h = make_handle(m, k)
    assert ext_d(h.omega0).is_zero()
    assert lie_derivative(h.X, h.omega0) == h.omega0
    # constant omega, linear X: L_X omega = J^T W + W J
    W, J = linear_matrices(h)
    np.testing.assert_allclose(J.T @ W + W @ J, W, atol=1e-9)


@pytest.mark.parametrize("m,k", ALL_HANDLES)
def test_primitive_is_the_contracted_form(m, k):
    h = make_handle(m, k)
    assert liouville_primitive(h) == h.lam
    assert ext_d(h.lam) == h.omega0


@pytest.mark.parametrize("m,k", [(0, 1), (2, 0), (2, 3)])
def test_bad_index(m, k):
    with pytest.raises(BadIndex):
        make_handle(m, k)


class TestMembership:
    hr = HandleRegion(make_handle(1, 1))     # point layout (p1, q1, z, phi)

    def test_origin_is_inside(self):
        assert handle_membership(self.hr, [0, 0, 0, 0]).status is MembershipStatus.INSIDE

    def test_lower_face(self):
        mem = handle_membership(self.hr, [0, math.sqrt(2), 0, 0])
        assert mem.status is MembershipStatus.BOUNDARY and mem.faces == ("W-",)

    def test_upper_face(self):
        mem = handle_membership(self.hr, [1, 0, 0, 0])
        assert mem.status is MembershipStatus.BOUNDARY and mem.faces == ("V_c",)

    def test_outside(self):
        assert handle_membership(self.hr, [0, 2, 0, 0]).status is MembershipStatus.OUTSIDE
        assert handle_membership(self.hr, [2, 0, 0, 0]).status is MembershipStatus.OUTSIDE

    def test_tolerance(self):
        mem = handle_membership(self.hr, [0, math.sqrt(2) + 1e-12, 0, 0])
        assert mem.status is MembershipStatus.BOUNDARY


def test_tangent_level_is_rejected():
    with pytest.raises(NotTransverse):
        induced_form(make_handle(2, 1), {"q2": 0})


def test_level_must_fix_one_coordinate():
    with pytest.raises(ValueError):
        induced_form(make_handle(1, 1), {"z": 1, "p1": 1})


@pytest.mark.parametrize("level", [{"z": 1}, {"p1": 1}, {"q1": -1}])
def test_induced_forms_are_contact(level):
    h = make_handle(2, 1)
    alpha, cl = induced_form(h, level, HandleRegion(h))
    assert cl.kind is ContactClass.CONTACT
    assert alpha.degree == 1 and alpha.chart.dim == h.chart.dim - 1


def test_proportional():
    h = make_handle(1, 1)
    Y = VectorField(h.chart, {0: ScalarExpr.const(2), 2: ScalarExpr.const(-4)})
    Z = VectorField(h.chart, {0: ScalarExpr.const(1), 2: ScalarExpr.const(-2)})
    assert proportional(Y, Z) == (True, 2)
    W = VectorField(h.chart, {0: ScalarExpr.const(1), 2: ScalarExpr.const(2)})
    assert proportional(Y, W) == (False, None)


@pytest.mark.parametrize("m,count", [(1, 45), (2, 79), (3, 113)])
def test_round_handle_report(m, count):
    nc = round_handle_report(m, 1)
    assert nc.ok, [c.name for c in nc.checks if not c.passed]
    assert len(nc.checks) == count
    names = {o.name for o in nc.observations}
    assert any("belt core" in n for n in names)


@pytest.mark.parametrize("m", [2, 3])
def test_factorial_factor_on_the_p1_sheet(m):
    nc = round_handle_report(m, 1)
    chk = nc.check("A+ chart p1=+1: V = (m-1)! x reference")
    assert chk.passed
    (obs,) = [o for o in nc.observations if o.name == "A+ chart p1=+1 factor"]
    assert obs.payload["factor"] == math.factorial(m - 1)


def test_higher_index_handles_report_the_liouville_checks():
    nc = round_handle_report(3, 2)
    for name in ("d omega0 = 0", "L_X omega0 = omega0", "handle region non-empty"):
        assert nc.check(name).passed
