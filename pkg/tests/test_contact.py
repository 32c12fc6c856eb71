import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lutzforms.constructions import omega_tw, tube_chart, xi0
from lutzforms.contact import (ContactClass, Region, blend, char_foliation, classify,
                               contact_coefficient, dividing_set, non_contact_locus, scan)
from lutzforms.errors import BadBlendRange, NotTransverse, VanishingForm, ZeroVolume
from lutzforms.forms import DifferentialForm, VectorField, interior, lie_derivative
from lutzforms.scalar import ScalarExpr, coord

CH = tube_chart(1)                 # (phi, r1, theta1)
R = ScalarExpr.atom(coord(1))
PHI = ScalarExpr.atom(coord(0))


def region(grid=9, **bounds):
    b = {"r1": (0.0, 1.5)}
    b.update(bounds)
    return Region(CH, b, resolution=grid, angle_resolution=grid)


class TestClassify:
    def test_standard_form_is_contact(self):
        cl = classify(xi0(CH), region())
        assert cl.kind is ContactClass.CONTACT
        assert cl.coefficient == ScalarExpr.const(2)

    def test_closed_form_is_a_confoliation(self):
        cl = classify(DifferentialForm.basis(CH, "phi"), region())
        assert cl.kind is ContactClass.CONFOLIATION

    def test_negative_twist_is_neither(self):
        a = DifferentialForm.basis(CH, "phi") - DifferentialForm.basis(CH, "theta1") * R ** 2
        cl = classify(a, region())
        assert cl.kind is ContactClass.NEITHER
        assert "negative_witness" in cl.certificate.payload

    def test_vanishing_form(self):
        with pytest.raises(VanishingForm):
            classify(DifferentialForm.basis(CH, "theta1") * R, region())

    def test_twisted_form_at_n1_is_contact(self):
        assert classify(omega_tw(CH), region(grid=25, r1=(0.0, math.sqrt(3 * math.pi)))).kind \
            is ContactClass.CONTACT


class TestScan:
    def test_refinement_finds_an_offgrid_zero(self):
        e = R ** 2 - ScalarExpr.const(2)          # zero at r = sqrt 2, never a grid node
        sc = scan(e, region(grid=8))
        assert any(abs(z[1] - math.sqrt(2)) < 1e-9 for z in sc.zeros)
        assert sc.min_value == pytest.approx(-2.0)

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(st.floats(0.2, 1.4))
    def test_zero_of_a_shifted_square(self, c):
        e = (R - ScalarExpr.const(Fraction(c).limit_denominator(10 ** 6))) ** 2
        sc = scan(e, region(grid=7))
        assert sc.zeros and min(abs(z[1] - c) for z in sc.zeros) < 1e-5


class TestCharacteristicFoliation:
    def test_on_a_torus(self):
        V = char_foliation(xi0(CH), {"r1": 1}, DifferentialForm.basis(CH.drop([1]), 0, 1))
        assert V == VectorField(CH.drop([1]), {0: ScalarExpr.const(1), 1: ScalarExpr.const(-1)})

    def test_zero_volume(self):
        with pytest.raises(ZeroVolume):
            char_foliation(xi0(CH), {"r1": 1}, DifferentialForm.zero(CH.drop([1]), 2))


class TestDividingSet:
    Y = VectorField(CH, {0: PHI, 1: R * Fraction(1, 2)})

    def test_contact_vector_field(self):
        assert lie_derivative(self.Y, xi0(CH)) == xi0(CH)
        assert interior(self.Y, xi0(CH)).components[()] == PHI

    def test_zero_set_is_phi_zero(self):
        rep = dividing_set({"r1": 1}, xi0(CH), self.Y, region())
        assert rep.zeros and all(abs(z[0]) < 1e-9 for z in rep.zeros)
        assert rep.positive > 0 and rep.negative == 0

    def test_tangent_field_rejected(self):
        with pytest.raises(NotTransverse):
            dividing_set({"r1": 1}, xi0(CH), VectorField(CH, {0: ScalarExpr.const(1)}), region())


class TestLocus:
    def test_n1_locus_is_empty(self):
        loc = non_contact_locus(omega_tw(CH), region(grid=25, r1=(0.0, math.sqrt(math.pi))))
        assert loc.zeros == [] and loc.matches


class TestBlend:
    def test_endpoints(self):
        a, w = xi0(CH), omega_tw(CH)
        mixed, _ = blend(a, w, ScalarExpr.const(0), region())
        assert mixed == a
        mixed, _ = blend(a, w, ScalarExpr.const(1), region())
        assert mixed == w

    def test_out_of_range(self):
        with pytest.raises(BadBlendRange):
            blend(xi0(CH), omega_tw(CH), ScalarExpr.const(2), region())


def test_contact_coefficient_of_standard_form_in_every_dimension():
    for n in (1, 2, 3):
        ch = tube_chart(n)
        assert contact_coefficient(xi0(ch)) == ScalarExpr.const(2 ** n * math.factorial(n))


def test_region_grid_is_deterministic():
    r = Region(CH, {"r1": (0.0, 1.0)}, resolution=5, jitter=0.3, seed=7)
    assert np.array_equal(r.grid(), r.grid())
