import math

import numpy as np
import pytest

from lutzforms.constructions import (build_double_and_tube, euler_sections, giroux_domain,
                                     make_lutz_confoliation, make_standard_tube, omega_tw,
                                     prelag_blowup_check, tube_chart, twist_bracket, verify_blob,
                                     xi0)
from lutzforms.contact import contact_coefficient
from lutzforms.forms import ext_d, top_ratio, wedge, wedge_power
from lutzforms.scalar import evaluate

from strategies import contact_top_fd

# (n, point, value of the cylindrical contact coefficient); frozen from the
# finite-difference oracle below, which agrees to ~1e-9 relative
FROZEN_TWIST = [
    (2, [0.3, 0.7, 1.0, 1.1, 2.0], 6.448910367922769),
    (3, [0.3, 0.7, 1.0, 1.1, 2.0, 0.9, 0.5], 20.838192879517823),
]


def twisted_numpy(n):
    def alpha(x):
        r = np.asarray(x)[1::2]
        out = np.zeros(2 * n + 1)
        out[0] = np.prod(np.cos(r ** 2))
        out[2::2] = np.sin(r ** 2)
        return out
    return alpha


@pytest.mark.parametrize("n", [1, 2, 3])
def test_twisted_coefficient_is_the_closed_bracket(n):
    ch = tube_chart(n)
    expected = twist_bracket(n) * (2 ** n * math.factorial(n))
    assert contact_coefficient(omega_tw(ch)) == expected


@pytest.mark.parametrize("n,x,value", FROZEN_TWIST)
def test_twisted_coefficient_against_oracle(n, x, value):
    sym = evaluate(contact_coefficient(omega_tw(tube_chart(n))), x)
    fd = contact_top_fd(twisted_numpy(n), x) / np.prod(x[1::2])
    assert sym == pytest.approx(value, rel=1e-12)
    assert fd == pytest.approx(value, rel=1e-7)


def test_coefficient_via_top_ratio_agrees():
    ch = tube_chart(2)
    w = omega_tw(ch)
    top = wedge(w, wedge_power(ext_d(w), 2))
    vol = wedge_power(ext_d(xi0(ch)), 2)
    vol = wedge(xi0(ch), vol)
    # xi0 ^ (d xi0)^2 = 8 r1 r2 dV, so the ratio is the coefficient over 8
    ratio = top_ratio(top, vol) * 8
    assert ratio == contact_coefficient(w)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_standard_tube(n):
    assert make_standard_tube(n, grid=9).ok


@pytest.mark.parametrize("n", [1, 2])
def test_lutz_confoliation(n):
    nc = make_lutz_confoliation(n)
    assert nc.ok, [c.name for c in nc.checks if not c.passed]


def test_n1_locus_is_empty():
    loc = make_lutz_confoliation(1).check("non-contact locus").payload
    assert loc == {"zeros": 0, "expected": "empty"}


def test_n2_locus_strata_are_covered():
    p = make_lutz_confoliation(2).check("non-contact locus").payload
    assert p["zeros_matched"] and p["strata_covered"]
    (stratum,) = p["expected"]
    assert stratum["r1"] == pytest.approx(math.sqrt(math.pi / 2), abs=1e-12)


def test_line_core():
    assert make_lutz_confoliation(1, core="line", grid=9, conductivity=False).ok


def test_bad_core():
    with pytest.raises(ValueError):
        make_lutz_confoliation(1, core="knot")


@pytest.mark.parametrize("n", [2, 3])
def test_blob(n):
    assert verify_blob(n).ok


def test_blob_sabotage_is_caught():
    nc = verify_blob(2, sabotage=True)
    assert not nc.ok
    assert not nc.check("P avoids the locus").passed


@pytest.mark.parametrize("n", [1, 2])
def test_double_and_model_tube(n):
    assert build_double_and_tube(n, grid=9).ok


@pytest.mark.parametrize("n", [1, 2, 3])
def test_euler_sections(n):
    nc = euler_sections(n, grid=9)
    assert nc.ok
    assert nc.check("omega_tw(sigma1) with opaque g").status.value == "symbolic-pass"


@pytest.mark.parametrize("n", [1, 2])
def test_giroux_domain(n):
    nc = giroux_domain(n)
    assert nc.ok, [c.name for c in nc.checks if not c.passed]


def test_giroux_n1_torsion_form_is_exact():
    assert giroux_domain(1).check("n=1 Giroux pi-torsion form").status.value == "symbolic-pass"


@pytest.mark.parametrize("n", [1, 2, 3])
def test_prelag_blowup(n):
    assert prelag_blowup_check(n).ok


def test_report_is_seed_stable():
    a = make_standard_tube(2, grid=9).report(5).dumps()
    b = make_standard_tube(2, grid=9).report(5).dumps()
    assert a == b
    assert '"schema": "lutzforms.report"' in a

