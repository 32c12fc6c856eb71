import csv
import io
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from lutzforms.errors import BadSlice, UnknownConstruction
from lutzforms.plot import PLOTTABLE, parse_fix, plot_spec, render_slice

SVG_NS = "{http://www.w3.org/2000/svg}"


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def bracket2(r1, r2):
    c1, c2 = np.cos(r1 ** 2) ** 2, np.cos(r2 ** 2) ** 2
    return 8 * (c1 * c2 + (1 - c1) * c2 + (1 - c2) * c1)


def test_n2_slice_values_and_locus():
    res = render_slice(plot_spec("lutz-confoliation", 2), {}, ["r1", "r2"], resolution=41)
    data = rows(res.csv)
    assert len(data) == 41 * 41
    for row in data[::97]:
        x, y, v = float(row["x"]), float(row["y"]), float(row["value"])
        assert v == pytest.approx(bracket2(x, y), rel=1e-9, abs=1e-9)
    (pt,) = res.locus
    assert pt == pytest.approx((math.sqrt(math.pi / 2),) * 2, abs=1e-6)


def test_svg_is_well_formed():
    res = render_slice(plot_spec("lutz-confoliation", 2), {}, ["r1", "r2"], resolution=21)
    root = ET.fromstring(res.svg)
    assert root.tag == f"{SVG_NS}svg"
    assert root.get("width") == "800" and root.get("height") == "800"
    loci = [el for el in root.iter() if el.get("class") == "locus"]
    assert len(loci) == len(res.locus) == 1


def test_giroux_slice_outside_the_domain_is_empty():
    res = render_slice(plot_spec("giroux-domain", 2), {"r2": 0.2}, ["r1", "theta1"], resolution=11)
    assert res.csv == "x,y,value\n"
    assert res.locus == []


def test_giroux_slice_keeps_only_inside_points():
    res = render_slice(plot_spec("giroux-domain", 1), {}, ["r1", "theta1"], resolution=31)
    xs = np.array([float(r["x"]) for r in rows(res.csv)])
    assert xs.size and np.all(xs ** 2 >= math.pi / 2 - 1e-9) and np.all(xs ** 2 <= 1.5 * math.pi + 1e-9)


def test_round_handle_slice():
    res = render_slice(plot_spec("round-handle", 1), {"z": 0}, ["p1", "q1"], resolution=21)
    assert rows(res.csv)
    assert res.inside.any() and not res.inside.all()


def test_render_is_deterministic():
    spec = plot_spec("standard-tube", 1)
    a = render_slice(spec, {}, ["r1", "theta1"], resolution=15)
    b = render_slice(spec, {}, ["r1", "theta1"], resolution=15)
    assert a.svg == b.svg and a.csv == b.csv


def test_every_plottable_name_builds():
    for name in PLOTTABLE:
        assert plot_spec(name, 2).chart.dim == (6 if name == "round-handle" else 5)


@pytest.mark.parametrize("fix,axes", [
    ({}, ["r1", "r1"]),
    ({}, ["r1"]),
    ({}, ["r1", "nope"]),
    ({"r1": 1.0}, ["r1", "r2"]),
    ({"r2": -1.0}, ["r1", "theta1"]),
    ({}, ["r1", "theta1"]),        # r2 left free
])
def test_bad_slices(fix, axes):
    with pytest.raises(BadSlice):
        render_slice(plot_spec("lutz-confoliation", 2), fix, axes)


def test_parse_fix():
    assert parse_fix("r2=1.5, theta1=0") == {"r2": 1.5, "theta1": 0.0}
    assert parse_fix("") == {}
    for bad in ("r2", "r2=abc"):
        with pytest.raises(BadSlice):
            parse_fix(bad)


def test_unknown_plot():
    with pytest.raises(UnknownConstruction):
        plot_spec("full-twist", 2)
