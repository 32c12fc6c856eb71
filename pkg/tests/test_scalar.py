import math
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from lutzforms.chart import ANGLE, RADIAL, Chart
from lutzforms.errors import BadAssignment, DomainPole, IllFormedAtom
from lutzforms.scalar import (COORD, FN, Exact, ScalarExpr, ZeroStatus, coord, cos, differentiate, evaluate,
                              fn, is_zero, norm, parse, sin, to_text)

from strategies import CHART, PROFILES, close, fd_partial, sample_points, scalars

FAST = settings(max_examples=150, deadline=None, derandomize=True,
                suppress_health_check=[HealthCheck.too_slow])


def S(atom):
    return ScalarExpr.atom(atom)


class TestCanonicalForm:
    def test_pythagoras_collapses(self):
        s, c = S(sin(0, True)), S(cos(0, True))
        assert s * s + c * c == ScalarExpr.const(1)

    def test_even_sine_powers_rewrite_to_cosines(self):
        s = S(sin(0, True))
        assert to_text(s * s) == "1 + -1*cos(x0^2)^2"
        assert to_text(s ** 3) == "1*sin(x0^2) + -1*sin(x0^2)*cos(x0^2)^2"

    def test_norm_squares_expand(self):
        assert S(norm([0, 1], 2)) == S(coord(0, 2)) + S(coord(1, 2))

    def test_profile_chain_rule(self):
        e = differentiate(S(fn("f", 0, True)), 0)
        assert to_text(e) == "2*x0*F[f;1](x0^2)"

    @FAST
    @given(scalars(), scalars(), scalars())
    def test_ring_axioms(self, a, b, c):
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a - a).is_zero_form

    @FAST
    @given(scalars())
    def test_text_round_trip(self, a):
        assert parse(to_text(a)) == a

    @FAST
    @given(scalars(), scalars(), st.integers(0, 10 ** 6))
    def test_evaluation_is_a_ring_map(self, a, b, seed):
        for x in sample_points(seed, 8):
            va, vb = evaluate(a, x, PROFILES), evaluate(b, x, PROFILES)
            assert close(evaluate(a * b, x, PROFILES), va * vb, 1e-12, 1e-12)
            assert close(evaluate(a + b, x, PROFILES), va + vb, 1e-12, 1e-12)

    @FAST
    @given(scalars(), st.integers(0, 3), st.integers(0, 10 ** 6))
    def test_derivative_matches_central_difference(self, a, i, seed):
        d = differentiate(a, i)
        for x in sample_points(seed, 8):
            assert close(evaluate(d, x, PROFILES), fd_partial(a, x, i), 1e-5, 1e-6)


class TestExactSubstitution:
    def test_trig_at_rational_multiples_of_pi(self):
        assert S(sin(0)).substitute(0, Exact.pi(Fraction(1, 2))) == ScalarExpr.const(1)
        assert S(cos(0)).substitute(0, Exact.pi(1)) == ScalarExpr.const(-1)

    def test_squared_argument_at_sqrt_pi(self):
        e = S(sin(0, True)) ** 2 * S(cos(0, True))
        assert e.substitute(0, Exact.sqrt_pi(Fraction(1, 2))).is_zero_form
        assert float(Exact.sqrt_pi(Fraction(1, 2))) == pytest.approx(math.sqrt(math.pi / 2))

    @FAST
    @given(scalars(), st.fractions(min_value=-2, max_value=2, max_denominator=5))
    def test_rational_substitution_agrees_with_evaluation(self, a, q):
        try:
            b = a.substitute(0, Exact.rat(q))
        except BadAssignment:
            # refusals: opaque profiles, or trig at a nonzero rational
            assert any(0 in b.coords() and (b.tag == FN or (b.tag != COORD and q != 0))
                       for b in a.atoms())
            return
        assert 0 not in b.coords_used()
        for x in sample_points(7, 4):
            x[0] = float(q)
            assert close(evaluate(b, x, PROFILES), evaluate(a, x, PROFILES), 1e-12, 1e-12)


class TestZeroTest:
    def test_symbolic(self):
        assert is_zero(ScalarExpr()).status is ZeroStatus.SYMBOLIC_ZERO

    def test_nonzero_reports_a_witness(self):
        z = is_zero(S(sin(0)) - S(cos(0)))
        assert z.status is ZeroStatus.NONZERO and z.witness is not None

    def test_opaque_profile_is_not_assumed_zero(self):
        assert not is_zero(S(fn("g", 0)))

    def test_is_deterministic_in_the_seed(self):
        e = S(sin(0)) * S(coord(1)) - S(cos(1))
        assert is_zero(e, seed=3) == is_zero(e, seed=3)


class TestErrors:
    chart = Chart.of([("t", ANGLE), ("r", RADIAL)])

    def test_negative_power_of_angle(self):
        with pytest.raises(IllFormedAtom):
            ScalarExpr.atom(coord(0, -1), self.chart)

    def test_squared_angle_argument(self):
        with pytest.raises(IllFormedAtom):
            ScalarExpr.atom(sin(0, True), self.chart)

    def test_zero_exponent(self):
        with pytest.raises(IllFormedAtom):
            ScalarExpr.atom(coord(1, 0), self.chart)

    def test_bad_profile_name(self):
        with pytest.raises(IllFormedAtom):
            fn("1bad", 0)

    def test_pole(self):
        with pytest.raises(DomainPole):
            evaluate(S(coord(1, -1)), [0.0, 0.0])

    def test_missing_profile(self):
        with pytest.raises(KeyError):
            evaluate(S(fn("q", 0)), [0.3])


def test_monomial_inverse():
    e = S(coord(1, 2)) * 3
    assert e * e.inverse() == ScalarExpr.const(1)
    with pytest.raises(ValueError):
        (S(coord(1)) + 1).inverse()


def test_sampling_chart_respects_radial_range():
    rng = random.Random(0)
    from lutzforms.scalar import sample_point
    for _ in range(50):
        assert sample_point(rng, CHART.dim, CHART)[1] >= 0.05
