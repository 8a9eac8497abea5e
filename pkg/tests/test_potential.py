import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlft_lab import Potential, is_sigma_interval, l2_norm_sq, parse_potential
from nlft_lab.potential import integral

from oracles import riemann


def test_constant_evaluates_to_q():
    assert Potential.constant(1).evaluate(0.5) == 1.0


def test_truncated_constant_is_zero_past_cutoff():
    f = Potential.constant(1).truncate(1)
    assert f.evaluate(2.0) == 0.0
    assert f.evaluate(0.5) == 1.0
    assert f.evaluate(1.5) == 0.0


def test_powerdecay_preset_at_origin():
    assert Potential.preset("powerdecay").evaluate(0.0) == 1.0


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        Potential.constant(1).evaluate(-0.1)


def test_piecewise_validation():
    with pytest.raises(ValueError):
        Potential.piecewise([0, 1, 0.5], [1, 2])
    with pytest.raises(ValueError):
        Potential.piecewise([0, 1], [1, 2])


def test_sampled_cell_lookup_and_outside_range():
    f = Potential.sampled(0.5, [1.0, -2.0, 3.0])
    assert f.evaluate(np.array([0.0, 0.49, 0.5, 1.2, 1.5, 10.0])).tolist() == [1, 1, -2, 3, 0, 0]


@pytest.mark.parametrize("q, expected", [(1.0, 1.0), (0.5, 0.25)])
def test_l2_norm_of_constant(q, expected):
    assert l2_norm_sq(Potential.constant(q), 0, 1).value == pytest.approx(expected, abs=1e-14)


def test_l2_norm_powerdecay_matches_riemann_sum():
    f = Potential.preset("powerdecay")
    ref = riemann(lambda t: (1 + t) ** -1.4, 0.0, 10.0, 2_000_000)
    assert abs(l2_norm_sq(f, 0, 10).value - ref) < 1e-8
    # closed form as a second opinion
    assert abs(ref - (1 - 11 ** -0.4) / 0.4) < 1e-9


def test_l2_additive_over_adjacent_intervals():
    f = Potential.preset("gaussian")
    left, right, whole = l2_norm_sq(f, 0, 0.7), l2_norm_sq(f, 0.7, 3), l2_norm_sq(f, 0, 3)
    assert abs(left.value + right.value - whole.value) <= (
        left.error_estimate + right.error_estimate + whole.error_estimate + 1e-12)


@pytest.mark.parametrize("f, sigma, expected", [
    (Potential.constant(1), 0.01, True),
    (Potential.piecewise([0, 0.5, 1], [1, -1]), 0.01, False),
    (Potential.piecewise([0, 0.5, 0.501, 1], [1, -0.001, 1]), 0.01, True),
])
def test_sigma_interval_examples(f, sigma, expected):
    assert is_sigma_interval(f, 0, 1, sigma) is expected


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=6),
       st.floats(0.001, 0.5), st.floats(0.001, 0.5))
def test_sigma_interval_monotone(values, s1, s2):
    lo, hi = sorted((s1, s2))
    f = Potential.piecewise(np.linspace(0, 1, len(values) + 1), values)
    if is_sigma_interval(f, 0, 1, lo):
        assert is_sigma_interval(f, 0, 1, hi)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 5), st.floats(0, 5), st.lists(st.floats(0, 6), min_size=1, max_size=10))
def test_truncate_composes_as_min(T1, T2, ts):
    f = Potential.preset("powerdecay")
    a = f.truncate(T1).truncate(T2)
    b = f.truncate(min(T1, T2))
    assert np.array_equal(a.evaluate(np.array(ts)), b.evaluate(np.array(ts)))


def test_shifted_matches_translation():
    f = Potential.piecewise([0, 0.3, 1.1, 2.0], [1.0, -0.5, 2.0])
    g = f.shifted(0.5)
    u = np.linspace(0, 1.49, 50)
    assert np.array_equal(g.evaluate(u), f.evaluate(u + 0.5))
    assert g.support_end == pytest.approx(1.5)


def test_scaled():
    f = Potential.piecewise([0, 1, 2], [1.0, -3.0]).scaled(0.5)
    assert f.values == (0.5, -1.5)
    assert Potential.preset("powerdecay").scaled(2).evaluate(0.0) == 2.0


def test_integral_of_gaussian_preset():
    f = Potential.preset("gaussian")
    ref = 0.5 * math.sqrt(2 * math.pi) * 0.5 * (math.erf(2 / math.sqrt(2)) + math.erf(2 / math.sqrt(2)))
    assert integral(f, 0, 2).value == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("spec, t, value", [
    ("free", 0.3, 0.0),
    ("constant:q=2,T=1", 0.5, 2.0),
    ("constant:q=2,T=1", 1.5, 0.0),
    ("powerdecay:p=1", 1.0, 0.5),
    ("piecewise:breaks=0;0.5;1,values=1;-1", 0.75, -1.0),
    ("sampled:step=0.5,samples=1;2", 0.6, 2.0),
])
def test_parse_potential(spec, t, value):
    assert parse_potential(spec).evaluate(t) == value


@pytest.mark.parametrize("spec", ["nope", "constant:q", "constant:q=1,x=2", "powerdecay:zz=1"])
def test_parse_potential_errors(spec):
    with pytest.raises(ValueError):
        parse_potential(spec)


def test_csv_round_trip(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("t,f\n0,1.5\n0.25,-1\n0.5,2\n")
    f = Potential.from_csv(path)
    assert f.grid_step == 0.25
    assert f.evaluate(np.array([0.1, 0.3, 0.6, 0.8])).tolist() == [1.5, -1.0, 2.0, 0.0]


def test_csv_rejects_irregular_grid(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("0,1\n0.25,1\n0.7,1\n")
    with pytest.raises(ValueError):
        Potential.from_csv(path)
