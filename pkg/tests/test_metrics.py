import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ferrand.capacities import AbstractModeError, CapacityEvaluator, tau
from ferrand.elliptic import mu
from ferrand.metrics import (
    BoundedValue, DomainSpec, EmptyIntersectionError, PuncturedPair, TraceError,
    hyperbolic_distance_ball, lambda_ball, lambda_general_bounds, lambda_punctured, p_axis,
    p_lower, p_negative_axis, p_unit_circle, sandwich_punctured, trace_metric_sphere,
)

disk_pts = st.builds(lambda r, a: r * cmath.exp(1j * a), st.floats(0, 0.95), st.floats(0, 2 * math.pi))
plane_pts = st.builds(lambda r, a: r * cmath.exp(1j * a), st.floats(0.05, 20), st.floats(0, 2 * math.pi))


# --- bounded values -------------------------------------------------------

def test_bounded_value_invariants():
    with pytest.raises(ValueError):
        BoundedValue(2.0, 1.0)
    with pytest.raises(ValueError):
        BoundedValue(1.0, 2.0, exact=True)
    b = BoundedValue(1.0, 3.0)
    assert b.contains(2.0) and not b.contains(3.5)
    assert b.value is None and BoundedValue.exactly(2.0).value == 2.0


def test_intersection():
    b = BoundedValue(1.0, 3.0).intersect(BoundedValue(2.0, math.inf))
    assert (b.lower, b.upper, b.exact) == (2.0, 3.0, False)
    e = BoundedValue(1.0, 3.0).intersect(BoundedValue.exactly(2.5))
    assert e.exact and e.lower == 2.5
    with pytest.raises(EmptyIntersectionError):
        BoundedValue(1.0, 2.0).intersect(BoundedValue(2.5, 3.0))


# --- unit ball --------------------------------------------------------------

def test_hyperbolic_distance_examples():
    assert hyperbolic_distance_ball(0, 0) == 0
    assert hyperbolic_distance_ball(0, 0.5) == pytest.approx(math.log(3), rel=1e-15)
    assert hyperbolic_distance_ball([0, 0, 0], [0, 0, 0.5]) == pytest.approx(math.log(3), rel=1e-15)


def _disk_automorphism(a):
    return lambda z: (z - a) / (1 - a.conjugate() * z)


@given(disk_pts, disk_pts, disk_pts)
def test_hyperbolic_distance_is_invariant_and_a_metric(x, y, a):
    d = hyperbolic_distance_ball(x, y)
    f = _disk_automorphism(a)
    assert hyperbolic_distance_ball(f(x), f(y)) == pytest.approx(d, rel=1e-8, abs=1e-10)
    assert hyperbolic_distance_ball(y, x) == d
    rot = cmath.exp(0.7j)
    assert hyperbolic_distance_ball(rot * x, rot * y) == pytest.approx(d, rel=1e-12, abs=1e-14)
    assert d <= hyperbolic_distance_ball(x, a) + hyperbolic_distance_ball(a, y) + 1e-12


def test_hyperbolic_distance_domain():
    with pytest.raises(ValueError):
        hyperbolic_distance_ball(0, 1.0)


def test_lambda_ball_closed_form():
    t = 0.5
    assert lambda_ball(0, t).value == pytest.approx(math.pi / (2 * mu(math.sqrt(1 - t * t))), rel=1e-13)


def test_lambda_ball_symmetries():
    assert lambda_ball(0, 0.3).value == pytest.approx(lambda_ball(0, 0.3j).value, rel=1e-12)
    x, y = 0.2 + 0.1j, -0.4 + 0.5j
    assert lambda_ball(x, y).value == pytest.approx(lambda_ball(-x, -y).value, rel=1e-12)


def test_lambda_ball_decreasing_and_errors():
    vals = [lambda_ball(0, t).value for t in np.linspace(0.01, 0.99, 99)]
    assert np.all(np.diff(vals) < 0)
    with pytest.raises(ValueError):
        lambda_ball(0.3, 0.3)
    with pytest.raises(AbstractModeError):
        lambda_ball([0, 0, 0], [0.1, 0, 0], CapacityEvaluator(3))


# --- p ---------------------------------------------------------------------

def test_p_axis():
    assert p_axis(2) == pytest.approx(2.0, rel=1e-12)
    assert p_axis(3) < p_axis(1.5)
    assert p_axis(2) >= p_lower(2 + 0j) * (1 - 1e-15)
    with pytest.raises(ValueError):
        p_axis(1.0)


def test_p_negative_axis_meets_lower_bound():
    for t in (0.1, 1.0, 5.0):
        assert p_negative_axis(t) == pytest.approx(p_lower(-t + 0j), rel=1e-15)


def test_unit_circle_formula_gate():
    # the value at theta = pi coincides with tau(1) and the sandwich's upper end
    assert p_unit_circle(math.pi) == pytest.approx(2.0, rel=1e-15)
    assert p_unit_circle(math.pi) == pytest.approx(tau(1.0), rel=1e-12)
    assert p_unit_circle(math.pi / 3) == pytest.approx(p_unit_circle(5 * math.pi / 3), rel=1e-12)
    for th in (math.pi / 2, math.pi, 3 * math.pi / 2):
        assert p_unit_circle(th) >= tau(min(1.0, abs(cmath.exp(1j * th) - 1))) * (1 - 1e-15)


def test_unit_circle_minimum_at_pi():
    ths = np.linspace(0.05, 2 * math.pi - 0.05, 201)
    vals = np.array([p_unit_circle(t) for t in ths])
    assert vals.min() >= 2 - 1e-12
    assert abs(ths[vals.argmin()] - math.pi) < 0.05


@pytest.mark.parametrize("th", [0.0, 2 * math.pi, -1.0])
def test_unit_circle_domain(th):
    with pytest.raises(ValueError):
        p_unit_circle(th)


# --- punctured plane --------------------------------------------------------

def test_punctured_examples():
    v = lambda_punctured(1, 2)
    assert v.exact and v.lower == pytest.approx(2.0, rel=1e-12)
    w = lambda_punctured(1, -1)
    assert w.exact and w.lower == pytest.approx(2.0, rel=1e-12)
    y = 2 * cmath.exp(1j * math.pi / 4)
    b = lambda_punctured(1, y)
    assert not b.exact
    assert b.lower == pytest.approx(tau(abs(1 - y)), rel=1e-14)
    assert b.upper == pytest.approx(tau(abs(1 - y) / 2), rel=1e-14)


def test_punctured_errors():
    with pytest.raises(ValueError):
        lambda_punctured(0, 1)
    with pytest.raises(ValueError):
        lambda_punctured(1 + 1j, 1 + 1j)


def test_classification():
    assert PuncturedPair(1, 3).classify() == "positive-axis"
    assert PuncturedPair(1j, -2j).classify() == "negative-axis"
    assert PuncturedPair(2, 2j).classify() == "unit-circle"
    assert PuncturedPair(1, 2 + 1j).classify() == "generic"
    # ratios within the tolerance count as exact, outside do not
    assert PuncturedPair(1, 2 + 1e-13j).classify() == "positive-axis"
    assert PuncturedPair(1, 2 + 1e-9j).classify() == "generic"


@given(plane_pts, plane_pts, st.sampled_from([0.1, 7.0, 2j, cmath.exp(1j)]))
def test_similarity_invariance(x, y, c):
    assume(abs(x - y) > 1e-6 * abs(x))
    a = lambda_punctured(x, y)
    b = lambda_punctured(c * x, c * y)
    assert b.lower == pytest.approx(a.lower, rel=1e-10)
    assert b.upper == pytest.approx(a.upper, rel=1e-10)


def _exactly_known(k):
    rot = cmath.exp(0.37j * k)
    x = (0.3 + 0.45 * (k % 7)) * rot
    q = [1.05 + 0.173 * (k % 23), -(0.1 + 0.211 * (k % 19)), 1 / (1.1 + 0.3 * (k % 11)),
         cmath.exp(1j * (0.05 + (2 * math.pi - 0.1) * ((k * 0.618034) % 1)))][k % 4]
    return PuncturedPair(x, q * x)


def test_sandwich_brackets_exact_values():
    for k in range(200):
        pair = _exactly_known(k)
        v = lambda_punctured(pair)
        assert v.exact
        assert sandwich_punctured(pair).contains(v.lower, rtol=1e-12)


def test_collinear_lower_end_is_exact():
    for q in (1.01, 1.5, 2.0, 10.0, 0.3):
        pair = PuncturedPair(0.7 + 0.2j, q * (0.7 + 0.2j))
        assert sandwich_punctured(pair).lower == pytest.approx(lambda_punctured(pair).lower, rel=1e-12)


@given(plane_pts, plane_pts)
def test_symmetry_is_exact(x, y):
    assume(x != y)
    assert lambda_punctured(x, y) == lambda_punctured(y, x)


@pytest.mark.parametrize("z", [2.0, 0.25, -3.0, -0.5, cmath.exp(1j), cmath.exp(2.5j)])
def test_inversion_symmetry_at_e1(z):
    a = lambda_punctured(1, z).lower
    b = lambda_punctured(1, z / abs(z) ** 2).lower
    assert a == pytest.approx(b, rel=1e-12)


def test_unit_circle_branches_agree():
    # p(q) and p(1/q) coincide when |q| = 1
    for th in (0.3, 1.0, 2.0, 3.0):
        assert p_unit_circle(th) == pytest.approx(p_unit_circle(2 * math.pi - th), rel=1e-14)


@given(plane_pts, plane_pts)
def test_generic_interval_respects_lower_bound(x, y):
    assume(abs(x - y) > 1e-3)
    b = lambda_punctured(x, y)
    s = sandwich_punctured(PuncturedPair(x, y))
    assert s.lower <= b.lower <= b.upper <= s.upper


# --- general domains --------------------------------------------------------

def test_local_bounds_bracket_collinear_value():
    b = lambda_general_bounds(DomainSpec("punctured"), 1, 1.5)
    assert b.lower == pytest.approx(0.5 * tau(0.25 / 0.75), rel=1e-14)
    assert b.upper == pytest.approx(tau(0.25), rel=1e-14)
    assert b.contains(tau(0.5))


def test_local_bounds_grow_as_r_shrinks():
    prev = None
    for r in (0.5, 0.1, 0.01):
        b = lambda_general_bounds(DomainSpec("punctured"), 1, 1 + r)
        assert b.lower <= b.upper
        if prev:
            assert b.lower > prev.lower and b.upper > prev.upper
        prev = b


def test_local_bounds_contain_exact_values():
    dom = DomainSpec("punctured")
    n = 0
    for k in range(200):
        pair = _exactly_known(k)
        v = lambda_punctured(pair).lower
        for a, b in ((pair.x, pair.y), (pair.y, pair.x)):
            if abs(a - b) < abs(a):
                assert lambda_general_bounds(dom, a, b).contains(v, rtol=1e-12)
                n += 1
    assert n > 50


def test_local_bounds_in_the_ball_contain_exact_value():
    b = lambda_general_bounds(DomainSpec("unit-ball"), 0.1, 0.3)
    assert b.contains(lambda_ball(0.1, 0.3).value)


def test_local_bounds_refusals():
    with pytest.raises(ValueError):
        lambda_general_bounds(DomainSpec("punctured"), 1, 2.2)
    dom = DomainSpec("general", boundary_distance=lambda p: 0.0)
    with pytest.raises(ValueError):
        lambda_general_bounds(dom, 1, 1.1)
    with pytest.raises(ValueError):
        DomainSpec("general")


def test_general_domain_with_callable_distance():
    # upper half plane: d(x) = Im x
    dom = DomainSpec("general", boundary_distance=lambda p: p[1])
    b = lambda_general_bounds(dom, 1j, 1.5j)
    assert 0 < b.lower < b.upper


# --- metric spheres ---------------------------------------------------------

def test_trace_axis_crossing():
    tr = trace_metric_sphere(1, 2.0, rays=8)
    # ray 0 points away from the origin: lambda(e1, y) = tau(|y| - 1) = 2 at |y| = 2
    assert tr.exact[0] and tr.inner[0] == pytest.approx(1.0, rel=1e-12)
    assert tr.outer[0] == pytest.approx(1.0, rel=1e-12)
    assert np.all(tr.inner <= tr.outer)


def test_trace_scales_with_centre():
    a = trace_metric_sphere(1, 2.0, rays=12)
    b = trace_metric_sphere(2, 2.0, rays=12)
    assert np.allclose(b.inner, 2 * a.inner, rtol=1e-9)
    assert np.allclose(b.outer, 2 * a.outer, rtol=1e-9)


def test_trace_certifies_levels():
    tr = trace_metric_sphere(1 + 0.5j, 2.5, rays=10)
    for k, ang in enumerate(tr.angles):
        u = cmath.exp(1j * ang)
        inside = lambda_punctured(tr.center, tr.center + 0.999 * tr.inner[k] * u)
        outside = lambda_punctured(tr.center, tr.center + 1.001 * tr.outer[k] * u)
        assert inside.lower >= 2.5
        assert outside.upper <= 2.5


def test_trace_errors():
    with pytest.raises(ValueError):
        trace_metric_sphere(0, 2.0)
    with pytest.raises(TraceError):
        trace_metric_sphere(1, 1e-3, rays=4)
