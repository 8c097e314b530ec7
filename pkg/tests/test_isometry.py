import cmath
import math

import numpy as np
import pytest

from ferrand.capacities import tau
from ferrand.isometry import (
    Composition, Mobius, NotAnIsometryError, PoleError, RadialPower, apply, certified_pairs,
    certify_isometry, compose, dilatation_bound_profile, lambda_distortion, linear_dilatation,
    punctured_dilatation_check, sphere_condenser, sphere_ordering_margins,
)
from ferrand.condenser.solver import estimate_capacity
from ferrand.metrics import PuncturedPair, lambda_punctured, p_unit_circle


# --- maps -------------------------------------------------------------------

def test_identity_and_examples():
    for z in (1 + 2j, -0.3j, 5.0):
        assert apply(Mobius.identity(), z) == z
    f = compose(Mobius.scaling(2), Mobius.inversion(1))
    assert isinstance(f, Mobius)
    assert apply(f, 1) == pytest.approx(0.5)
    assert apply(RadialPower(2.0), 3) == pytest.approx(9.0)


def test_mobius_errors():
    with pytest.raises(ValueError):
        Mobius(1, 2, 2, 4)
    with pytest.raises(PoleError):
        Mobius.inversion(1)(0)
    with pytest.raises(ValueError):
        RadialPower(0.0)
    with pytest.raises(ValueError):
        Composition(())


def test_composition_keeps_non_mobius_factors():
    f = compose(Mobius.scaling(2), RadialPower(3.0), Mobius.scaling(1j), Mobius.inversion(2))
    assert isinstance(f, Composition) and len(f.maps) == 3
    z = 0.4 + 0.7j
    w = 2 * z
    w = w * abs(w) ** 2
    assert f(z) == pytest.approx(2 / (1j * w))
    assert f.inverse()(f(z)) == pytest.approx(z)


def test_radial_power_preserves_arguments():
    f = RadialPower(0.5)
    z = 4 * cmath.exp(1.1j)
    assert f(z) == pytest.approx(2 * cmath.exp(1.1j))
    assert f.inverse()(f(z)) == pytest.approx(z)


def test_punctured_compatibility():
    assert Mobius.scaling(3j).punctured_compatible
    assert Mobius.inversion(2).punctured_compatible
    assert not Mobius(1, 1, 0, 1).punctured_compatible
    with pytest.raises(ValueError):
        lambda_distortion(Mobius(1, 1, 0, 1))


# --- lambda distortion ----------------------------------------------------------

def test_similarity_on_collinear_pairs():
    pairs = [PuncturedPair(x, q * x) for x in (1, 1j, 2 + 1j, -0.5 + 0.2j, 3)
             for q in np.linspace(1.1, 5, 10)]
    assert len(pairs) == 50
    assert lambda_distortion(Mobius.scaling(5), pairs).max_discrepancy <= 1e-11


def test_inversion_on_axis_pairs():
    pairs = [PuncturedPair(1, r) for r in (0.1, 0.5, 2.0, 3.0, 10.0)]
    assert lambda_distortion(Mobius.inversion(1), pairs).max_discrepancy <= 1e-11


def test_radial_power_witness():
    rep = lambda_distortion(RadialPower(2.0), [PuncturedPair(1, 2)])
    assert rep.max_discrepancy == pytest.approx(tau(1) - tau(3), rel=1e-12)
    assert rep.max_discrepancy > 0


@pytest.mark.parametrize("f", [Mobius.scaling(3), Mobius.scaling(0.2 + 0.4j),
                               Mobius.inversion(2), Mobius.inversion(1 + 1j)])
def test_isometries_certify(f):
    rep = certify_isometry(f)
    assert rep.max_discrepancy <= 1e-10
    assert rep.checked == len(certified_pairs()) - len(rep.skipped)


def test_non_isometry_refused():
    with pytest.raises(NotAnIsometryError):
        certify_isometry(RadialPower(2.0))


def test_generic_image_pairs_are_skipped():
    # z -> z |z| sends a unit-circle pair off the circle only if moduli differ, so
    # use a collinear pair through a map that rotates by modulus-dependent angle
    pair = PuncturedPair(1, 1j)
    rep = lambda_distortion(RadialPower(2.0), [pair, PuncturedPair(1, 2)])
    assert rep.skipped == ()
    gen = PuncturedPair(1, 2 + 1j)
    rep = lambda_distortion(Mobius.scaling(2), [gen, PuncturedPair(1, 2)])
    assert rep.skipped == (0,) and rep.any_skipped and rep.checked == 1


# --- dilatation ---------------------------------------------------------------

def test_identity_ratios_are_one():
    rep = linear_dilatation(Mobius.identity(), 0.3 + 0.2j)
    # differences of nearby points lose digits at the smallest radius
    assert all(r == pytest.approx(1.0, abs=1e-9) for r in rep.ratios)


def test_similarity_ratio_one():
    rep = linear_dilatation(Mobius.scaling(2), 3)
    assert rep.limsup == pytest.approx(1.0, abs=1e-9)


def test_radial_power_dilatation():
    rep = linear_dilatation(RadialPower(2.0), 1, radii=(0.1, 0.01, 0.001))
    assert abs(rep.limsup - 2.0) / 2.0 <= 0.05
    assert all(r >= 1 for r in rep.ratios)


def test_dilatation_errors():
    with pytest.raises(ValueError):
        linear_dilatation(Mobius.identity(), 1, samples=4)
    with pytest.raises(PoleError):
        linear_dilatation(Mobius.inversion(1), 0)
    with pytest.raises(PoleError):
        linear_dilatation(Mobius.inversion(1), 0.5, radii=(0.6,))


@pytest.mark.parametrize("f", [Mobius.scaling(3), Mobius.inversion(1), Mobius.inversion(2j)])
def test_isometries_have_dilatation_at_most_four(f):
    chk = punctured_dilatation_check(f)
    assert chk.holds
    assert chk.max_estimate <= 4
    # Möbius maps are conformal
    assert chk.max_estimate == pytest.approx(1.0, abs=1e-2)


def test_dilatation_check_refuses_non_isometry():
    with pytest.raises(NotAnIsometryError):
        punctured_dilatation_check(RadialPower(2.0))


# --- bound profile --------------------------------------------------------------

@pytest.mark.parametrize("r", [0.3, 0.1, 0.03, 0.01, 0.003, 0.001])
def test_profile_below_256(r):
    p = dilatation_bound_profile(r)
    assert 0 < p.tau_form <= 256
    assert p.leading_form <= p.majorant


def test_majorant_bounds_leading_form_everywhere():
    for r in np.linspace(0.01, 0.99, 50):
        p = dilatation_bound_profile(r)
        assert p.leading_form <= p.majorant


def test_profile_limit_is_64():
    # tau(s) ~ (2/pi) log(16/s) as s -> 0 gives numerator ~ 8r and
    # sqrt(v/(1+v)) ~ r/8, so the ratio tends to 64, a quarter of 256
    assert dilatation_bound_profile(1e-6).tau_form == pytest.approx(64.0, rel=1e-5)


def test_profile_routes_agree():
    for r in (0.5, 0.1, 0.01, 0.001):
        assert dilatation_bound_profile(r).route_gap <= 1e-8


def test_leading_form_approaches_the_exact_route():
    gaps = [abs(dilatation_bound_profile(r).leading_form / dilatation_bound_profile(r).tau_form - 1)
            for r in (0.1, 0.01, 0.001)]
    assert gaps[0] > gaps[1] > gaps[2]
    # the dropped factor is 1 - O(r)
    assert gaps[2] < 10 * 0.001


def test_profile_stabilizes():
    a = dilatation_bound_profile(0.003).tau_form
    b = dilatation_bound_profile(0.001).tau_form
    assert abs(a - b) / b <= 0.05


def test_profile_domain():
    for r in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            dilatation_bound_profile(r)


# --- sphere ordering -------------------------------------------------------------

def test_closed_form_ordering_on_sampled_circle():
    # every point of |z| = 2 other than 2 is strictly closer to e1 in lambda
    top = tau(1.0)
    for th in np.linspace(0.1, 2 * math.pi - 0.1, 40):
        assert lambda_punctured(1, 2 * cmath.exp(1j * th)).lower < top


def test_sphere_condenser_shape():
    spec = sphere_condenser(2.0, math.pi / 2)
    assert spec.plate_f[0].start == pytest.approx(2j)
    assert spec.compactification == "auto"


def test_theta_zero_refused():
    with pytest.raises(ValueError):
        sphere_ordering_margins(2.0, [0.0])
    with pytest.raises(ValueError):
        sphere_ordering_margins(2.0, [2 * math.pi])
    with pytest.raises(ValueError):
        sphere_ordering_margins(1.0, [1.0])


@pytest.mark.slow
@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@pytest.mark.parametrize("theta", [math.pi / 4, math.pi / 2, math.pi])
def test_sphere_margins(theta):
    (m,) = sphere_ordering_margins(2.0, [theta])
    assert m.closed_form == pytest.approx(2.0, rel=1e-12)
    assert m.relative_margin > 0.02


@pytest.mark.slow
@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_sphere_margin_near_axis_still_brackets():
    (m,) = sphere_ordering_margins(2.0, [0.05])
    assert m.oracle_value <= m.closed_form * 1.02


@pytest.mark.slow
@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@pytest.mark.parametrize("theta", [math.pi / 2, math.pi])
def test_unit_circle_formula_against_oracle(theta):
    # the radial ray is one admissible continuum, so p lies below its modulus;
    # on the negative axis it is the extremal one
    oracle = estimate_capacity(sphere_condenser(1.0, theta)).best
    p = p_unit_circle(theta)
    assert p <= oracle * 1.02
    if theta == math.pi:
        assert abs(p - oracle) / p <= 0.02
