import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from annulus_split.annulus_core import C2Point, CircleSpec, Side
from annulus_split.errors import InvariantViolation, ParameterError, PoleError
from annulus_split.lambda_domains import (
    LambdaSpec,
    OmegaMembership,
    Region,
    boundary_approach_path,
    classify_points,
    eval_F,
    eval_F_t,
    eval_G_minus,
    eval_G_plus,
    eval_Psi,
    eval_Psi_t,
    fiber_point,
    lambda_contains,
    lambda_intersect_plus_minus,
    lambda_intersect_plus_plus,
    omega_membership,
    reflect,
    sample_omega_plus,
    transform_T,
)
from annulus_split.zero_mean import ZeroMeanCoefficients, synthesize

LEAF = CircleSpec(0.0, 1.5)


@pytest.mark.parametrize("s, plus, minus", [(0.5, True, False), (2.0, False, True)])
def test_lambda_contains_fiber_points(s, plus, minus):
    p = fiber_point(LEAF, s, 0.3)
    assert lambda_contains(p, LambdaSpec(LEAF, Side.PLUS)) is plus
    assert lambda_contains(p, LambdaSpec(LEAF, "minus")) is minus


def test_lambda_contains_rejects_points_off_the_quadric():
    assert not lambda_contains(C2Point(0.5, 0.5), LambdaSpec(LEAF, Side.PLUS))


def test_fiber_point_needs_positive_parameter():
    with pytest.raises(ParameterError):
        fiber_point(LEAF, 0.0, 0.0)


@pytest.mark.parametrize(
    "z, w, region",
    [(1.0, 4.0, Region.PLUS), (4.0, 1.0, Region.MINUS), (2.0, 2.0, Region.BOUNDARY_SIGMA), (0.1, 0.1, Region.OUTSIDE)],
)
def test_membership_examples(wide_annulus, z, w, region):
    membership = omega_membership(C2Point(z, w), wide_annulus)
    assert membership.region is region
    if region in (Region.PLUS, Region.MINUS):
        assert membership.witness_center == pytest.approx(0.0, abs=1e-8)


def test_membership_needs_a_witness():
    with pytest.raises(InvariantViolation):
        OmegaMembership(Region.PLUS, None, 0.0)


def test_sampled_leaf_points_are_recovered(wide_annulus):
    z, w, centers = sample_omega_plus(np.random.default_rng(7), wide_annulus, 200)
    plus = classify_points(z, w, wide_annulus)
    assert all(m.region is Region.PLUS for m in plus)
    assert_allclose([m.witness_center for m in plus], centers, atol=1e-6)
    minus = classify_points(np.conj(w), np.conj(z), wide_annulus)
    assert all(m.region is Region.MINUS for m in minus)


def test_sample_omega_plus_needs_points(annulus):
    with pytest.raises(ParameterError):
        sample_omega_plus(np.random.default_rng(0), annulus, 0)


@pytest.mark.parametrize(
    "c1, c2, pp, pm",
    [
        (CircleSpec(0.0, 1.0), CircleSpec(0.2, 1.5), True, False),
        (CircleSpec(0.0, 1.0), CircleSpec(3.0, 1.0), False, True),
        (CircleSpec(0.0, 1.0), CircleSpec(1.5, 1.0), False, False),
        (CircleSpec(0.0, 1.0), CircleSpec(0.0, 2.0), False, False),
    ],
)
def test_intersection_predicates(c1, c2, pp, pm):
    assert lambda_intersect_plus_plus(c1, c2) is pp
    assert lambda_intersect_plus_plus(c2, c1) is pp
    assert lambda_intersect_plus_minus(c1, c2) is pm


def test_identical_plus_leaves_are_rejected():
    with pytest.raises(ParameterError):
        lambda_intersect_plus_plus(LEAF, CircleSpec(0.0, 1.5))


def test_G_examples():
    p = C2Point(2.0, 5.0)
    assert eval_G_plus(ZeroMeanCoefficients.from_harmonics({1: [1.0]}), p) == pytest.approx(1.0)
    assert eval_G_minus(ZeroMeanCoefficients.from_harmonics({-2: [1.0, 0.0]}), p) == pytest.approx(0.5)


def test_G_on_the_boundary(random_coeffs):
    z = 1.3 * np.exp(0.7j)
    p = C2Point(z, np.conj(z))
    assert eval_G_plus(random_coeffs, p) == pytest.approx(np.conj(z) * eval_F(random_coeffs, Side.PLUS, p))
    assert eval_G_minus(random_coeffs, p) == pytest.approx(z * eval_F(random_coeffs, Side.MINUS, p))


def test_F_t_damps_the_first_harmonic():
    coeffs = ZeroMeanCoefficients.from_harmonics({1: [1.0]})
    assert eval_F_t(coeffs, Side.PLUS, 0.5, C2Point(1.0, 4.0)) == pytest.approx(0.125)


def test_F_t_on_the_boundary_is_the_abel_mean(inverse_pair_coeffs):
    z = 1.5 * np.exp(0.4j)
    assert eval_F_t(inverse_pair_coeffs, Side.PLUS, 0.5, C2Point(z, np.conj(z))) == pytest.approx(0.5 / np.conj(z))
    assert eval_F_t(inverse_pair_coeffs, "minus", 0.5, C2Point(z, np.conj(z))) == pytest.approx(0.5 / z)


@pytest.mark.parametrize("side", list(Side))
def test_damping_is_the_scaling_map(random_coeffs, side):
    p = C2Point(1.2 + 0.4j, 0.9 - 0.3j)
    direct = eval_F_t(random_coeffs, side, 0.8, p)
    assert direct == pytest.approx(eval_F(random_coeffs, side, transform_T(p, 0.8, side)), rel=1e-12)


def test_F_minus_pole_at_zero(random_coeffs):
    with pytest.raises(PoleError):
        eval_F(random_coeffs, Side.MINUS, C2Point(0.0, 1.0))


def test_psi_of_inverse_pair(inverse_pair_coeffs):
    assert eval_Psi(inverse_pair_coeffs, C2Point(1.0, 4.0)) == pytest.approx(0.5)


def test_psi_restricts_to_f(random_coeffs):
    z = np.array([1.1 + 0.2j, -1.4j, 1.9])
    f = synthesize(random_coeffs)(z)
    assert_allclose([eval_Psi(random_coeffs, C2Point(zi, np.conj(zi))) for zi in z], f, rtol=1e-12)


def test_psi_t_tends_to_psi(random_coeffs):
    p = C2Point(1.0, 4.0)
    assert eval_Psi_t(random_coeffs, 1.0 - 1e-9, p) == pytest.approx(eval_Psi(random_coeffs, p), abs=1e-7)


def test_psi_of_zero():
    assert eval_Psi(ZeroMeanCoefficients.zeros(3), C2Point(1.0, 4.0)) == 0.0


def test_reflect_examples():
    c = CircleSpec(0.2, 1.5)
    on_circle = 0.2 + 1.5 * np.exp(1j)
    assert reflect(on_circle, c) == pytest.approx(on_circle)
    assert reflect(0.95, c) == pytest.approx(3.2)


def test_reflect_centre_is_a_pole():
    with pytest.raises(PoleError):
        reflect(0.2, CircleSpec(0.2, 1.5))


@given(
    radius=st.floats(0.1, 5.0),
    offset=st.complex_numbers(min_magnitude=0.05, max_magnitude=10.0),
)
def test_reflect_is_an_involution(radius, offset):
    c = CircleSpec(0.3 - 0.1j, radius)
    zeta = c.center + offset
    assert reflect(reflect(zeta, c), c) == pytest.approx(zeta, rel=1e-9, abs=1e-9)


def test_boundary_approach_distances(annulus):
    z0 = 1.5 * np.exp(0.3j)
    target = C2Point(z0, np.conj(z0))
    path = boundary_approach_path(z0, annulus)
    assert len(path) == 13
    for step in path:
        assert 0.0 < step.s < 1.0
        assert step.point.distance(target) == pytest.approx(step.distance, rel=1e-9)
    assert path[-1].distance == pytest.approx(1e-4)
    assert omega_membership(path[0].point, annulus).region is Region.PLUS


@pytest.mark.parametrize("z0, distances", [(0.5, None), (2.0, None), (1.5, [0.1, -1.0])])
def test_boundary_approach_rejects_bad_input(annulus, z0, distances):
    with pytest.raises(ParameterError):
        boundary_approach_path(z0, annulus, distances)
