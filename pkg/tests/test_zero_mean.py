import numpy as np
import pytest
from numpy.testing import assert_allclose

from annulus_split.annulus_core import (
    Annulus,
    CircleSpec,
    EvaluableFunction,
    RadialLayout,
    make_grid,
    random_admissible_circle,
    sample,
)
from annulus_split.circle_transform import RadialFourierTable, circle_mean
from annulus_split.errors import ConditioningError, ParameterError, PoleError
from annulus_split.zero_mean import (
    ZeroMeanCoefficients,
    ZeroMeanReport,
    check_zero_means,
    fit_harmonic,
    fit_radial_profiles,
    fit_sampled,
    minus_part,
    minus_series,
    plus_part,
    plus_series,
    random_zero_mean,
    synthesize,
)


def _probe_points():
    rng = np.random.default_rng(11)
    return rng.uniform(1.0, 2.0, 64) * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, 64))


def test_coefficient_rows_must_have_harmonic_length():
    with pytest.raises(ParameterError):
        ZeroMeanCoefficients((np.zeros(1), np.zeros(1)), (np.zeros(1), np.zeros(2)))


def test_coefficients_need_a_harmonic():
    with pytest.raises(ParameterError):
        ZeroMeanCoefficients((), ())


def test_from_harmonics_pads_with_zeros():
    coeffs = ZeroMeanCoefficients.from_harmonics({2: [0.0, 1.0], -1: [3.0]}, n_max=3)
    assert coeffs.n_max == 3
    assert_allclose(coeffs.harmonic(2), [0.0, 1.0])
    assert_allclose(coeffs.harmonic(-1), [3.0])
    assert not np.any(coeffs.harmonic(-3))


@pytest.mark.parametrize("harmonics", [{0: []}, {1: [1.0, 2.0]}])
def test_from_harmonics_rejects_bad_rows(harmonics):
    with pytest.raises(ParameterError):
        ZeroMeanCoefficients.from_harmonics(harmonics)


def test_report_verdict_follows_tolerance():
    report = ZeroMeanReport(c0_norm=0.0, c0_relative=0.0, residuals={1: 1e-3, -1: 0.0}, tail_mass=0.0, tol=1e-8, n_max=1)
    assert not report.verdict
    assert report.worst_harmonic() == 1
    assert report.max_residual == 1e-3


@pytest.mark.parametrize(
    "harmonics, expected",
    [
        ({1: [1.0]}, lambda z: 1.0 / np.conj(z)),
        ({-1: [1.0]}, lambda z: 1.0 / z),
        ({2: [0.0, 1.0]}, lambda z: z / np.conj(z)),
        ({-3: [0.0, 1.0, 0.0]}, lambda z: np.conj(z) / z**2),
    ],
)
def test_synthesize_closed_forms(harmonics, expected):
    z = _probe_points()
    assert_allclose(synthesize(ZeroMeanCoefficients.from_harmonics(harmonics))(z), expected(z), rtol=1e-13)


def test_parts_add_up(random_coeffs):
    z = _probe_points()
    assert_allclose(plus_part(random_coeffs)(z) + minus_part(random_coeffs)(z), synthesize(random_coeffs)(z), rtol=1e-13)


def test_series_poles(inverse_pair_coeffs):
    with pytest.raises(PoleError):
        plus_series(inverse_pair_coeffs, 1.0, 0.0)
    with pytest.raises(PoleError):
        minus_series(inverse_pair_coeffs, 0.0, 1.0)


def test_fit_recovers_inverse_conjugate(grid):
    coeffs, report, _ = fit_sampled(sample(EvaluableFunction(lambda z: 1.0 / np.conj(z)), grid), 1)
    assert_allclose(coeffs.harmonic(1), [1.0], atol=1e-12)
    assert report.residuals[1] <= 1e-12
    assert report.verdict


def test_fit_recovers_synthetic_profile(annulus):
    grid = make_grid(annulus, 9, 8)
    coeffs = np.zeros((5, grid.n_r), dtype=complex)
    coeffs[4] = grid.radii**-2 * (2.0 + 3.0 * grid.radii**2)
    table = RadialFourierTable(grid, -2, 2, coeffs)
    fitted, report = fit_radial_profiles(table, annulus, 2)
    assert_allclose(fitted.harmonic(2), [2.0, 3.0], atol=1e-12)
    assert report.residuals[2] <= 1e-12
    assert report.verdict


def test_fit_rejects_identity(grid):
    report = check_zero_means(sample(EvaluableFunction(lambda z: z), grid), 8)
    assert report.residuals[1] >= 1e-2
    assert not report.verdict


@pytest.mark.parametrize(
    "f",
    [lambda z: z, lambda z: np.real(z).astype(complex), lambda z: (np.abs(z) ** 2).astype(complex)],
    ids=["z", "re_z", "abs_z_squared"],
)
def test_detector_rejects_nonzero_means(grid, f):
    report = check_zero_means(sample(EvaluableFunction(f), grid), 8)
    assert not report.verdict
    assert report.max_residual >= 1e-2


def test_zero_function_passes_with_zero_residuals(grid):
    report = check_zero_means(sample(EvaluableFunction(lambda z: np.zeros_like(z)), grid), 4)
    assert report.verdict
    assert report.c0_norm == 0.0
    assert all(v == 0.0 for v in report.residuals.values())


def test_fit_harmonic_needs_distinct_radii(annulus):
    with pytest.raises(ConditioningError):
        fit_harmonic(np.array([1.5, 1.5, 1.5]), np.ones(3), 2, annulus, 1.0)


def test_fit_needs_enough_radii(annulus):
    grid = make_grid(annulus, 2, 16)
    table = RadialFourierTable(grid, -3, 3, np.zeros((7, 2)))
    with pytest.raises(ParameterError):
        fit_radial_profiles(table, annulus, 2)


def test_fit_order_within_table(sampled_inverse_pair):
    with pytest.raises(ParameterError):
        fit_sampled(sampled_inverse_pair, 128)


def test_random_zero_mean_is_deterministic(annulus):
    first = random_zero_mean(7, 8, 0.5, annulus)
    second = random_zero_mean(7, 8, 0.5, annulus)
    assert first.max_abs_difference(second) == 0.0
    assert random_zero_mean(8, 8, 0.5, annulus).max_abs_difference(first) > 0.0


@pytest.mark.parametrize("n_max, decay", [(0, 0.5), (4, 0.0), (4, -1.0)])
def test_random_zero_mean_rejects_bad_arguments(n_max, decay):
    with pytest.raises(ParameterError):
        random_zero_mean(1, n_max, decay)


def test_random_zero_mean_is_well_scaled(annulus, random_coeffs, grid):
    assert np.max(np.abs(synthesize(random_coeffs)(grid.points))) <= 2.0 * sum(np.exp(-0.5 * n) * n for n in range(1, 9))


def test_seeded_series_passes_the_detector(sampled_random):
    assert check_zero_means(sampled_random, 8, tol=1e-9).verdict


def test_round_trip_recovers_coefficients(annulus, random_coeffs, sampled_random, term_scale):
    fitted, _, _ = fit_sampled(sampled_random, 8)
    for n in [*range(1, 9), *range(-8, 0)]:
        error = np.abs(fitted.harmonic(n) - random_coeffs.harmonic(n)) * term_scale(n)
        assert error.max() <= 1e-9, n


@pytest.mark.parametrize("n_max", [10, 12])
def test_round_trip_at_higher_orders(annulus, grid, n_max):
    # monomial coefficients of order 12 are too ill-conditioned to compare one by one
    coeffs = random_zero_mean(3, n_max, 0.5, annulus)
    f = sample(synthesize(coeffs), grid)
    fitted, report, _ = fit_sampled(f, n_max)
    assert report.verdict
    assert np.max(np.abs(synthesize(fitted)(grid.points) - f.values)) <= 1e-9


def test_synthesized_functions_have_zero_circle_means(annulus, random_coeffs):
    rng = np.random.default_rng(5)
    f = synthesize(random_coeffs)
    rotation = synthesize(ZeroMeanCoefficients.from_harmonics({2: [0.0, 1.0]}))
    for _ in range(100):
        c = random_admissible_circle(rng, annulus)
        assert abs(circle_mean(f, c, 512)) <= 1e-10
        assert abs(circle_mean(rotation, c, 512)) <= 1e-12


def test_off_centre_mean_of_identity_is_the_centre():
    assert circle_mean(EvaluableFunction(lambda z: z), CircleSpec(0.3, 1.5)) == pytest.approx(0.3)


@pytest.mark.parametrize("phi", [np.pi / 3, np.pi / 7])
def test_rotation_preserves_coefficient_moduli(annulus, grid, random_coeffs, term_scale, phi):
    f = synthesize(random_coeffs)
    rotated = sample(EvaluableFunction(lambda z: f(np.exp(1j * phi) * z)), grid)
    fitted, _, _ = fit_sampled(rotated, 8)
    for n in [*range(1, 9), *range(-8, 0)]:
        error = np.abs(np.abs(fitted.harmonic(n)) - np.abs(random_coeffs.harmonic(n))) * term_scale(n)
        assert error.max() <= 1e-9, n


def test_wider_annulus_round_trip():
    annulus = Annulus(1.0, 3.0)
    coeffs = random_zero_mean(2, 5, 1.0, annulus)
    fitted, report, _ = fit_sampled(sample(synthesize(coeffs), make_grid(annulus, 33, 128)), 5)
    assert report.verdict
    probe = make_grid(annulus, 17, 64, RadialLayout.UNIFORM).points
    assert_allclose(synthesize(fitted)(probe), synthesize(coeffs)(probe), atol=1e-10)
