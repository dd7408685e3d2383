"""Splitting f = f+ + f- for zero-mean functions on the annulus.

`split` reads the decomposition straight off the fitted coefficients; `abel_path_split` walks the
damped means f_t+ and f_t- toward t = 1 and records how fast they approach the closed forms.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .annulus_core import (
    Annulus,
    CircleSpec,
    EvaluableFunction,
    SampledAnnulusFunction,
    Side,
    circle_in_annulus_surrounding_origin,
    random_admissible_circle,
    sample,
)
from .circle_transform import (
    DEFAULT_NODES,
    AbelParameter,
    RadialFourierTable,
    abel_mean,
    abel_minus,
    abel_plus,
    aliasing_cutoff,
    fourier_coefficients,
    radial_fourier,
)
from .errors import HolderEstimationError, ParameterError, ZeroMeanRejected
from .zero_mean import (
    DEFAULT_TOL,
    ZeroMeanCoefficients,
    ZeroMeanReport,
    fit_radial_profiles,
    fit_sampled,
    minus_part,
    plus_part,
)

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-12
MIN_HOELDER_SCALES = 3
SCALE_RTOL = 1e-9


def default_t_schedule() -> list[AbelParameter]:
    return [AbelParameter(1.0 - 2.0**-k) for k in range(1, 13)]


@dataclass(frozen=True, eq=False)
class Decomposition:
    plus: EvaluableFunction
    minus: EvaluableFunction
    coeffs: ZeroMeanCoefficients
    report: ZeroMeanReport
    diagnostics: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ExtensionResidual:
    circle: CircleSpec
    side: Side
    offending_coefficient_norm: float
    worst_index: int

    def passes(self, tol: float) -> bool:
        return self.offending_coefficient_norm <= tol


@dataclass(frozen=True)
class AbelStep:
    t: float
    plus_distance: float
    minus_distance: float
    mean_distance: float


@dataclass
class ConvergenceLog:
    steps: list[AbelStep] = field(default_factory=list)
    monotone: bool = True
    coefficient_agreement: float = 0.0
    profile_agreement: float = 0.0

    @property
    def plus_distances(self) -> list[float]:
        return [step.plus_distance for step in self.steps]


def _grid_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))


def _decomposition_from(
    f: SampledAnnulusFunction, coeffs: ZeroMeanCoefficients, report: ZeroMeanReport
) -> Decomposition:
    plus, minus = plus_part(coeffs), minus_part(coeffs)
    points = f.grid.points
    reconstruction = _grid_distance(plus(points) + minus(points), f.values)
    diagnostics = {
        "c0_residual": report.c0_norm,
        "tail_mass": report.tail_mass,
        "reconstruction": reconstruction,
        "max_residual": report.max_residual,
    }
    return Decomposition(plus, minus, coeffs, report, diagnostics)


def split(
    f: SampledAnnulusFunction, n_max: int, tol: float = DEFAULT_TOL, hoelder: bool = False
) -> Decomposition:
    coeffs, report, _ = fit_sampled(f, n_max, tol)
    if not report.verdict:
        logger.warning("rejecting split: zero-mean verdict false (max residual %.3e)", report.max_residual)
        raise ZeroMeanRejected(report)

    decomposition = _decomposition_from(f, coeffs, report)
    if hoelder:
        decomposition.diagnostics["hoelder"] = {
            "f": hoelder_estimate(f),
            "plus": hoelder_estimate(sample(decomposition.plus, f.grid)),
            "minus": hoelder_estimate(sample(decomposition.minus, f.grid)),
        }
    logger.info(
        "split n_max=%d reconstruction=%.3e tail_mass=%.3e",
        n_max,
        decomposition.diagnostics["reconstruction"],
        report.tail_mass,
    )
    return decomposition


def _validate_schedule(t_schedule: Sequence[AbelParameter | float]) -> list[float]:
    values = [t.t if isinstance(t, AbelParameter) else AbelParameter(float(t)).t for t in t_schedule]
    if not values:
        raise ParameterError("t schedule is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ParameterError(f"t schedule must be strictly increasing, got {values}")
    return values


def abel_path_split(
    f: SampledAnnulusFunction,
    n_max: int,
    t_schedule: Sequence[AbelParameter | float] | None = None,
    tol: float = DEFAULT_TOL,
) -> tuple[Decomposition, ConvergenceLog]:
    """Decompose along the Abel path; the log records sup distances on the source grid."""
    ts = _validate_schedule(default_t_schedule() if t_schedule is None else t_schedule)
    decomposition = split(f, n_max, tol)

    cutoff = aliasing_cutoff(f.grid.n_theta)
    table = radial_fourier(f, -cutoff, cutoff)
    points = f.grid.points
    f_plus = decomposition.plus(points)
    f_minus = decomposition.minus(points)

    log = ConvergenceLog()
    for t in ts:
        step = AbelStep(
            t=t,
            plus_distance=_grid_distance(abel_plus(table, t).values, f_plus),
            minus_distance=_grid_distance(abel_minus(table, t).values, f_minus),
            mean_distance=_grid_distance(abel_mean(table, t).values, f.values),
        )
        log.steps.append(step)
        logger.info(
            "abel t=%.6f plus=%.3e minus=%.3e mean=%.3e",
            step.t,
            step.plus_distance,
            step.minus_distance,
            step.mean_distance,
        )

    for prev, nxt in zip(log.steps, log.steps[1:]):
        if nxt.plus_distance > prev.plus_distance + MONOTONE_SLACK or (
            nxt.minus_distance > prev.minus_distance + MONOTONE_SLACK
        ):
            log.monotone = False
            logger.warning("abel distances increased between t=%.6f and t=%.6f", prev.t, nxt.t)

    # undo the damping of the last mean and fit again: a second route to the same coefficients
    t_last = ts[-1]
    damped = radial_fourier(abel_mean(table, t_last), -cutoff, cutoff)
    ks = np.abs(np.arange(damped.k_min, damped.k_max + 1))[:, None]
    undamped = RadialFourierTable(table.grid, damped.k_min, damped.k_max, damped.coeffs / t_last**ks)
    path_coeffs, _ = fit_radial_profiles(undamped, f.grid.annulus, n_max, tol=tol, scale=f.sup_norm)
    log.coefficient_agreement = decomposition.coeffs.max_abs_difference(path_coeffs)
    log.profile_agreement = decomposition.coeffs.max_profile_difference(path_coeffs, f.grid.radii)
    logger.info(
        "abel path coefficient agreement %.3e (radial profiles %.3e)",
        log.coefficient_agreement,
        log.profile_agreement,
    )
    return decomposition, log


def check_circle_extension(
    g: EvaluableFunction,
    c: CircleSpec,
    side: Side | str,
    n_probe: int = DEFAULT_NODES,
    annulus: Annulus | None = None,
) -> ExtensionResidual:
    """Largest Fourier coefficient of g on the circle that a one-sided extension forbids.

    plus: a holomorphic extension into the disc leaves only k >= 0.
    minus: a holomorphic extension outside vanishing at infinity leaves only k < 0.
    """
    side = Side(side)
    if not c.surrounds_origin():
        raise ParameterError(f"circle {c} does not surround the origin")
    if annulus is not None and not circle_in_annulus_surrounding_origin(c, annulus):
        raise ParameterError(f"circle {c} is not admissible in {annulus}")

    cutoff = aliasing_cutoff(n_probe)
    samples = np.asarray(g(c.nodes(n_probe)), dtype=complex)
    if side is Side.PLUS:
        ks = np.arange(-cutoff, 0)
    else:
        ks = np.arange(0, cutoff + 1)
    magnitudes = np.abs(fourier_coefficients(samples, int(ks[0]), int(ks[-1])))
    worst = int(np.argmax(magnitudes))
    return ExtensionResidual(c, side, float(magnitudes[worst]), int(ks[worst]))


def verify_extensions(
    decomposition: Decomposition,
    annulus: Annulus,
    n_circles: int,
    seed: int,
    n_probe: int = DEFAULT_NODES,
) -> tuple[float, float]:
    """Worst offending norms of f+ and f- over seeded random admissible circles."""
    if n_circles < 1:
        raise ParameterError(f"need at least one circle, got {n_circles}")
    rng = np.random.default_rng(seed)
    worst_plus = worst_minus = 0.0
    for _ in range(n_circles):
        circle = random_admissible_circle(rng, annulus)
        plus = check_circle_extension(decomposition.plus, circle, Side.PLUS, n_probe, annulus)
        minus = check_circle_extension(decomposition.minus, circle, Side.MINUS, n_probe, annulus)
        worst_plus = max(worst_plus, plus.offending_coefficient_norm)
        worst_minus = max(worst_minus, minus.offending_coefficient_norm)
    logger.info("extension sweep over %d circles: plus=%.3e minus=%.3e", n_circles, worst_plus, worst_minus)
    return worst_plus, worst_minus


def _grid_increments(f: SampledAnnulusFunction, max_step: int) -> tuple[np.ndarray, np.ndarray]:
    """Largest increment and its separation for every angular (row, step) and radial (start, step) pair set."""
    values, radii, n = f.values, f.grid.radii, f.grid.n_theta
    separations, increments = [], []
    for s in range(1, max_step + 1):
        separations.append(2.0 * radii * np.sin(np.pi * s / n))
        increments.append(np.max(np.abs(np.roll(values, -s, axis=1) - values), axis=1))
    for s in range(1, radii.size):
        separations.append(radii[s:] - radii[:-s])
        increments.append(np.max(np.abs(values[s:] - values[:-s]), axis=1))
    return np.concatenate(separations), np.concatenate(increments)


def hoelder_estimate(f: SampledAnnulusFunction, max_step: int | None = None) -> tuple[float, float]:
    """Fit omega(delta) ~ M delta^alpha, omega the largest |f(p) - f(q)| over grid pairs with |p - q| <= delta.

    Pairs run along rows (angular steps 1..max_step, default n_theta // 16, at the chord of their
    own radius) and along rays (every radial step). The scales delta = h 2^k start at the coarsest
    nearest-neighbour spacing h and stop where the angular steps on the inner circle, or half the
    annulus width, run out.
    """
    grid = f.grid
    n = grid.n_theta
    max_step = n // 16 if max_step is None else max_step
    if max_step < 1:
        raise HolderEstimationError(f"max_step must be >= 1, got {max_step}")
    r1, r2 = grid.annulus.r1, grid.annulus.r2

    h = max(2.0 * r2 * np.sin(np.pi / n), float(np.max(np.diff(grid.radii))))
    reach = min(2.0 * r1 * np.sin(np.pi * max_step / n), 0.5 * (r2 - r1))
    scales = []
    delta = h
    while delta <= reach * (1.0 + SCALE_RTOL):
        scales.append(delta)
        delta *= 2.0
    if len(scales) < MIN_HOELDER_SCALES:
        raise HolderEstimationError(
            f"grid {grid.n_r}x{n} with max_step={max_step} spans {len(scales)} dyadic scales "
            f"from {h:.3e} to {reach:.3e}, need {MIN_HOELDER_SCALES}"
        )

    separations, increments = _grid_increments(f, max_step)
    scales = np.array(scales)
    moduli = np.array([np.max(increments[separations <= d * (1.0 + SCALE_RTOL)]) for d in scales])
    if not np.any(moduli):
        return 1.0, 0.0
    if np.any(moduli <= 0.0):
        raise HolderEstimationError("increments vanish at some scales but not others")

    slope, intercept = np.polyfit(np.log(scales), np.log(moduli), 1)
    alpha = float(min(max(slope, np.finfo(float).eps), 1.0))
    logger.debug("hoelder raw slope %.4f over %d scales from %.3e", slope, len(scales), h)
    return alpha, float(np.exp(intercept))
