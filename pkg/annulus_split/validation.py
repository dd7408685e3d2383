"""Brute-force oracles that cross-check the spectral code against quadrature and closed forms.

Every check returns an OracleReport instead of raising on a failed identity. Oracles only use the
circle quadrature primitives, the coefficient series and the geometric predicates; none of them
goes through the splitting path in `decompose`.
"""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .annulus_core import (
    Annulus,
    C2Point,
    CircleSpec,
    EvaluableFunction,
    SampledAnnulusFunction,
    Side,
    make_grid,
    random_admissible_circle,
)
from .circle_transform import (
    RadialFourierTable,
    abel_mean,
    abel_minus,
    abel_plus,
    aliasing_cutoff,
    cauchy_from_samples,
    cauchy_integral,
    circle_mean,
    poisson_circle,
    radial_fourier,
)
from .lambda_domains import (
    LambdaSpec,
    Region,
    boundary_approach_path,
    classify_points,
    eval_Psi,
    lambda_intersect_plus_minus,
    lambda_intersect_plus_plus,
    sample_omega_plus,
    solve_fiber_centers,
)
from .zero_mean import ZeroMeanCoefficients, minus_series, plus_series, synthesize

logger = logging.getLogger(__name__)

DEFAULT_SEED = 7
QUADRATURE_TOL = 1e-8
SPECTRAL_TOL = 1e-10
EXCLUSION_MARGIN = 1e-3
# roots on Sigma satisfy both side tests with equality; they must not count as witnesses
SIDE_MARGIN = 1e-9


@dataclass(frozen=True)
class OracleReport:
    identity_name: str
    max_abs_error: float
    samples_tested: int
    tolerance: float
    excluded: int = 0
    details: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_error <= self.tolerance)

    def to_dict(self) -> dict[str, Any]:
        return {
            "identity_name": self.identity_name,
            "max_abs_error": float(self.max_abs_error),
            "samples_tested": int(self.samples_tested),
            "tolerance": float(self.tolerance),
            "excluded": int(self.excluded),
            "pass": self.passed,
            **self.details,
        }


def _finish(report: OracleReport) -> OracleReport:
    level = logging.INFO if report.passed else logging.WARNING
    logger.log(
        level,
        "%s: max_abs_error=%.3e tol=%.1e samples=%d excluded=%d pass=%s",
        report.identity_name,
        report.max_abs_error,
        report.tolerance,
        report.samples_tested,
        report.excluded,
        report.passed,
    )
    return report


def check_identity_24(
    f: EvaluableFunction,
    table: RadialFourierTable,
    t_values: Sequence[float] = (0.3, 0.7, 0.95),
    n_samples: int = 500,
    n_nodes: int = 512,
    seed: int = DEFAULT_SEED,
    tol: float = QUADRATURE_TOL,
) -> OracleReport:
    """Cauchy integral over |zeta| = r at t r e^{i theta} and r e^{i theta} / t against f_t+ and -f_t-.

    Radii and angles are drawn from the table's grid so the spectral side needs no interpolation.
    """
    grid = table.grid
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, grid.n_r, n_samples)
    cols = rng.integers(0, grid.n_theta, n_samples)
    ts = np.asarray(t_values, dtype=float)[rng.integers(0, len(t_values), n_samples)]

    worst = 0.0
    for t in np.unique(ts):
        plus_t = abel_plus(table, t).values
        minus_t = abel_minus(table, t).values
        for i in np.unique(rows[ts == t]):
            picked = (ts == t) & (rows == i)
            r = grid.radii[i]
            points = r * np.exp(1j * grid.theta[cols[picked]])
            inside = cauchy_integral(f, r, t * points, n_nodes)
            outside = cauchy_integral(f, r, points / t, n_nodes)
            worst = max(
                worst,
                float(np.max(np.abs(inside - plus_t[i, cols[picked]]))),
                float(np.max(np.abs(outside + minus_t[i, cols[picked]]))),
            )
    return _finish(
        OracleReport("identity_24", worst, 2 * n_samples, tol, details={"t_values": [float(t) for t in t_values]})
    )


def check_poisson_identity(
    f: SampledAnnulusFunction,
    t_values: Sequence[float] = (0.3, 0.7, 0.9),
    tol: float = SPECTRAL_TOL,
) -> OracleReport:
    """Spectral Abel mean (plus the c_0 row) against the discrete Poisson sum on every radius row."""
    cutoff = aliasing_cutoff(f.grid.n_theta)
    table = radial_fourier(f, -cutoff, cutoff)
    theta = f.grid.theta
    worst = 0.0
    for t in t_values:
        spectral = abel_mean(table, t).values + table.harmonic(0)[:, None]
        for i in range(f.grid.n_r):
            poisson = poisson_circle(f.values[i], t, theta)
            worst = max(worst, float(np.max(np.abs(poisson - spectral[i]))))
    return _finish(OracleReport("poisson_identity", worst, len(t_values) * f.values.size, tol))


def check_circle_means(
    f: EvaluableFunction,
    annulus: Annulus,
    n_circles: int = 100,
    n_nodes: int = 512,
    seed: int = DEFAULT_SEED,
    tol: float = SPECTRAL_TOL,
) -> OracleReport:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_circles):
        circle = random_admissible_circle(rng, annulus)
        worst = max(worst, abs(circle_mean(f, circle, n_nodes)))
    return _finish(OracleReport("circle_means", worst, n_circles, tol))


def _quadratic_newton(coefs: np.ndarray, starts: np.ndarray, max_iter: int = 100) -> np.ndarray:
    c2, c1, c0 = coefs
    scale = max(abs(c2), abs(c1), abs(c0))
    u = starts.astype(complex)
    q = (c2 * u + c1) * u + c0
    for _ in range(max_iter):
        dq = 2.0 * c2 * u + c1
        step = np.where(np.abs(dq) > 0, -q / np.where(dq == 0, 1.0, dq), 0.0)
        lam = np.ones(u.shape)
        trial = u + step
        q_trial = (c2 * trial + c1) * trial + c0
        for _ in range(30):
            worse = np.abs(q_trial) > np.abs(q)
            if not np.any(worse):
                break
            lam = np.where(worse, 0.5 * lam, lam)
            trial = np.where(worse, u + lam * step, trial)
            q_trial = (c2 * trial + c1) * trial + c0
        u, q = trial, q_trial
        if np.all(np.abs(q) <= 1e-15 * scale):
            break
    return u


def _strict_side(distance: float, radius: float, side: Side) -> bool:
    if side is Side.PLUS:
        return 0.0 < distance < radius * (1.0 - SIDE_MARGIN)
    return distance > radius * (1.0 + SIDE_MARGIN)


def brute_force_lambda_intersection(
    spec1: LambdaSpec,
    spec2: LambdaSpec,
    n_starts: int = 32,
    seed: int = DEFAULT_SEED,
) -> bool:
    """Search for a common point of two leaves by damped Newton in the fibre coordinate.

    Points of the first leaf are z = a + u, w = conj a + rho^2 / u; the second equation becomes
    conj(c) u^2 + (rho^2 + |c|^2 - delta^2) u + c rho^2 = 0 with c = a - b.
    """
    a, rho = spec1.circle.center, spec1.circle.radius
    b, delta = spec2.circle.center, spec2.circle.radius
    c = a - b
    coefs = np.array([np.conj(c), rho**2 + abs(c) ** 2 - delta**2, c * rho**2])
    if not np.any(coefs[:2]):
        return False

    rng = np.random.default_rng(seed)
    magnitudes = rho * 10.0 ** rng.uniform(-3.0, 3.0, n_starts)
    starts = magnitudes * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, n_starts))
    roots = _quadratic_newton(coefs, starts)

    for u in roots:
        if not np.isfinite(u) or u == 0:
            continue
        z = a + u
        w = np.conj(a) + rho**2 / u
        defect1 = abs((z - a) * (w - np.conj(a)) - rho**2) / rho**2
        defect2 = abs((z - b) * (w - np.conj(b)) - delta**2) / delta**2
        if max(defect1, defect2) > 1e-10:
            continue
        side1 = _strict_side(abs(u), rho, spec1.side)
        side2 = _strict_side(abs(z - b), delta, spec2.side)
        if side1 and side2:
            return True
    return False


def leaf_poisson_reference(
    coeffs: ZeroMeanCoefficients, c: CircleSpec
) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Poisson extension of the series from the circle c in closed form, as a `check_lemma_61` reference.

    f+ continues into the disc along the leaf w = conj a + rho^2 / (z - a) and f- continues outside
    along the same leaf; their sum at z and at its reflection z* is the harmonic extension at z.
    """
    a, rho = c.center, c.radius

    def reference(s: np.ndarray, phi: np.ndarray) -> np.ndarray:
        unit = np.exp(1j * np.asarray(phi))
        s = np.asarray(s, dtype=float)
        inner = plus_series(coeffs, a + s * rho * unit, np.conj(a) + (rho / s) * np.conj(unit))
        outer = minus_series(coeffs, a + (rho / s) * unit, np.conj(a) + s * rho * np.conj(unit))
        return np.asarray(inner + outer, dtype=complex)

    return reference


def check_lemma_61(
    f_on_circle: np.ndarray,
    c: CircleSpec,
    n_probe: int = 200,
    seed: int = DEFAULT_SEED,
    tol: float = QUADRATURE_TOL,
    reference: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
) -> OracleReport:
    """f+(z) + f-(z*) from discrete Cauchy sums against the Poisson integral at disc coordinates.

    z = a + s rho e^{i phi}; `reference(s, phi)`, when given, replaces the discrete Poisson sum
    with a closed-form harmonic extension.
    """
    values = np.asarray(f_on_circle, dtype=complex)
    rng = np.random.default_rng(seed)
    s = rng.uniform(0.01, 1.0, n_probe)
    phi = 2.0 * np.pi * rng.uniform(0.0, 1.0, n_probe)
    keep = s <= 1.0 - EXCLUSION_MARGIN
    excluded = int(np.count_nonzero(~keep))
    if excluded:
        logger.warning("lemma_61: excluded %d samples within %.0e of the circle", excluded, EXCLUSION_MARGIN)
    s, phi = s[keep], phi[keep]

    z = c.center + s * c.radius * np.exp(1j * phi)
    z_star = c.center + (c.radius / s) * np.exp(1j * phi)
    # the outer Cauchy sum is -f-
    combined = cauchy_from_samples(values, c, z) - cauchy_from_samples(values, c, z_star)
    if reference is None:
        target = np.array([poisson_circle(values, si, pi) for si, pi in zip(s, phi)])
    else:
        target = np.asarray(reference(s, phi), dtype=complex)
    worst = float(np.max(np.abs(combined - target))) if s.size else 0.0
    return _finish(OracleReport("lemma_61", worst, int(s.size), tol, excluded=excluded))


def fiber_center_closed_form(z: complex, w: complex, gamma: float, side: Side | str = Side.PLUS) -> complex | None:
    """Centre a of the radius-gamma leaf through (z, w) on the requested side; None on Sigma.

    With u = z - a the leaf equation reads |u|^2 + u (w - conj z) = gamma^2, so u (w - conj z) is
    real: positive on the plus side and negative on the minus side.
    """
    d = complex(w) - complex(z).conjugate()
    if d == 0:
        return None
    mod = abs(d)
    direction = d.conjugate() / mod
    if Side(side) is Side.PLUS:
        return complex(z) - 0.5 * (-mod + np.sqrt(mod * mod + 4.0 * gamma * gamma)) * direction
    return complex(z) + 0.5 * (mod + np.sqrt(mod * mod + 4.0 * gamma * gamma)) * direction


def _closed_form_region(z: complex, w: complex, annulus: Annulus) -> tuple[Region, complex | None]:
    if abs(w - np.conj(z)) == 0:
        return (Region.BOUNDARY_SIGMA if annulus.contains(z) else Region.OUTSIDE), None
    plus = fiber_center_closed_form(z, w, annulus.gamma, Side.PLUS)
    if abs(plus) < annulus.center_bound:
        return Region.PLUS, plus
    reflected = fiber_center_closed_form(np.conj(w), np.conj(z), annulus.gamma, Side.PLUS)
    if abs(reflected) < annulus.center_bound:
        return Region.MINUS, reflected
    return Region.OUTSIDE, None


def mixed_c2_points(rng: np.random.Generator, annulus: Annulus, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Omega+ samples, their reflections and uniform points of a box, in equal shares."""
    share = n // 3
    z_plus, w_plus, _ = sample_omega_plus(rng, annulus, share)
    box = 2.0 * annulus.r2
    rest = n - 2 * share
    z_box = rng.uniform(-box, box, rest) + 1j * rng.uniform(-box, box, rest)
    w_box = rng.uniform(-box, box, rest) + 1j * rng.uniform(-box, box, rest)
    z = np.concatenate([z_plus, np.conj(w_plus), z_box])
    w = np.concatenate([w_plus, np.conj(z_plus), w_box])
    return z, w


def check_membership_solver(
    annulus: Annulus,
    n_points: int = 600,
    seed: int = DEFAULT_SEED,
    tol: float = 1e-6,
) -> OracleReport:
    """Newton regions and witnesses against the closed-form fibre centre.

    The error is the largest witness discrepancy, plus one for every region disagreement.
    """
    rng = np.random.default_rng(seed)
    z, w = mixed_c2_points(rng, annulus, n_points)
    memberships = classify_points(z, w, annulus)

    mismatches = 0
    witness_error = 0.0
    for zi, wi, membership in zip(z, w, memberships):
        region, center = _closed_form_region(complex(zi), complex(wi), annulus)
        if region is not membership.region:
            mismatches += 1
            continue
        if center is not None:
            witness_error = max(witness_error, abs(center - membership.witness_center))
    return _finish(
        OracleReport(
            "membership_solver",
            witness_error + mismatches,
            len(memberships),
            tol,
            details={"region_mismatches": mismatches, "witness_error": witness_error},
        )
    )


def check_omega_disjointness(annulus: Annulus, n_points: int = 10_000, seed: int = DEFAULT_SEED) -> OracleReport:
    """Counts points accepted on both sides, and points whose reflection is not classified symmetrically."""
    rng = np.random.default_rng(seed)
    z, w = mixed_c2_points(rng, annulus, n_points)
    plus = solve_fiber_centers(z, w, annulus).accepted
    minus = solve_fiber_centers(np.conj(w), np.conj(z), annulus).accepted
    both = int(np.count_nonzero(plus & minus))

    direct = classify_points(z, w, annulus)
    mirrored = classify_points(np.conj(w), np.conj(z), annulus)
    asymmetric = sum(
        (p.region is Region.PLUS) != (m.region is Region.MINUS) for p, m in zip(direct, mirrored)
    )
    counts = {region.value: sum(m.region is region for m in direct) for region in Region}
    return _finish(
        OracleReport(
            "omega_disjointness",
            float(both + asymmetric),
            int(z.size),
            0.0,
            details={"both_sides": both, "asymmetric": int(asymmetric), "regions": counts},
        )
    )


def _pair_margin(c1: CircleSpec, c2: CircleSpec, kind: str) -> float:
    gap = abs(c1.center - c2.center)
    if kind == "pp":
        return min(gap, abs(gap + c1.radius - c2.radius), abs(gap + c2.radius - c1.radius))
    return abs(gap - c1.radius - c2.radius)


def random_circle_pair(rng: np.random.Generator, kind: str) -> tuple[CircleSpec, CircleSpec]:
    c1 = CircleSpec(complex(*rng.uniform(-1.0, 1.0, 2)), float(rng.uniform(0.5, 2.0)))
    gap = rng.uniform(0.0, 1.5 if kind == "pp" else 4.0)
    center = c1.center + gap * np.exp(2j * np.pi * rng.uniform())
    return c1, CircleSpec(complex(center), float(rng.uniform(0.5, 2.0)))


def check_intersection_predicates(
    n_pairs: int = 200, seed: int = DEFAULT_SEED, margin: float = EXCLUSION_MARGIN
) -> OracleReport:
    """Predicates for ++ and +- intersections against the brute-force search, alternating kinds."""
    rng = np.random.default_rng(seed)
    disagreements = excluded = tested = 0
    truths = 0
    while tested < n_pairs:
        kind = "pp" if tested % 2 == 0 else "pm"
        c1, c2 = random_circle_pair(rng, kind)
        if _pair_margin(c1, c2, kind) < margin:
            excluded += 1
            continue
        if kind == "pp":
            predicted = lambda_intersect_plus_plus(c1, c2)
            found = brute_force_lambda_intersection(LambdaSpec(c1, Side.PLUS), LambdaSpec(c2, Side.PLUS))
        else:
            predicted = lambda_intersect_plus_minus(c1, c2)
            found = brute_force_lambda_intersection(LambdaSpec(c1, Side.PLUS), LambdaSpec(c2, Side.MINUS))
        if predicted != found:
            disagreements += 1
            logger.warning("predicate %s=%s but search found %s for %s, %s", kind, predicted, found, c1, c2)
        truths += int(predicted)
        tested += 1
    return _finish(
        OracleReport(
            "intersection_predicates",
            float(disagreements),
            tested,
            0.0,
            excluded=excluded,
            details={"predicted_true": truths},
        )
    )


def check_max_principle(
    coeffs: ZeroMeanCoefficients,
    annulus: Annulus,
    n_points: int = 1000,
    boundary_grid: tuple[int, int] = (64, 512),
    seed: int = DEFAULT_SEED,
) -> OracleReport:
    """Sampled sup of |G+| over Omega+ against its sup over the lifted annulus.

    Error is the excess over boundary_sup * (1 + 1e-6); the tolerance is 1e-8.
    """
    grid = make_grid(annulus, *boundary_grid)
    zb = grid.points
    boundary_sup = float(np.max(np.abs(np.conj(zb) * plus_series(coeffs, zb, np.conj(zb)))))

    rng = np.random.default_rng(seed)
    z, w, _ = sample_omega_plus(rng, annulus, n_points)
    sampled_sup = float(np.max(np.abs(w * plus_series(coeffs, z, w))))
    excess = max(0.0, sampled_sup - boundary_sup * (1.0 + 1e-6))
    return _finish(
        OracleReport(
            "max_principle",
            excess,
            n_points,
            1e-8,
            details={"boundary_sup": boundary_sup, "sampled_sup": sampled_sup},
        )
    )


def check_boundary_approach(
    coeffs: ZeroMeanCoefficients,
    annulus: Annulus,
    n_targets: int = 8,
    distances: Sequence[float] | None = None,
    seed: int = DEFAULT_SEED,
    relative_tol: float = 1e-3,
    slack: float = 0.1,
) -> OracleReport:
    """|Psi(p_k) - f(z0)| along fibre paths into Omega+; error is the value at the closest point.

    Non-monotone paths (beyond `slack`) are counted in the details.
    """
    f = synthesize(coeffs)
    grid = make_grid(annulus, 64, 512)
    sup = float(np.max(np.abs(f(grid.points))))

    rng = np.random.default_rng(seed)
    inset = 0.05 * (annulus.r2 - annulus.r1)
    moduli = rng.uniform(annulus.r1 + inset, annulus.r2 - inset, n_targets)
    targets = moduli * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, n_targets))

    worst_final = 0.0
    non_monotone = 0
    for z0 in targets:
        value = f(complex(z0))
        errors = [abs(eval_Psi(coeffs, step.point) - value) for step in boundary_approach_path(z0, annulus, distances)]
        if any(b > (1.0 + slack) * a + 1e-14 for a, b in zip(errors, errors[1:])):
            non_monotone += 1
        worst_final = max(worst_final, errors[-1])
    if non_monotone:
        logger.warning("boundary approach: %d of %d paths not monotone", non_monotone, n_targets)
    return _finish(
        OracleReport(
            "boundary_approach",
            worst_final,
            n_targets,
            relative_tol * sup,
            details={"non_monotone_paths": non_monotone, "sup_norm": sup},
        )
    )


def check_psi_boundary(coeffs: ZeroMeanCoefficients, annulus: Annulus, tol: float = SPECTRAL_TOL) -> OracleReport:
    """Psi(z, conj z) against f(z) on a 33 x 256 grid."""
    grid = make_grid(annulus, 33, 256)
    f = synthesize(coeffs)
    worst = 0.0
    for z in grid.points.reshape(-1):
        worst = max(worst, abs(eval_Psi(coeffs, C2Point(z, np.conj(z))) - f(complex(z))))
    return _finish(OracleReport("psi_boundary", worst, grid.points.size, tol))
