"""Leaves of the quadrics (z - a)(w - conj a) = rho^2 in C^2 and the extension functions on them.

Lambda+ of (a, rho) is the part of the quadric with 0 < |z - a| < rho, Lambda- the part with
|z - a| > rho; they meet Sigma = {(zeta, conj zeta)} along the circle |zeta - a| = rho. Omega+ of an
annulus A is the union of the Lambda+ leaves of radius gamma = (r1 + r2) / 2 whose circles lie in
Int A, and Omega- is its image under (z, w) -> (conj w, conj z).
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize

from .annulus_core import Annulus, C2Point, CircleSpec, Side
from .circle_transform import AbelParameter
from .errors import InvariantViolation, ParameterError, PoleError
from .zero_mean import ZeroMeanCoefficients, minus_series, plus_series

logger = logging.getLogger(__name__)

DEFAULT_SOLVER_TOL = 1e-9
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
NEWTON_GRID = 5
MAX_HALVINGS = 12
SIGMA_TOL = 1e-12


class Region(str, Enum):
    PLUS = "plus"
    MINUS = "minus"
    BOUNDARY_SIGMA = "boundary_sigma"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class LambdaSpec:
    circle: CircleSpec
    side: Side

    def __post_init__(self) -> None:
        object.__setattr__(self, "side", Side(self.side))


@dataclass(frozen=True)
class OmegaMembership:
    region: Region
    witness_center: complex | None
    residual: float

    def __post_init__(self) -> None:
        if self.region in (Region.PLUS, Region.MINUS) and self.witness_center is None:
            raise InvariantViolation(f"region {self.region.value} reported without a witness centre")


@dataclass(frozen=True, eq=False)
class FiberSolution:
    """Best Newton result per point: centre, relative residual and whether it is admissible."""

    centers: np.ndarray
    residuals: np.ndarray
    accepted: np.ndarray


def lambda_contains(p: C2Point, spec: LambdaSpec, tol: float = 1e-10) -> bool:
    a, rho = spec.circle.center, spec.circle.radius
    u = p.z - a
    defect = abs(u * (p.w - a.conjugate()) - rho * rho)
    if defect > tol * rho * rho:
        return False
    if spec.side is Side.PLUS:
        return 0.0 < abs(u) < rho
    return abs(u) > rho


def _newton_centers(z: np.ndarray, w: np.ndarray, gamma: float, starts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton on F(a) = (z - a)(w - conj a) - gamma^2 in the real unknowns (Re a, Im a)."""
    a = np.broadcast_to(starts, z.shape + starts.shape[-1:]).astype(complex)
    zz, ww = z[:, None], w[:, None]
    g2 = gamma * gamma

    def residual(centres: np.ndarray) -> np.ndarray:
        return (zz - centres) * (ww - np.conj(centres)) - g2

    f = residual(a)
    active = np.ones(a.shape, dtype=bool)
    for _ in range(NEWTON_MAX_ITER):
        active &= np.abs(f) > NEWTON_TOL * g2
        if not np.any(active):
            break
        u, v = zz - a, ww - np.conj(a)
        fx, fy = -(u + v), 1j * (u - v)
        det = np.imag(np.conj(fx) * fy)
        ok = active & (np.abs(det) > np.finfo(float).tiny)
        safe_det = np.where(ok, det, 1.0)
        # x fx + y fy = -f for real x, y (Cramer's rule in complex form)
        dx = np.imag(np.conj(-f) * fy) / safe_det
        dy = np.imag(np.conj(fx) * -f) / safe_det
        step = np.where(ok, dx + 1j * dy, 0.0)

        lam = np.ones(a.shape)
        candidate = a + step
        f_new = residual(candidate)
        worse = ok & (np.abs(f_new) >= np.abs(f))
        for _ in range(MAX_HALVINGS):
            if not np.any(worse):
                break
            lam = np.where(worse, lam * 0.5, lam)
            candidate = np.where(worse, a + lam * step, candidate)
            f_new = np.where(worse, residual(candidate), f_new)
            worse &= np.abs(f_new) >= np.abs(f)
        moved = ok & ~worse
        a = np.where(moved, candidate, a)
        f = np.where(moved, f_new, f)
        active &= moved
    return a, np.abs(f) / g2


def _start_grid(bound: float) -> np.ndarray:
    axis = np.linspace(-0.8 * bound, 0.8 * bound, NEWTON_GRID)
    re, im = np.meshgrid(axis, axis, indexing="ij")
    return (re + 1j * im).reshape(-1)


def solve_fiber_centers(
    z: complex | np.ndarray,
    w: complex | np.ndarray,
    annulus: Annulus,
    solver_tol: float = DEFAULT_SOLVER_TOL,
) -> FiberSolution:
    """Centres a with (z - a)(w - conj a) = gamma^2, |a| < (r2 - r1)/2 and |z - a| < gamma.

    Multistart over a 5x5 grid of centres; among admissible solutions the lowest residual wins,
    ties going to the earliest start.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    z, w = np.broadcast_arrays(z, w)
    gamma, bound = annulus.gamma, annulus.center_bound

    centers, residuals = _newton_centers(z, w, gamma, _start_grid(bound))
    admissible = (
        (residuals <= solver_tol) & (np.abs(centers) < bound) & (np.abs(z[:, None] - centers) < gamma)
    )
    ranked = np.where(admissible, residuals, np.inf)
    best = np.argmin(ranked, axis=1)
    rows = np.arange(z.size)
    accepted = np.isfinite(ranked[rows, best])
    # rejected points report the smallest defect any start reached
    fallback = np.argmin(residuals, axis=1)
    pick = np.where(accepted, best, fallback)
    return FiberSolution(centers[rows, pick], residuals[rows, pick], accepted)


def _on_sigma(z: np.ndarray, w: np.ndarray, annulus: Annulus) -> np.ndarray:
    close = np.abs(w - np.conj(z)) <= SIGMA_TOL * np.maximum(1.0, np.abs(z))
    return close & annulus.contains(z, slack=SIGMA_TOL)


def classify_points(
    z: np.ndarray,
    w: np.ndarray,
    annulus: Annulus,
    solver_tol: float = DEFAULT_SOLVER_TOL,
) -> list[OmegaMembership]:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    sigma = _on_sigma(z, w, annulus)
    plus = solve_fiber_centers(z, w, annulus, solver_tol)
    # (z, w) is in Omega- exactly when (conj w, conj z) is in Omega+
    minus = solve_fiber_centers(np.conj(w), np.conj(z), annulus, solver_tol)

    out = []
    for i in range(z.size):
        if sigma[i]:
            out.append(OmegaMembership(Region.BOUNDARY_SIGMA, None, 0.0))
        elif plus.accepted[i]:
            out.append(OmegaMembership(Region.PLUS, complex(plus.centers[i]), float(plus.residuals[i])))
        elif minus.accepted[i]:
            out.append(OmegaMembership(Region.MINUS, complex(minus.centers[i]), float(minus.residuals[i])))
        else:
            out.append(OmegaMembership(Region.OUTSIDE, None, float(min(plus.residuals[i], minus.residuals[i]))))
    counts = {region: sum(m.region is region for m in out) for region in Region}
    logger.debug("classified %d points: %s", z.size, {k.value: v for k, v in counts.items()})
    return out


def omega_membership(p: C2Point, annulus: Annulus, solver_tol: float = DEFAULT_SOLVER_TOL) -> OmegaMembership:
    return classify_points(np.array([p.z]), np.array([p.w]), annulus, solver_tol)[0]


def lambda_intersect_plus_plus(c1: CircleSpec, c2: CircleSpec) -> bool:
    if c1 == c2:
        raise ParameterError(f"identical leaves {c1}: intersection predicate undefined")
    gap = abs(c1.center - c2.center)
    if gap == 0.0:
        return False
    return gap + c1.radius < c2.radius or gap + c2.radius < c1.radius


def lambda_intersect_plus_minus(c1: CircleSpec, c2: CircleSpec) -> bool:
    return abs(c1.center - c2.center) > c1.radius + c2.radius


def eval_F(coeffs: ZeroMeanCoefficients, side: Side | str, p: C2Point) -> complex:
    if Side(side) is Side.PLUS:
        return plus_series(coeffs, p.z, p.w)
    return minus_series(coeffs, p.z, p.w)


def eval_F_t(coeffs: ZeroMeanCoefficients, side: Side | str, t: AbelParameter | float, p: C2Point) -> complex:
    t = t.t if isinstance(t, AbelParameter) else AbelParameter(float(t)).t
    if Side(side) is Side.PLUS:
        return plus_series(coeffs, p.z, p.w, t)
    return minus_series(coeffs, p.z, p.w, t)


def eval_G_plus(coeffs: ZeroMeanCoefficients, p: C2Point) -> complex:
    return p.w * plus_series(coeffs, p.z, p.w)


def eval_G_minus(coeffs: ZeroMeanCoefficients, p: C2Point) -> complex:
    return p.z * minus_series(coeffs, p.z, p.w)


def eval_Psi(coeffs: ZeroMeanCoefficients, p: C2Point) -> complex:
    """F+(z, w) + F-(conj w, conj z); equals f(z) at (z, conj z)."""
    return plus_series(coeffs, p.z, p.w) + minus_series(coeffs, p.w.conjugate(), p.z.conjugate())


def eval_Psi_t(coeffs: ZeroMeanCoefficients, t: AbelParameter | float, p: C2Point) -> complex:
    t = t.t if isinstance(t, AbelParameter) else AbelParameter(float(t)).t
    return plus_series(coeffs, p.z, p.w, t) + minus_series(coeffs, p.w.conjugate(), p.z.conjugate(), t)


def transform_T(p: C2Point, t: AbelParameter | float, side: Side | str) -> C2Point:
    t = t.t if isinstance(t, AbelParameter) else AbelParameter(float(t)).t
    if Side(side) is Side.PLUS:
        return C2Point(t * p.z, p.w / t)
    return C2Point(p.z / t, t * p.w)


def reflect(zeta: complex | np.ndarray, c: CircleSpec) -> complex | np.ndarray:
    """Antiholomorphic reflection a + rho^2 / (conj zeta - conj a) across the circle."""
    zeta_arr = np.asarray(zeta, dtype=complex)
    offset = np.conj(zeta_arr) - np.conj(c.center)
    if np.any(offset == 0):
        raise PoleError(f"reflection across {c} is undefined at its centre")
    out = c.center + c.radius**2 / offset
    return complex(out) if out.ndim == 0 else out


def fiber_point(circle: CircleSpec, s: float, phi: float) -> C2Point:
    """Point of the quadric of `circle` with z - a = s rho e^{i phi}; Lambda+ for s < 1, Lambda- for s > 1."""
    if not s > 0.0:
        raise ParameterError(f"fiber parameter s must be positive, got {s}")
    a, rho = circle.center, circle.radius
    return C2Point(a + s * rho * np.exp(1j * phi), a.conjugate() + (rho / s) * np.exp(-1j * phi))


@dataclass(frozen=True)
class ApproachStep:
    distance: float
    s: float
    point: C2Point


def boundary_approach_path(
    z0: complex, annulus: Annulus, distances: Sequence[float] | None = None
) -> list[ApproachStep]:
    """Points of Omega+ on the leaf through (z0, conj z0) at the requested C^2 distances."""
    z0 = complex(z0)
    gamma = annulus.gamma
    if not annulus.r1 < abs(z0) < annulus.r2:
        raise ParameterError(f"approach target {z0} must lie in the open annulus")
    center = z0 * (1.0 - gamma / abs(z0))
    phi = float(np.angle(z0))
    circle = CircleSpec(center, gamma)
    distances = np.geomspace(1e-1, 1e-4, 13) if distances is None else np.asarray(distances, dtype=float)

    path = []
    for d in distances:
        if not d > 0.0:
            raise ParameterError(f"approach distances must be positive, got {d}")

        def gap(s: float, d: float = float(d)) -> float:
            return gamma * np.hypot(1.0 - s, 1.0 / s - 1.0) - d

        s = optimize.brentq(gap, 1e-9, 1.0, xtol=1e-15)
        path.append(ApproachStep(float(d), float(s), fiber_point(circle, s, phi)))
    return path


def sample_omega_plus(
    rng: np.random.Generator,
    annulus: Annulus,
    n: int,
    s_range: tuple[float, float] = (0.02, 0.95),
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Random points on admissible Lambda+ leaves; returns (z, w, centres)."""
    if n < 1:
        raise ParameterError(f"sample count must be positive, got {n}")
    gamma, bound = annulus.gamma, 0.999 * annulus.center_bound
    centers = bound * np.sqrt(rng.uniform(0.0, 1.0, n)) * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, n))
    s = rng.uniform(*s_range, n)
    phi = 2.0 * np.pi * rng.uniform(0.0, 1.0, n)
    z = centers + s * gamma * np.exp(1j * phi)
    w = np.conj(centers) + (gamma / s) * np.exp(-1j * phi)
    return z, w, centers
