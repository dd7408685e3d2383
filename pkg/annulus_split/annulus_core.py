"""Domain types shared by every module: the annulus, circles, polar grids and sampled data."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import EvaluationError, ParameterError

logger = logging.getLogger(__name__)

MIN_THETA = 8


class RadialLayout(str, Enum):
    UNIFORM = "uniform"
    CHEBYSHEV = "chebyshev"

    @classmethod
    def parse(cls, text: str) -> "RadialLayout":
        aliases = {"uniform": cls.UNIFORM, "cheb": cls.CHEBYSHEV, "chebyshev": cls.CHEBYSHEV}
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ParameterError(f"unknown radial layout {text!r} (uniform|cheb)") from None


class Side(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class Annulus:
    """The closed ring r1 <= |z| <= r2."""

    r1: float
    r2: float

    def __post_init__(self) -> None:
        if not (0.0 < self.r1 < self.r2 < np.inf):
            raise ParameterError(f"annulus needs 0 < r1 < r2 < inf, got r1={self.r1}, r2={self.r2}")

    @property
    def gamma(self) -> float:
        """Mid radius (r1 + r2) / 2."""
        return 0.5 * (self.r1 + self.r2)

    @property
    def center_bound(self) -> float:
        """Centres a of radius-gamma circles inside Int A satisfy |a| < center_bound."""
        return 0.5 * (self.r2 - self.r1)

    def contains(self, z: complex | np.ndarray, slack: float = 1e-12) -> bool | np.ndarray:
        mod = np.abs(z)
        return (mod >= self.r1 - slack) & (mod <= self.r2 + slack)


@dataclass(frozen=True)
class CircleSpec:
    center: complex
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise ParameterError(f"circle radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def nodes(self, n_nodes: int) -> np.ndarray:
        """Equally spaced points a + rho e^{i theta_j}, theta_j = 2 pi j / n."""
        theta = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
        return self.center + self.radius * np.exp(1j * theta)

    def surrounds_origin(self) -> bool:
        return abs(self.center) < self.radius


@dataclass(frozen=True, eq=False)
class PolarGrid:
    annulus: Annulus
    radii: np.ndarray
    n_theta: int

    def __post_init__(self) -> None:
        radii = np.array(self.radii, dtype=float)
        if radii.ndim != 1 or radii.size < 2:
            raise ParameterError("polar grid needs at least two radii")
        if np.any(np.diff(radii) <= 0.0):
            raise ParameterError("grid radii must be strictly increasing")
        if radii[0] < self.annulus.r1 or radii[-1] > self.annulus.r2:
            raise ParameterError(f"grid radii leave [{self.annulus.r1}, {self.annulus.r2}]")
        _check_theta_count(self.n_theta)
        radii.setflags(write=False)
        object.__setattr__(self, "radii", radii)

    @property
    def n_r(self) -> int:
        return int(self.radii.size)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_r, self.n_theta

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def points(self) -> np.ndarray:
        """Complex grid points, row i = radius index, column j = angle index."""
        return self.radii[:, None] * np.exp(1j * self.theta)[None, :]


@dataclass(frozen=True, eq=False)
class SampledAnnulusFunction:
    grid: PolarGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise ParameterError(f"values shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ParameterError("sampled values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def with_values(self, values: np.ndarray) -> "SampledAnnulusFunction":
        return SampledAnnulusFunction(self.grid, values)


@dataclass(frozen=True)
class EvaluableFunction:
    """Point-evaluable function on the annulus.

    `fn` must accept a complex scalar or ndarray and return values of the same shape.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    description: str = field(default="", compare=False)

    def __call__(self, z: complex | np.ndarray) -> complex | np.ndarray:
        out = self.fn(np.asarray(z, dtype=complex))
        if np.ndim(z) == 0:
            return complex(out)
        return np.asarray(out, dtype=complex)


@dataclass(frozen=True)
class C2Point:
    z: complex
    w: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "w", complex(self.w))
        if not (np.isfinite(self.z) and np.isfinite(self.w)):
            raise ParameterError(f"C2 point must be finite, got ({self.z}, {self.w})")

    def reflected(self) -> "C2Point":
        """(z, w) -> (conj w, conj z), the map exchanging the two Omega domains."""
        return C2Point(self.w.conjugate(), self.z.conjugate())

    def distance(self, other: "C2Point") -> float:
        return float(np.hypot(abs(self.z - other.z), abs(self.w - other.w)))


def _check_theta_count(n_theta: int) -> None:
    if n_theta < MIN_THETA or n_theta & (n_theta - 1):
        raise ParameterError(f"n_theta must be a power of two >= {MIN_THETA}, got {n_theta}")


def make_grid(
    annulus: Annulus,
    n_r: int,
    n_theta: int,
    radial_layout: RadialLayout = RadialLayout.CHEBYSHEV,
) -> PolarGrid:
    if n_r < 2:
        raise ParameterError(f"n_r must be >= 2, got {n_r}")
    _check_theta_count(n_theta)

    if radial_layout is RadialLayout.UNIFORM:
        radii = np.linspace(annulus.r1, annulus.r2, n_r)
    else:
        # r_i^2 are Chebyshev-Lobatto points on [r1^2, r2^2]
        lo, hi = annulus.r1**2, annulus.r2**2
        nodes = 0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos(np.pi * np.arange(n_r) / (n_r - 1))
        radii = np.sqrt(nodes)
    radii[0], radii[-1] = annulus.r1, annulus.r2
    return PolarGrid(annulus, radii, n_theta)


def sample(f: EvaluableFunction, grid: PolarGrid) -> SampledAnnulusFunction:
    values = np.asarray(f(grid.points), dtype=complex)
    bad = ~np.isfinite(values)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        point = complex(grid.points[i, j])
        raise EvaluationError(
            f"{f.description or 'function'} is not finite at grid point ({i}, {j}) z={point}",
            point=point,
        )
    return SampledAnnulusFunction(grid, values)


def circle_in_annulus_surrounding_origin(c: CircleSpec, annulus: Annulus, strict: bool = False) -> bool:
    dist = abs(c.center)
    if not dist < c.radius:
        return False
    # min |zeta| on the circle is rho - |a|, max is rho + |a|
    if strict:
        return c.radius - dist > annulus.r1 and c.radius + dist < annulus.r2
    return c.radius - dist >= annulus.r1 and c.radius + dist <= annulus.r2


def random_admissible_circle(rng: np.random.Generator, annulus: Annulus, margin: float = 0.0) -> CircleSpec:
    """Random circle inside A surrounding the origin, kept `margin` away from both boundary circles."""
    bound = annulus.center_bound - margin
    if bound <= 0.0:
        raise ParameterError(f"margin {margin} leaves no admissible circles in {annulus}")
    dist = bound * np.sqrt(rng.uniform(0.0, 1.0))
    center = dist * np.exp(2j * np.pi * rng.uniform(0.0, 1.0))
    radius = rng.uniform(annulus.r1 + margin + dist, annulus.r2 - margin - dist)
    return CircleSpec(complex(center), float(radius))
