"""Zero-circle-means test, coefficient extraction and synthesis.

A band-limited function with zero means on every circle in A surrounding the origin is
exactly a finite sum of the monomials

    a_{n,j} z^j / conj(z)^{n-j}      (n >= 1, 0 <= j < n)
    a_{-n,j} conj(z)^j / z^{n-j}     (n >= 1, 0 <= j < n)

whose restriction to |z| = r contributes r^{2j-n} to the harmonic +n (resp. -n). The module
fits the radial profiles r^{|n|} c_n(r) against polynomials of degree |n| - 1 in r^2 and
evaluates the resulting series by nested Horner sums in (z w, 1/w) or (z w, 1/z).
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from numpy.polynomial import chebyshev as cheb
from numpy.polynomial import polynomial as poly
from scipy import linalg

from .annulus_core import Annulus, EvaluableFunction, SampledAnnulusFunction
from .circle_transform import RadialFourierTable, aliasing_cutoff, radial_fourier
from .errors import ConditioningError, ParameterError, PoleError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
# relative size of the residual denominator floor, see DESIGN.md
RESIDUAL_FLOOR = 1e-6
RANK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ZeroMeanCoefficients:
    """plus[n-1] holds a_{n,0..n-1}; minus[n-1] holds a_{-n,0..n-1}."""

    plus: tuple[np.ndarray, ...]
    minus: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.plus) != len(self.minus) or len(self.plus) < 1:
            raise ParameterError(
                f"need matching plus/minus tables with n_max >= 1, got {len(self.plus)} and {len(self.minus)}"
            )
        for name in ("plus", "minus"):
            rows = []
            for n, row in enumerate(getattr(self, name), start=1):
                arr = np.array(row, dtype=complex).reshape(-1)
                if arr.size != n:
                    raise ParameterError(f"{name} harmonic {n} needs {n} coefficients, got {arr.size}")
                if not np.all(np.isfinite(arr)):
                    raise ParameterError(f"{name} harmonic {n} has non-finite coefficients")
                arr.setflags(write=False)
                rows.append(arr)
            object.__setattr__(self, name, tuple(rows))

    @property
    def n_max(self) -> int:
        return len(self.plus)

    @classmethod
    def zeros(cls, n_max: int) -> "ZeroMeanCoefficients":
        if n_max < 1:
            raise ParameterError(f"n_max must be >= 1, got {n_max}")
        rows = tuple(np.zeros(n, dtype=complex) for n in range(1, n_max + 1))
        return cls(rows, rows)

    @classmethod
    def from_harmonics(
        cls, harmonics: Mapping[int, Sequence[complex]], n_max: int | None = None
    ) -> "ZeroMeanCoefficients":
        """Build from {n: [a_{n,0}, ...]}; missing harmonics and trailing entries are zero.

        >>> ZeroMeanCoefficients.from_harmonics({2: [0, 1]}).harmonic(2)
        array([0.+0.j, 1.+0.j])
        """
        if any(n == 0 for n in harmonics):
            raise ParameterError("harmonic 0 carries no coefficients")
        top = max((abs(n) for n in harmonics), default=1)
        n_max = top if n_max is None else n_max
        if n_max < top:
            raise ParameterError(f"harmonic {top} exceeds n_max={n_max}")
        plus = [np.zeros(n, dtype=complex) for n in range(1, n_max + 1)]
        minus = [np.zeros(n, dtype=complex) for n in range(1, n_max + 1)]
        for n, values in harmonics.items():
            values = np.asarray(values, dtype=complex).reshape(-1)
            if values.size > abs(n):
                raise ParameterError(f"harmonic {n} takes at most {abs(n)} coefficients, got {values.size}")
            target = plus if n > 0 else minus
            target[abs(n) - 1][: values.size] = values
        return cls(tuple(plus), tuple(minus))

    def harmonic(self, n: int) -> np.ndarray:
        if n == 0 or abs(n) > self.n_max:
            raise ParameterError(f"harmonic {n} outside 1 <= |n| <= {self.n_max}")
        return self.plus[n - 1] if n > 0 else self.minus[-n - 1]

    def only_plus(self) -> "ZeroMeanCoefficients":
        return ZeroMeanCoefficients(self.plus, tuple(np.zeros_like(row) for row in self.minus))

    def only_minus(self) -> "ZeroMeanCoefficients":
        return ZeroMeanCoefficients(tuple(np.zeros_like(row) for row in self.plus), self.minus)

    def is_zero(self) -> bool:
        return all(not np.any(row) for row in self.plus + self.minus)

    def max_abs_difference(self, other: "ZeroMeanCoefficients") -> float:
        n_max = max(self.n_max, other.n_max)
        worst = 0.0
        for n in [*range(1, n_max + 1), *range(-n_max, 0)]:
            mine = self.harmonic(n) if abs(n) <= self.n_max else np.zeros(abs(n))
            theirs = other.harmonic(n) if abs(n) <= other.n_max else np.zeros(abs(n))
            worst = max(worst, float(np.max(np.abs(mine - theirs))))
        return worst

    def max_profile_difference(self, other: "ZeroMeanCoefficients", radii: np.ndarray) -> float:
        """Largest gap between the radial profiles r^{-|n|} sum_j a_{n,j} r^{2j} at the given radii."""
        radii = np.asarray(radii, dtype=float)
        n_max = max(self.n_max, other.n_max)
        worst = 0.0
        for n in [*range(1, n_max + 1), *range(-n_max, 0)]:
            mine = self.harmonic(n) if abs(n) <= self.n_max else np.zeros(abs(n))
            theirs = other.harmonic(n) if abs(n) <= other.n_max else np.zeros(abs(n))
            gap = poly.polyval(radii**2, mine - theirs) * radii ** -abs(n)
            worst = max(worst, float(np.max(np.abs(gap))))
        return worst


@dataclass(frozen=True)
class ZeroMeanReport:
    c0_norm: float
    c0_relative: float
    residuals: dict[int, float]
    tail_mass: float
    tol: float
    n_max: int
    verdict: bool = field(init=False)

    def __post_init__(self) -> None:
        verdict = self.c0_norm <= self.tol and all(v <= self.tol for v in self.residuals.values())
        object.__setattr__(self, "verdict", bool(verdict))

    @property
    def max_residual(self) -> float:
        return max([self.c0_relative, *self.residuals.values()])

    def worst_harmonic(self) -> int | None:
        if not self.residuals:
            return None
        return max(self.residuals, key=lambda n: self.residuals[n])


def _check_poles(values: np.ndarray, label: str) -> None:
    if np.any(values == 0):
        raise PoleError(f"series evaluated at {label} = 0")


def _horner(rows: tuple[np.ndarray, ...], x: np.ndarray, q: np.ndarray) -> np.ndarray:
    # sum_n q^n P_n(x), nested from the top harmonic down
    acc = np.zeros(np.broadcast(x, q).shape, dtype=complex)
    for row in reversed(rows):
        acc = (acc + poly.polyval(x, row)) * q
    return acc


def plus_series(
    coeffs: ZeroMeanCoefficients, z: complex | np.ndarray, w: complex | np.ndarray, t: float = 1.0
) -> complex | np.ndarray:
    """sum_n t^n w^{-n} sum_j a_{n,j} (z w)^j. At w = conj(z) this is f+(z)."""
    z_arr = np.asarray(z, dtype=complex)
    w_arr = np.asarray(w, dtype=complex)
    _check_poles(w_arr, "w")
    out = _horner(coeffs.plus, z_arr * w_arr, t / w_arr)
    return complex(out) if out.ndim == 0 else out


def minus_series(
    coeffs: ZeroMeanCoefficients, z: complex | np.ndarray, w: complex | np.ndarray, t: float = 1.0
) -> complex | np.ndarray:
    """sum_n t^n z^{-n} sum_j a_{-n,j} (z w)^j. At w = conj(z) this is f-(z)."""
    z_arr = np.asarray(z, dtype=complex)
    w_arr = np.asarray(w, dtype=complex)
    _check_poles(z_arr, "z")
    out = _horner(coeffs.minus, z_arr * w_arr, t / z_arr)
    return complex(out) if out.ndim == 0 else out


def plus_part(coeffs: ZeroMeanCoefficients) -> EvaluableFunction:
    return EvaluableFunction(lambda z: plus_series(coeffs, z, np.conj(z)), f"f+ (n_max={coeffs.n_max})")


def minus_part(coeffs: ZeroMeanCoefficients) -> EvaluableFunction:
    return EvaluableFunction(lambda z: minus_series(coeffs, z, np.conj(z)), f"f- (n_max={coeffs.n_max})")


def synthesize(coeffs: ZeroMeanCoefficients) -> EvaluableFunction:
    def f(z: np.ndarray) -> np.ndarray:
        zb = np.conj(z)
        return plus_series(coeffs, z, zb) + minus_series(coeffs, z, zb)

    return EvaluableFunction(f, f"zero-mean series (n_max={coeffs.n_max})")


def fit_harmonic(
    radii: np.ndarray, profile: np.ndarray, n: int, annulus: Annulus, scale: float
) -> tuple[np.ndarray, float]:
    """Least-squares fit of r^{|n|} c_n(r) by a polynomial of degree |n| - 1 in r^2.

    Returns the monomial coefficients a_{n,0..|n|-1} and the relative residual.
    """
    m = abs(n)
    radii = np.asarray(radii, dtype=float)
    if np.unique(radii).size < m:
        raise ConditioningError(f"harmonic {n} needs {m} distinct radii, got {np.unique(radii).size}")

    lo, hi = annulus.r1**2, annulus.r2**2
    u = (2.0 * radii**2 - (lo + hi)) / (hi - lo)
    y = radii**m * np.asarray(profile, dtype=complex)

    design = cheb.chebvander(u, m - 1)
    q, r = linalg.qr(design, mode="economic")
    diag = np.abs(np.diag(r))
    if diag.min() <= RANK_TOL * diag.max():
        raise ConditioningError(f"design matrix for harmonic {n} is rank deficient")
    cheb_coeffs = linalg.solve_triangular(r, q.T @ y)

    misfit = float(np.linalg.norm(design @ cheb_coeffs - y))
    floor = RESIDUAL_FLOOR * scale * annulus.r2**m * np.sqrt(radii.size)
    residual = misfit / max(float(np.linalg.norm(y)), floor, np.finfo(float).tiny)

    # back to monomials in x = r^2; the conversion is linear so real and imaginary parts go separately
    monomial = np.zeros(m, dtype=complex)
    for part, unit in ((cheb_coeffs.real, 1.0), (cheb_coeffs.imag, 1j)):
        converted = Chebyshev(part, domain=[lo, hi]).convert(kind=Polynomial).coef
        monomial[: converted.size] += unit * converted[:m]
    return monomial, residual


def _tail_mass(table: RadialFourierTable, n_max: int) -> float:
    ks = [k for k in range(table.k_min, table.k_max + 1) if abs(k) > n_max]
    return float(sum(np.max(np.abs(table.harmonic(k))) for k in ks))


def fit_radial_profiles(
    table: RadialFourierTable,
    annulus: Annulus,
    n_max: int,
    tol: float = DEFAULT_TOL,
    scale: float | None = None,
) -> tuple[ZeroMeanCoefficients, ZeroMeanReport]:
    """Fit every harmonic 1 <= |n| <= n_max and assemble the zero-mean report.

    `scale` is the sup norm of the sampled function; when absent it is bounded above by the
    largest per-radius coefficient sum.
    """
    if n_max < 1 or n_max > min(table.k_max, -table.k_min):
        raise ParameterError(f"n_max={n_max} outside [1, {min(table.k_max, -table.k_min)}]")
    if table.grid.n_r < n_max + 1:
        raise ParameterError(f"fit of order {n_max} needs at least {n_max + 1} radii, got {table.grid.n_r}")
    if tol <= 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    if scale is None:
        scale = float(np.max(np.sum(np.abs(table.coeffs), axis=0)))

    radii = table.grid.radii
    rows: dict[int, np.ndarray] = {}
    residuals: dict[int, float] = {}
    for n in [*range(1, n_max + 1), *range(-1, -n_max - 1, -1)]:
        rows[n], residuals[n] = fit_harmonic(radii, table.harmonic(n), n, annulus, scale)

    c0_norm = float(np.max(np.abs(table.harmonic(0))))
    report = ZeroMeanReport(
        c0_norm=c0_norm,
        c0_relative=c0_norm / max(scale, np.finfo(float).tiny),
        residuals=residuals,
        tail_mass=_tail_mass(table, n_max),
        tol=tol,
        n_max=n_max,
    )
    coeffs = ZeroMeanCoefficients(
        tuple(rows[n] for n in range(1, n_max + 1)),
        tuple(rows[-n] for n in range(1, n_max + 1)),
    )
    logger.info(
        "fit n_max=%d c0_norm=%.3e max_residual=%.3e tail_mass=%.3e verdict=%s",
        n_max,
        report.c0_norm,
        report.max_residual,
        report.tail_mass,
        report.verdict,
    )
    return coeffs, report


def fit_sampled(
    f: SampledAnnulusFunction, n_max: int, tol: float = DEFAULT_TOL
) -> tuple[ZeroMeanCoefficients, ZeroMeanReport, RadialFourierTable]:
    cutoff = aliasing_cutoff(f.grid.n_theta)
    if n_max > cutoff:
        raise ParameterError(f"n_max={n_max} exceeds the aliasing cutoff {cutoff} of n_theta={f.grid.n_theta}")
    table = radial_fourier(f, -cutoff, cutoff)
    coeffs, report = fit_radial_profiles(table, f.grid.annulus, n_max, tol=tol, scale=f.sup_norm)
    return coeffs, report, table


def check_zero_means(f: SampledAnnulusFunction, n_max: int, tol: float = DEFAULT_TOL) -> ZeroMeanReport:
    return fit_sampled(f, n_max, tol)[1]


def random_zero_mean(
    seed: int, n_max: int, decay: float, annulus: Annulus | None = None
) -> ZeroMeanCoefficients:
    """Seeded coefficients with |a_{n,j} z^j / conj(z)^{n-j}| <= e^{-decay n} on A."""
    if n_max < 1:
        raise ParameterError(f"n_max must be >= 1, got {n_max}")
    if not decay > 0:
        raise ParameterError(f"decay must be positive, got {decay}")
    annulus = annulus or Annulus(1.0, 2.0)

    rng = np.random.default_rng(seed)
    sides = []
    for _ in range(2):
        rows = []
        for n in range(1, n_max + 1):
            j = np.arange(n)
            modulus = rng.uniform(0.0, 1.0, n) * np.exp(-decay * n)
            phase = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, n))
            # largest modulus of the monomial on A is at r1 or r2
            peak = np.maximum(annulus.r1 ** (2 * j - n), annulus.r2 ** (2 * j - n))
            rows.append(modulus * phase / peak)
        sides.append(tuple(rows))
    return ZeroMeanCoefficients(sides[0], sides[1])
