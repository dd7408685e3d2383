"""Quadrature and spectral transforms on circles.

Conventions:
- c_k(r) is the discrete coefficient (1/n) sum_j f(r e^{i theta_j}) e^{-i k theta_j}; harmonic k
  lives in FFT bin k mod n, so |k| must stay below n/2 (aliasing cutoff n/2 - 1).
- All circle integrals use the equal-weight trapezoid rule, spectrally accurate for periodic
  analytic integrands.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .annulus_core import CircleSpec, EvaluableFunction, PolarGrid, SampledAnnulusFunction
from .errors import EvaluationError, ParameterError, SingularProximityError

logger = logging.getLogger(__name__)

DEFAULT_NODES = 256
MIN_NODES = 8
SINGULAR_PROXIMITY = 1e-9


@dataclass(frozen=True)
class AbelParameter:
    t: float

    def __post_init__(self) -> None:
        if not 0.0 < self.t < 1.0:
            raise ParameterError(f"Abel parameter must lie in (0, 1), got {self.t}")


def _as_t(t: "AbelParameter | float") -> float:
    return t.t if isinstance(t, AbelParameter) else AbelParameter(float(t)).t


@dataclass(frozen=True, eq=False)
class RadialFourierTable:
    """coeffs[k - k_min, i] = c_k(radii[i])."""

    grid: PolarGrid
    k_min: int
    k_max: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        cutoff = aliasing_cutoff(self.grid.n_theta)
        if not self.k_min <= 0 <= self.k_max:
            raise ParameterError(f"need k_min <= 0 <= k_max, got [{self.k_min}, {self.k_max}]")
        if -self.k_min > cutoff or self.k_max > cutoff:
            raise ParameterError(f"harmonics [{self.k_min}, {self.k_max}] exceed aliasing cutoff {cutoff}")
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.shape != (self.k_max - self.k_min + 1, self.grid.n_r):
            raise ParameterError(f"coefficient array shape {coeffs.shape} does not match table bounds")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def harmonic(self, k: int) -> np.ndarray:
        """Profile r -> c_k(r) over the grid radii."""
        if not self.k_min <= k <= self.k_max:
            raise ParameterError(f"harmonic {k} outside table [{self.k_min}, {self.k_max}]")
        return self.coeffs[k - self.k_min]


def aliasing_cutoff(n_theta: int) -> int:
    return n_theta // 2 - 1


def fourier_coefficients(samples: np.ndarray, k_min: int, k_max: int) -> np.ndarray:
    """Discrete Fourier coefficients of equally spaced samples along the last axis.

    Returns an array whose first axis runs over k = k_min..k_max.
    """
    samples = np.asarray(samples, dtype=complex)
    n = samples.shape[-1]
    if k_max - k_min + 1 > n or k_min > k_max:
        raise ParameterError(f"cannot resolve harmonics [{k_min}, {k_max}] from {n} samples")
    spectrum = np.fft.fft(samples, axis=-1) / n
    bins = np.arange(k_min, k_max + 1) % n
    return np.moveaxis(spectrum[..., bins], -1, 0)


def circle_mean(f: EvaluableFunction, c: CircleSpec, n_nodes: int = DEFAULT_NODES) -> complex:
    if n_nodes < MIN_NODES:
        raise ParameterError(f"circle_mean needs at least {MIN_NODES} nodes, got {n_nodes}")
    nodes = c.nodes(n_nodes)
    values = np.asarray(f(nodes), dtype=complex)
    bad = ~np.isfinite(values)
    if np.any(bad):
        j = int(np.argmax(bad))
        raise EvaluationError(f"non-finite value at quadrature node {j} z={nodes[j]}", point=complex(nodes[j]))
    return complex(np.mean(values))


def radial_fourier(f: SampledAnnulusFunction, k_min: int, k_max: int) -> RadialFourierTable:
    cutoff = aliasing_cutoff(f.grid.n_theta)
    if k_min > 0 or k_max < 0 or -k_min > cutoff or k_max > cutoff:
        raise ParameterError(
            f"harmonic range [{k_min}, {k_max}] invalid for n_theta={f.grid.n_theta} (cutoff {cutoff})"
        )
    coeffs = fourier_coefficients(f.values, k_min, k_max)
    return RadialFourierTable(f.grid, k_min, k_max, coeffs)


def cauchy_from_samples(values: np.ndarray, circle: CircleSpec, z: complex | np.ndarray) -> complex | np.ndarray:
    """Trapezoid rule for (1 / 2 pi i) of the contour integral of f(zeta) / (zeta - z).

    `values` are f at circle.nodes(len(values)); with zeta - a = rho e^{i theta} the integrand
    becomes f(zeta) (zeta - a) / (zeta - z) d theta / 2 pi.
    """
    values = np.asarray(values, dtype=complex)
    offsets = circle.nodes(values.size) - circle.center
    z_arr = np.asarray(z, dtype=complex)
    gap = np.abs(np.abs(z_arr - circle.center) - circle.radius)
    if np.any(gap < SINGULAR_PROXIMITY):
        raise SingularProximityError(
            f"evaluation point within {SINGULAR_PROXIMITY:g} of the contour |zeta - {circle.center}| = {circle.radius}"
        )
    kernel = offsets / (offsets + circle.center - z_arr[..., None])
    out = (kernel * values).mean(axis=-1)
    return complex(out) if np.ndim(z) == 0 else out


def cauchy_integral(
    f: EvaluableFunction,
    r: float,
    z: complex | np.ndarray,
    n_nodes: int = DEFAULT_NODES,
) -> complex | np.ndarray:
    """Phi_r(z): equals f+(z) for |z| < r and -f-(z) for |z| > r."""
    if n_nodes < MIN_NODES:
        raise ParameterError(f"cauchy_integral needs at least {MIN_NODES} nodes, got {n_nodes}")
    circle = CircleSpec(0.0, r)
    values = np.asarray(f(circle.nodes(n_nodes)), dtype=complex)
    if not np.all(np.isfinite(values)):
        raise EvaluationError(f"non-finite integrand on |zeta| = {r}")
    return cauchy_from_samples(values, circle, z)


def _synthesize(table: RadialFourierTable, ks: np.ndarray, t: float) -> SampledAnnulusFunction:
    n = table.grid.n_theta
    spectrum = np.zeros((table.grid.n_r, n), dtype=complex)
    for k in ks:
        spectrum[:, k % n] = t ** abs(int(k)) * table.harmonic(int(k))
    values = np.fft.ifft(spectrum, axis=1) * n
    return SampledAnnulusFunction(table.grid, values)


def abel_plus(table: RadialFourierTable, t: "AbelParameter | float") -> SampledAnnulusFunction:
    """f_t+(r e^{i theta}) = sum_{k >= 1} t^k c_k(r) e^{i k theta}."""
    return _synthesize(table, np.arange(1, table.k_max + 1), _as_t(t))


def abel_minus(table: RadialFourierTable, t: "AbelParameter | float") -> SampledAnnulusFunction:
    """f_t-(r e^{i theta}) = sum_{k <= -1} t^{|k|} c_k(r) e^{i k theta}."""
    return _synthesize(table, np.arange(table.k_min, 0), _as_t(t))


def abel_mean(table: RadialFourierTable, t: "AbelParameter | float") -> SampledAnnulusFunction:
    t = _as_t(t)
    ks = np.concatenate([np.arange(table.k_min, 0), np.arange(1, table.k_max + 1)])
    return _synthesize(table, ks, t)


def poisson_kernel(t: float, x: np.ndarray) -> np.ndarray:
    return (1.0 - t * t) / (1.0 - 2.0 * t * np.cos(x) + t * t)


def poisson_circle(
    f_on_circle: np.ndarray,
    t: "AbelParameter | float",
    theta: float | np.ndarray,
) -> complex | np.ndarray:
    """Discrete Poisson integral (1/n) sum_j f_j P_t(theta - theta_j) for the unit disc."""
    t = _as_t(t)
    f_on_circle = np.asarray(f_on_circle, dtype=complex)
    n = f_on_circle.size
    nodes = 2.0 * np.pi * np.arange(n) / n
    theta_arr = np.asarray(theta, dtype=float)
    kernel = poisson_kernel(t, theta_arr[..., None] - nodes)
    out = (kernel * f_on_circle).mean(axis=-1)
    return complex(out) if np.ndim(theta) == 0 else out
