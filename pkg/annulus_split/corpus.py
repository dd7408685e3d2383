"""Golden corpus of test functions and the oracle sweep run over each entry."""

import json
import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .annulus_core import Annulus, EvaluableFunction, random_admissible_circle, sample
from .circle_transform import aliasing_cutoff, radial_fourier
from .config import GridConfig, RunConfig
from .decompose import abel_path_split, hoelder_estimate, verify_extensions
from .errors import FormatError, ParameterError
from .io_formats import decode_array
from .validation import (
    OracleReport,
    check_boundary_approach,
    check_circle_means,
    check_identity_24,
    check_lemma_61,
    check_max_principle,
    check_poisson_identity,
    check_psi_boundary,
    leaf_poisson_reference,
)
from .zero_mean import ZeroMeanCoefficients, check_zero_means, random_zero_mean, synthesize

logger = logging.getLogger(__name__)

DETECTOR_FLOOR = 1e-2
RECONSTRUCTION_TOL = 1e-9
PATH_AGREEMENT_TOL = 1e-12
EXTENSION_CIRCLES = 50
# the discrete Cauchy sums must resolve s^N at s = 0.999
LEMMA_61_NODES = 32768


def _cusp(z: np.ndarray) -> np.ndarray:
    return np.real(z) * np.sqrt(np.abs(z - 1.5))


# name -> (function, harmonics of its coefficients when it has zero circle means)
NAMED_FUNCTIONS: dict[str, tuple[Callable[[np.ndarray], np.ndarray], dict[int, list[complex]] | None]] = {
    "z": (lambda z: z, None),
    "re_z": (lambda z: np.real(z).astype(complex), None),
    "abs_z_squared": (lambda z: (np.abs(z) ** 2).astype(complex), None),
    "inverse_pair": (lambda z: 1.0 / z + 1.0 / np.conj(z), {1: [1.0], -1: [1.0]}),
    "rotating_pair": (lambda z: z / np.conj(z) + np.conj(z) / z**2, {2: [0.0, 1.0], -3: [0.0, 1.0, 0.0]}),
    "cusp": (_cusp, None),
}


class CorpusEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    kind: Literal["named", "coefficients", "random"]
    function: str | None = None
    harmonics: dict[int, list[list[float]]] | None = None
    seed: int | None = None
    n_max: int | None = None
    decay: float = 0.5
    expect_zero_mean: bool = True
    oracles: list[str] | None = None
    grid: GridConfig | None = None
    validation: dict[str, float] = Field(default_factory=dict)

    def threshold(self, name: str, default: float) -> float:
        return float(self.validation.get(name, default))


class Corpus(BaseModel):
    version: str = "unknown"
    entries: list[CorpusEntry]


def load_corpus(path: str | Path) -> Corpus:
    try:
        data = json.loads(Path(path).read_text())
        return Corpus.model_validate(data)
    except json.JSONDecodeError as e:
        raise FormatError(f"corpus {path} is not valid JSON: {e}") from e
    except ValidationError as e:
        raise FormatError(f"corpus {path} is malformed: {e}") from e


def build_function(entry: CorpusEntry, annulus: Annulus) -> tuple[EvaluableFunction, ZeroMeanCoefficients | None]:
    if entry.kind == "named":
        if entry.function not in NAMED_FUNCTIONS:
            raise ParameterError(f"unknown named function {entry.function!r}")
        fn, harmonics = NAMED_FUNCTIONS[entry.function]
        coeffs = None if harmonics is None else ZeroMeanCoefficients.from_harmonics(harmonics)
        return EvaluableFunction(fn, entry.function), coeffs

    if entry.kind == "coefficients":
        if not entry.harmonics:
            raise ParameterError(f"entry {entry.name} lists no harmonics")
        coeffs = ZeroMeanCoefficients.from_harmonics({n: decode_array(v) for n, v in entry.harmonics.items()})
    else:
        if entry.seed is None or entry.n_max is None:
            raise ParameterError(f"random entry {entry.name} needs seed and n_max")
        coeffs = random_zero_mean(entry.seed, entry.n_max, entry.decay, annulus)
    return synthesize(coeffs), coeffs


def _entry_config(entry: CorpusEntry, config: RunConfig) -> RunConfig:
    if entry.grid is None:
        return config
    return config.model_copy(update={"grid": entry.grid})


def _detector_report(entry: CorpusEntry, f: EvaluableFunction, config: RunConfig) -> OracleReport:
    report = check_zero_means(sample(f, config.make_grid()), config.n_max, config.tolerances.zero_mean_tol)
    floor = entry.threshold("detector_floor", DETECTOR_FLOOR)
    # rejected with a clear margin scores zero
    error = max(0.0, floor - report.max_residual) + (1.0 if report.verdict else 0.0)
    return OracleReport(
        "zero_mean_detector",
        error,
        1,
        0.0,
        details={"verdict": report.verdict, "max_residual": report.max_residual, "c0_norm": report.c0_norm},
    )


def _hoelder_report(entry: CorpusEntry, f: EvaluableFunction, config: RunConfig) -> OracleReport:
    alpha, m_hat = hoelder_estimate(sample(f, config.make_grid()))
    lo, hi = entry.threshold("alpha_min", 0.0), entry.threshold("alpha_max", 1.0)
    error = max(0.0, lo - alpha, alpha - hi)
    return OracleReport("hoelder", error, 1, 0.0, details={"alpha_hat": alpha, "M_hat": m_hat})


def _zero_mean_reports(
    entry: CorpusEntry, f: EvaluableFunction, coeffs: ZeroMeanCoefficients | None, config: RunConfig
) -> list[OracleReport]:
    annulus = config.annulus
    grid = config.make_grid()
    sampled = sample(f, grid)
    tol = config.tolerances
    cutoff = aliasing_cutoff(grid.n_theta)
    table = radial_fourier(sampled, -cutoff, cutoff)
    rng = np.random.default_rng(config.seed)

    reports = [
        check_identity_24(f, table, seed=config.seed, tol=entry.threshold("identity_24", 1e-8)),
        check_poisson_identity(sampled, tol=entry.threshold("poisson_identity", 1e-10)),
        check_circle_means(f, annulus, seed=config.seed, tol=entry.threshold("circle_means", 1e-10)),
    ]
    decomposition, log = abel_path_split(sampled, config.n_max, tol=tol.zero_mean_tol)
    coeffs = coeffs if coeffs is not None else decomposition.coeffs

    circle = random_admissible_circle(rng, annulus)
    reports.append(
        check_lemma_61(
            f(circle.nodes(LEMMA_61_NODES)),
            circle,
            seed=config.seed,
            tol=entry.threshold("lemma_61", 1e-8),
            reference=leaf_poisson_reference(coeffs, circle),
        )
    )
    reports.append(
        OracleReport(
            "reconstruction",
            decomposition.diagnostics["reconstruction"],
            sampled.values.size,
            entry.threshold("reconstruction", RECONSTRUCTION_TOL),
            details={"tail_mass": decomposition.report.tail_mass},
        )
    )
    worst_plus, worst_minus = verify_extensions(decomposition, annulus, EXTENSION_CIRCLES, config.seed)
    reports.append(
        OracleReport(
            "extension",
            max(worst_plus, worst_minus),
            2 * EXTENSION_CIRCLES,
            entry.threshold("extension", tol.extension_tol),
            details={"plus": worst_plus, "minus": worst_minus},
        )
    )
    reports.append(
        OracleReport(
            "path_agreement",
            log.coefficient_agreement,
            len(log.steps),
            entry.threshold("path_agreement", PATH_AGREEMENT_TOL),
            details={
                "monotone": log.monotone,
                "profile_agreement": log.profile_agreement,
                "final_plus_distance": log.steps[-1].plus_distance,
            },
        )
    )

    reports.append(check_max_principle(coeffs, annulus, seed=config.seed))
    reports.append(check_boundary_approach(coeffs, annulus, seed=config.seed))
    reports.append(check_psi_boundary(coeffs, annulus))
    return reports


ORACLE_GROUPS = {"zero_mean", "detector", "hoelder"}


def run_entry_oracles(entry: CorpusEntry, config: RunConfig) -> list[OracleReport]:
    """Every applicable oracle for one corpus entry, each tagged with the entry name."""
    config = _entry_config(entry, config)
    f, coeffs = build_function(entry, config.annulus)
    groups = set(entry.oracles or (["zero_mean"] if entry.expect_zero_mean else ["detector"]))
    unknown = groups - ORACLE_GROUPS
    if unknown:
        raise ParameterError(f"entry {entry.name} asks for unknown oracle groups {sorted(unknown)}")

    reports: list[OracleReport] = []
    if "zero_mean" in groups:
        reports.extend(_zero_mean_reports(entry, f, coeffs, config))
    if "detector" in groups:
        reports.append(_detector_report(entry, f, config))
    if "hoelder" in groups:
        reports.append(_hoelder_report(entry, f, config))

    tagged = [
        OracleReport(r.identity_name, r.max_abs_error, r.samples_tested, r.tolerance, r.excluded, {"entry": entry.name, **r.details})
        for r in reports
    ]
    failed = [r.identity_name for r in tagged if not r.passed]
    logger.info("entry %s: %d oracles, failed=%s", entry.name, len(tagged), failed or "none")
    return tagged


def summarize(reports: list[OracleReport]) -> dict[str, Any]:
    return {
        "total": len(reports),
        "passed": sum(r.passed for r in reports),
        "failed": [f"{r.details.get('entry', '-')}/{r.identity_name}" for r in reports if not r.passed],
    }
