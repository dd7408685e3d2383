"""JSON and CSV formats for sampled functions, coefficients, decompositions and reports.

Complex numbers are stored as [re, im] pairs. Every JSON document carries "schema_version";
CSV files start with a "# schema: <name> v<version>" comment line.
"""

import csv
import io
import json
import logging
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

import numpy as np

from .annulus_core import Annulus, C2Point, PolarGrid, SampledAnnulusFunction
from .errors import AnnulusSplitError, FormatError
from .lambda_domains import OmegaMembership
from .validation import OracleReport
from .zero_mean import ZeroMeanCoefficients, ZeroMeanReport

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def encode_complex(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


def decode_complex(pair: Any) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise FormatError(f"complex values are [re, im] pairs, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def encode_array(values: np.ndarray) -> list:
    values = np.asarray(values, dtype=complex)
    return np.stack([values.real, values.imag], axis=-1).tolist()


def decode_array(data: Any) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise FormatError(f"expected an array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def parse_complex(text: str) -> complex:
    """Command-line complex: '1.5', '1+2j', or 're,im'."""
    cleaned = text.strip().replace(" ", "")
    try:
        if "," in cleaned:
            re_part, im_part = cleaned.split(",")
            return complex(float(re_part), float(im_part))
        return complex(cleaned.replace("i", "j"))
    except ValueError:
        raise FormatError(f"cannot read {text!r} as a complex number") from None


def _read_json(path: str | Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise FormatError(f"{path} must hold a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise FormatError(f"{path} has schema_version {version}, expected {SCHEMA_VERSION}")
    return data


def _write_json(path: str | Path, payload: dict[str, Any]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"schema_version": SCHEMA_VERSION, **payload}, indent=2) + "\n")
    logger.info("wrote %s", path)


def coefficients_to_dict(coeffs: ZeroMeanCoefficients) -> dict[str, Any]:
    return {
        "n_max": coeffs.n_max,
        "plus": [encode_array(row) for row in coeffs.plus],
        "minus": [encode_array(row) for row in coeffs.minus],
    }


def coefficients_from_dict(data: Mapping[str, Any]) -> ZeroMeanCoefficients:
    try:
        plus = tuple(decode_array(row) for row in data["plus"])
        minus = tuple(decode_array(row) for row in data["minus"])
        coeffs = ZeroMeanCoefficients(plus, minus)
    except KeyError as e:
        raise FormatError(f"coefficient data is missing {e}") from e
    except (TypeError, ValueError, AnnulusSplitError) as e:
        raise FormatError(f"malformed coefficient data: {e}") from e
    if "n_max" in data and data["n_max"] != coeffs.n_max:
        raise FormatError(f"n_max={data['n_max']} disagrees with {coeffs.n_max} coefficient rows")
    return coeffs


def save_coefficients(path: str | Path, coeffs: ZeroMeanCoefficients) -> None:
    _write_json(path, {"kind": "zero_mean_coefficients", **coefficients_to_dict(coeffs)})


def load_coefficients(path: str | Path) -> ZeroMeanCoefficients:
    data = _read_json(path)
    # a decomposition export embeds its coefficients
    return coefficients_from_dict(data.get("coeffs", data))


def save_sampled(path: str | Path, f: SampledAnnulusFunction) -> None:
    grid = f.grid
    _write_json(
        path,
        {
            "kind": "sampled_annulus_function",
            "r1": grid.annulus.r1,
            "r2": grid.annulus.r2,
            "radii": grid.radii.tolist(),
            "n_theta": grid.n_theta,
            "values": encode_array(f.values),
        },
    )


def load_sampled(path: str | Path) -> SampledAnnulusFunction:
    data = _read_json(path)
    try:
        annulus = Annulus(float(data["r1"]), float(data["r2"]))
        grid = PolarGrid(annulus, np.asarray(data["radii"], dtype=float), int(data["n_theta"]))
        return SampledAnnulusFunction(grid, decode_array(data["values"]))
    except KeyError as e:
        raise FormatError(f"{path} is missing {e}") from e
    except (TypeError, ValueError, AnnulusSplitError) as e:
        raise FormatError(f"{path}: {e}") from e


def report_to_dict(report: ZeroMeanReport) -> dict[str, Any]:
    return {
        "verdict": report.verdict,
        "tol": report.tol,
        "n_max": report.n_max,
        "c0_norm": report.c0_norm,
        "c0_relative": report.c0_relative,
        "max_residual": report.max_residual,
        "tail_mass": report.tail_mass,
        "residuals": {str(n): v for n, v in sorted(report.residuals.items())},
    }


def plain_json(value: Any) -> Any:
    """numpy scalars, arrays and complex values turned into JSON-ready python objects."""
    if isinstance(value, dict):
        return {str(k): plain_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain_json(v) for v in value]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, np.ndarray):
        return plain_json(value.tolist())
    if isinstance(value, complex):
        return encode_complex(value)
    return value


def save_decomposition(path: str | Path, coeffs: ZeroMeanCoefficients, diagnostics: Mapping[str, Any]) -> None:
    _write_json(path, {"kind": "decomposition", "coeffs": coefficients_to_dict(coeffs), "diagnostics": plain_json(diagnostics)})


def point_to_dict(p: C2Point) -> dict[str, Any]:
    return {"z": encode_complex(p.z), "w": encode_complex(p.w)}


def point_from_dict(data: Mapping[str, Any]) -> C2Point:
    try:
        return C2Point(decode_complex(data["z"]), decode_complex(data["w"]))
    except KeyError as e:
        raise FormatError(f"C2 point is missing {e}") from e
    except AnnulusSplitError as e:
        raise FormatError(str(e)) from e


def membership_to_dict(p: C2Point, membership: OmegaMembership) -> dict[str, Any]:
    witness = membership.witness_center
    return {
        "point": point_to_dict(p),
        "region": membership.region.value,
        "witness": None if witness is None else encode_complex(witness),
        "residual": membership.residual,
    }


def write_report_lines(path: str | Path, reports: Iterable[OracleReport], append: bool = False) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a" if append else "w") as f:
        for report in reports:
            f.write(json.dumps(plain_json(report.to_dict())) + "\n")


def render_csv(schema: str, fieldnames: list[str], rows: Iterable[Mapping[str, Any]]) -> str:
    buffer = io.StringIO()
    buffer.write(f"# schema: {schema} v{SCHEMA_VERSION}\n")
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def write_csv(path: str | Path, schema: str, fieldnames: list[str], rows: Iterable[Mapping[str, Any]]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(schema, fieldnames, rows), encoding="utf-8")
    logger.info("wrote %s", path)


def read_csv(path: str | Path) -> tuple[str, list[dict[str, str]]]:
    """Returns the schema comment and the rows."""
    with Path(path).open(newline="", encoding="utf-8") as f:
        header = f.readline().strip()
        if not header.startswith("# schema:"):
            raise FormatError(f"{path} does not start with a schema comment")
        return header.removeprefix("# schema:").strip(), list(csv.DictReader(f))
