"""Run configuration: defaults, then a JSON file, then command-line overrides."""

import json
import logging
import os
import re
from pathlib import Path
from typing import Annotated, Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .annulus_core import Annulus, PolarGrid, RadialLayout, make_grid
from .errors import FormatError, ParameterError

logger = logging.getLogger(__name__)

LOG_DIR_ENV = "ANNULUS_SPLIT_LOG_DIR"
DEFAULT_LOG_DIR = "logs"


class GridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_r: Annotated[int, Field(ge=2, description="Number of radii, endpoints included")] = 33
    n_theta: Annotated[int, Field(ge=8, description="Angles per circle, a power of two")] = 256
    layout: Annotated[RadialLayout, Field(description="uniform or chebyshev (in r^2)")] = RadialLayout.CHEBYSHEV

    @field_validator("layout", mode="before")
    @classmethod
    def _parse_layout(cls, value: Any) -> Any:
        return RadialLayout.parse(value) if isinstance(value, str) else value

    @field_validator("n_theta")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError(f"n_theta must be a power of two, got {value}")
        return value


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    zero_mean_tol: Annotated[float, Field(gt=0, description="Verdict tolerance of the zero-mean test")] = 1e-8
    extension_tol: Annotated[float, Field(gt=0, description="Largest allowed offending coefficient")] = 1e-8
    solver_tol: Annotated[float, Field(gt=0, description="Relative defect accepted by the fibre solver")] = 1e-9


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r1: Annotated[float, Field(gt=0, description="Inner radius")] = 1.0
    r2: Annotated[float, Field(gt=0, description="Outer radius")] = 2.0
    grid: GridConfig = Field(default_factory=GridConfig)
    n_max: Annotated[int, Field(ge=1, description="Truncation order of the coefficient fit")] = 8
    tolerances: Tolerances = Field(default_factory=Tolerances)
    seed: Annotated[int, Field(description="Seed for every random draw")] = 7
    input_path: Annotated[str | None, Field(description="File read by the command")] = None
    output_path: Annotated[str | None, Field(description="File written by the command")] = None

    @model_validator(mode="after")
    def _check_shape(self) -> "RunConfig":
        if not self.r1 < self.r2:
            raise ValueError(f"need r1 < r2, got r1={self.r1}, r2={self.r2}")
        if self.n_max > self.grid.n_theta // 2 - 1:
            raise ValueError(f"n_max={self.n_max} exceeds the aliasing cutoff of n_theta={self.grid.n_theta}")
        for name in ("input_path", "output_path"):
            if getattr(self, name) == "":
                raise ValueError(f"{name} must not be empty")
        return self

    @property
    def annulus(self) -> Annulus:
        return Annulus(self.r1, self.r2)

    def make_grid(self) -> PolarGrid:
        return make_grid(self.annulus, self.grid.n_r, self.grid.n_theta, self.grid.layout)

    def require(self, name: str) -> str:
        value = getattr(self, name)
        if not value:
            raise ParameterError(f"this command needs {name.replace('_', ' ')}")
        return value


def parse_grid(text: str) -> tuple[int, int]:
    """'33x256' -> (33, 256)."""
    match = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not match:
        raise ParameterError(f"grid must look like NRxNTHETA, got {text!r}")
    return int(match.group(1)), int(match.group(2))


def load_config(path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Merge a JSON config file and flat overrides over the defaults.

    Overrides use dotted keys for nested fields ("grid.n_r", "tolerances.zero_mean_tol");
    None values are ignored so unset flags keep the file's value.
    """
    data: dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise FormatError(f"config {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise FormatError(f"config {path} must hold a JSON object")
        logger.info("loaded config from %s", path)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        target = data
        *parents, leaf = key.split(".")
        for parent in parents:
            target = target.setdefault(parent, {})
        target[leaf] = value
    return RunConfig.model_validate(data)


def resolve_log_dir(flag: str | None) -> str:
    return flag or os.getenv(LOG_DIR_ENV) or DEFAULT_LOG_DIR
