import json
import logging
from typing import Any

import pydantic

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_FORMAT = 2
EXIT_INTERNAL = 3


class AnnulusSplitError(Exception):
    """Base class for every error raised by annulus_split."""

    exit_code = EXIT_INTERNAL


class ParameterError(AnnulusSplitError, ValueError):
    exit_code = EXIT_FORMAT


class FormatError(AnnulusSplitError):
    exit_code = EXIT_FORMAT


class EvaluationError(AnnulusSplitError):
    """A function returned a non-finite value; `point` is where."""

    def __init__(self, message: str, point: complex | None = None) -> None:
        super().__init__(message)
        self.point = point


class ConditioningError(AnnulusSplitError):
    pass


class SingularProximityError(AnnulusSplitError):
    pass


class PoleError(AnnulusSplitError, ZeroDivisionError):
    pass


class HolderEstimationError(AnnulusSplitError):
    pass


class InvariantViolation(AnnulusSplitError):
    pass


class ZeroMeanRejected(AnnulusSplitError):
    """Input fails the zero-circle-means hypothesis; carries the report."""

    exit_code = EXIT_REJECTED

    def __init__(self, report: Any) -> None:
        super().__init__(
            f"zero-mean test failed: c0_norm={report.c0_norm:.3e}, "
            f"max_residual={report.max_residual:.3e}, tol={report.tol:.1e}"
        )
        self.report = report


def exit_code_for(exc: BaseException) -> int:
    """Normalize any exception into the CLI exit-code contract."""
    if isinstance(exc, AnnulusSplitError):
        return exc.exit_code

    if isinstance(exc, (json.JSONDecodeError, pydantic.ValidationError)):
        logger.warning("malformed input: %s", exc)
        return EXIT_FORMAT

    if isinstance(exc, OSError):
        logger.warning("unreadable input: %s", exc)
        return EXIT_FORMAT

    return EXIT_INTERNAL
