"""Zero-circle-means functions on an annulus: detection, splitting f = f+ + f- and extensions into C^2."""

from .annulus_core import (
    Annulus,
    C2Point,
    CircleSpec,
    EvaluableFunction,
    PolarGrid,
    RadialLayout,
    SampledAnnulusFunction,
    Side,
    make_grid,
    sample,
)
from .decompose import Decomposition, abel_path_split, check_circle_extension, hoelder_estimate, split
from .errors import AnnulusSplitError
from .zero_mean import ZeroMeanCoefficients, ZeroMeanReport, check_zero_means, random_zero_mean, synthesize

__all__ = [
    "Annulus",
    "AnnulusSplitError",
    "C2Point",
    "CircleSpec",
    "Decomposition",
    "EvaluableFunction",
    "PolarGrid",
    "RadialLayout",
    "SampledAnnulusFunction",
    "Side",
    "ZeroMeanCoefficients",
    "ZeroMeanReport",
    "abel_path_split",
    "check_circle_extension",
    "check_zero_means",
    "hoelder_estimate",
    "make_grid",
    "random_zero_mean",
    "sample",
    "split",
    "synthesize",
]
