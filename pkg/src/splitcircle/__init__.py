"""
splitcircle package init.
"""

__version__ = "0.1.0"

from .circle_search import ctr, ctr0, hom, rad  # noqa: E402
from .config import SolverConfig, load_config  # noqa: E402
from .errors import (  # noqa: E402
    PolynomialParseError,
    PrecisionExhausted,
    SampleSingular,
    SplitCircleError,
    SplitFailed,
)
from .factorizer import FactorList, RootList, fact, roots, verify_residual  # noqa: E402
from .graeffe import mod_k, mod_max, mod_min, nrd  # noqa: E402
from .numeric import Poly, Precision  # noqa: E402

__all__ = [
    "__version__",
    "FactorList",
    "Poly",
    "PolynomialParseError",
    "Precision",
    "PrecisionExhausted",
    "RootList",
    "SampleSingular",
    "SolverConfig",
    "SplitCircleError",
    "SplitFailed",
    "ctr",
    "ctr0",
    "fact",
    "hom",
    "load_config",
    "mod_k",
    "mod_max",
    "mod_min",
    "nrd",
    "rad",
    "roots",
    "verify_residual",
]
