"""Kerr-de Sitter geometry, horizon normal forms, radial-point checks and quasinormal modes."""

__version__ = "0.1.0"

from . import errors, geometry, gnc, microlocal, modes  # noqa: E402
from .errors import (DegenerateRoots, KdsError, LambdaZeroUnsupported, NotSubextremal,  # noqa: E402
                     ParameterError)
from .geometry import SpacetimeParams, find_horizons  # noqa: E402

__all__ = [
    "DegenerateRoots", "KdsError", "LambdaZeroUnsupported", "NotSubextremal", "ParameterError",
    "SpacetimeParams", "__version__", "errors", "find_horizons", "geometry", "gnc", "microlocal",
    "modes",
]
