"""Masked random matrices, their free limits and Monte Carlo checks."""
from . import combinat, ensembles, freelimits, masks, moments, spectra
from ._kernels import BACKEND
from .errors import ConfigurationError, DomainError, MaskfreeError, SizeLimitError, WordParseError

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ConfigurationError", "DomainError", "MaskfreeError", "SizeLimitError", "WordParseError",
    "combinat", "ensembles", "freelimits", "masks", "moments", "spectra", "__version__",
]
