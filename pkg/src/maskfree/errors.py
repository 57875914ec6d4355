"""Exception hierarchy shared by all modules."""


class MaskfreeError(Exception):
    """Base class for every error raised by :mod:`maskfree`."""


class SizeLimitError(MaskfreeError, ValueError):
    """A size or work budget (``K_MAX``, term budget, overflow bound) was exceeded."""


class ConfigurationError(MaskfreeError, ValueError):
    """Invalid parameters or experiment configuration."""


class DomainError(MaskfreeError, ValueError):
    """Input outside the mathematical domain of an operation (shape mismatch, crossing partition, ...)."""


class WordParseError(ConfigurationError):
    """A word specification such as ``"1,2*"`` could not be parsed.

    Attributes
    ----------
    column : int
        1-based column of the offending character.
    """

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.column = column
