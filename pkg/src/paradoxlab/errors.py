class ParadoxError(ValueError):
    """A statistic is undefined for the given input."""


class IngestError(OSError):
    """Input files could not be read or contained no usable rows."""


class ResamplingError(ParadoxError):
    """Too many replicates of a resampled statistic were undefined."""


class DegenerateComponentError(ArithmeticError):
    """A mixture component collapsed during EM."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
