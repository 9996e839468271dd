from typing import Optional


class CCParetoError(Exception):
    """Base class for all domain errors raised by ccpareto."""


class GraphFormatError(CCParetoError, ValueError):
    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{message}")


class EmptyGraphError(CCParetoError, ValueError):
    pass


class DimensionMismatchError(CCParetoError, ValueError):
    pass


class InvalidProbabilityError(CCParetoError, ValueError):
    pass


class SampleIndexError(CCParetoError, IndexError):
    pass


class CoverageUnderflowError(CCParetoError, RuntimeError):
    """A cover counter would go negative: the state does not match the selection."""


class SampleManifestError(CCParetoError, ValueError):
    pass


class InstanceTooLargeError(CCParetoError, ValueError):
    pass


class EmptyArchiveError(CCParetoError, LookupError):
    pass
