"""Exception and warning types raised across the package."""


class SDDMeshError(Exception):
    """Base class for all errors raised by sddmesh."""


class OutOfDomainError(SDDMeshError, ValueError):
    pass


class EvaluationError(SDDMeshError, ArithmeticError):
    """A monitor function or weight produced a non-finite or non-positive value."""


class InversionError(SDDMeshError):
    """A computational target could not be located in the (xi, eta) image."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DegenerateMapError(SDDMeshError):
    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class LayoutError(SDDMeshError, ValueError):
    pass


class TanglingError(SDDMeshError):
    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class ComparisonError(SDDMeshError, ValueError):
    pass


class InstabilityError(SDDMeshError):
    pass


class ConfigError(SDDMeshError, ValueError):
    """Invalid user configuration (bad parameter value or combination)."""


class ConvergenceWarning(UserWarning):
    pass


class ReliabilityWarning(UserWarning):
    pass


class StabilityWarning(UserWarning):
    pass
