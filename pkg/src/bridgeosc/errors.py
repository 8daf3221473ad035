"""Exception types shared across the package."""


class BridgeError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(BridgeError, ValueError):
    """A parameter record violates its validity constraints."""


class UnsupportedFamilyError(BridgeError):
    """The requested quantity is not defined for this equation family."""


class EmptyTrajectoryError(BridgeError, ValueError):
    """An operation needing samples received an empty trajectory."""
