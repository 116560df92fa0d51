"""Exception types shared across the package."""


class IdsimError(Exception):
    """Base class for all package-specific errors."""


class InvalidSceneError(IdsimError):
    """Scene or goal-set configuration is unusable (e.g. zero goals)."""


class ConfigError(IdsimError):
    """A configuration document failed validation."""


class NumericalError(IdsimError):
    """A belief or kinematics update produced non-finite values."""


class DegenerateProjectionError(IdsimError):
    """A forward projection produced zero displacement along the probed dimension."""


class UndefinedAccuracyError(IdsimError):
    """Inference accuracy requested for a log with no nonzero-input steps."""
