"""Exception hierarchy shared by the inference, schedule and horizon modules."""


class ConfbootError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ConfbootError, ValueError):
    """An argument is outside its documented domain."""


class ImpossibleEvidenceError(ConfbootError):
    """The prior gives zero probability to the observed mishap-free run."""


class DegenerateEvidenceError(ConfbootError):
    """No past operation is available to condition on."""


class InsufficientConditioningError(ConfbootError):
    """Too few simulated systems survive the past period to estimate anything."""


class ScheduleFormatError(ValidationError):
    """A schedule document is malformed; ``where`` locates the offending field."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)
