"""Exception types raised across the package."""


class NctError(Exception):
    """Base class for every error raised by nctlab."""


class InvalidArchitectureError(NctError, ValueError):
    pass


class ShapeError(NctError, ValueError):
    pass


class CacheError(NctError, ValueError):
    pass


class NumericError(NctError, FloatingPointError):
    """Non-finite values showed up where finite ones are required."""

    def __init__(self, message, layer=None):
        super().__init__(message)
        self.layer = layer


class ParameterError(NctError, ValueError):
    pass


class LabelError(NctError, ValueError):
    pass


class DegenerateClassesError(NctError, ValueError):
    pass


class DegenerateScheduleError(NctError, ValueError):
    pass


class TrainingError(NctError, RuntimeError):
    """Training aborted; carries the epoch and batch where it happened."""

    def __init__(self, message, epoch=None, batch=None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class InsufficientSamplesError(NctError, ValueError):
    pass


class ProbeUnsupportedError(NctError, ValueError):
    pass


class ConfigError(NctError, ValueError):
    pass


class FormatError(NctError, ValueError):
    """A dataset or model file does not match its documented layout."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
