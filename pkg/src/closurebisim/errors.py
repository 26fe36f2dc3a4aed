class ClosureBisimError(Exception):
    """Base class for errors raised by this package."""


class ModelError(ClosureBisimError, ValueError):
    """Malformed model, point id, or point set."""


class InvalidPartitionError(ClosureBisimError, ValueError):
    """A partition that does not cover the model, or mixes labels where that is forbidden."""


class FormulaSyntaxError(ClosureBisimError, ValueError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class UnknownAtomError(ClosureBisimError, KeyError):
    pass


class TooLargeError(ClosureBisimError, RuntimeError):
    """An exponential procedure was asked to run beyond its size guard."""


class NoWitnessError(ClosureBisimError, ValueError):
    """Asked for a distinguishing formula for two equivalent points."""
