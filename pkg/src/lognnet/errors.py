"""Exception types raised across the package."""


class LogNNetError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class IdxFormatError(LogNNetError, ValueError):
    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class DatasetPairingError(LogNNetError, ValueError):
    pass


class PatternError(LogNNetError, ValueError):
    pass


class ParameterError(LogNNetError, ValueError):
    pass


class DegenerateNeuronError(LogNNetError, ArithmeticError):
    def __init__(self, neurons):
        self.neurons = list(neurons)
        super().__init__(
            "hidden neuron(s) %s have a constant weighted sum over the "
            "training data; cannot normalize" % self.neurons[:10])


class DivergenceError(LogNNetError, ArithmeticError):
    pass


class ModelFormatError(LogNNetError, ValueError):
    pass
