"""Exceptions raised by pycyclic."""


class PyCyclicError(Exception):
    """Base class for all pycyclic errors"""


class CompositionNotZero(PyCyclicError):
    pass


class UnboundedAssembly(PyCyclicError):
    pass


class ShapeMismatch(PyCyclicError):
    pass


class ValidationFailed(PyCyclicError):
    """Raised when an input that must be validated fails its axiom suite"""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NNotInvertible(PyCyclicError):
    pass


class MissingPairing(PyCyclicError):
    pass


class ArityOverflow(PyCyclicError):
    pass


class CapExceeded(PyCyclicError):
    pass


class DomainMismatch(PyCyclicError):
    pass


class PreconditionFailed(PyCyclicError):
    pass


class HypothesisFailed(PyCyclicError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class WindowTooSmall(PyCyclicError):
    pass


class UnknownName(PyCyclicError):
    pass


class ParseError(PyCyclicError):
    """Raised on malformed input, with the 1-based position of the problem"""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
