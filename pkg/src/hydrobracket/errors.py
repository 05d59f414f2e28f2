"""Exception hierarchy shared by every layer of the engine."""


class HydroError(Exception):
    """Base class for all engine errors."""


class ParseError(HydroError, ValueError):
    """Malformed expression text.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownVariable(HydroError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"unknown variable {self.name!r}"


class ExprZeroDivisionError(HydroError, ZeroDivisionError):
    """Division by an expression that is identically zero."""


class PoleError(HydroError, ArithmeticError):
    """Numeric evaluation hit a vanishing denominator."""


class DegenerateMetric(HydroError):
    def __init__(self, message="metric is degenerate (determinant vanishes identically)", direction=None):
        self.direction = direction
        if direction is not None:
            message = f"{message} [direction {direction}]"
        super().__init__(message)


class NonFlatMetric(HydroError):
    def __init__(self, direction=None, witness=None):
        self.direction = direction
        self.witness = witness
        msg = "metric is not flat"
        if direction is not None:
            msg += f" [direction {direction}]"
        super().__init__(msg)


class DegeneratePencil(HydroError):
    pass


class NotAPoissonBracket(HydroError):
    def __init__(self, report=None, message="bracket fails the Poisson relations"):
        self.report = report
        super().__init__(message)


class NonInvertibleChange(HydroError):
    pass


class EngineInconsistency(HydroError, AssertionError):
    """Two independent routes of the engine disagree; always a bug."""


class ShapeError(HydroError, ValueError):
    pass
