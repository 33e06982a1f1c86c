"""Exception hierarchy.

Numerical failures derive from :class:`NumericalError` (CLI exit code 3);
bad input derives from :class:`InputError` (exit code 2).
"""

from __future__ import annotations


class MonodromyLabError(Exception):
    pass


class InputError(MonodromyLabError):
    pass


class NumericalError(MonodromyLabError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class UnknownSystemError(InputError, KeyError):
    def __init__(self, name: str, available):
        self.name = name
        self.available = list(available)
        super().__init__(f"unknown system {name!r}; catalog: {', '.join(self.available)}")

    def __str__(self):
        return self.args[0]


class EvaluationError(NumericalError):
    def __init__(self, message: str, point=None):
        super().__init__(message if point is None else f"{message} at {list(point)}")
        self.point = point


class IntegrationError(NumericalError):
    def __init__(self, message: str, last_point=None, last_time=None):
        super().__init__(message)
        self.last_point = last_point
        self.last_time = last_time


class NotAnEquilibriumError(NumericalError):
    def __init__(self, residual: float):
        super().__init__(f"not an equilibrium: |dF| = {residual:.3e}")
        self.residual = residual


class FiberNotFoundError(NumericalError):
    def __init__(self, value, best_residual: float):
        super().__init__(f"no point found on fiber over {list(value)} (best residual {best_residual:.3e})")
        self.value = value
        self.best_residual = best_residual


class RegularityError(NumericalError):
    pass


class HorizonError(NumericalError):
    pass


class ContinuationStuckError(NumericalError):
    def __init__(self, message: str, parameter=None):
        super().__init__(message)
        self.parameter = parameter


class InconclusiveMonodromyError(NumericalError):
    pass


class AmbiguousCycleError(NumericalError):
    pass


class NotUnipotentError(NumericalError):
    pass


class NotFocusFocusValueError(NumericalError):
    pass
