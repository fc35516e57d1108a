"""Exception hierarchy shared by the library and the CLI.

The CLI maps :class:`NumericalError` subclasses to exit code 2 and every other
:class:`MarkovInterpError` to exit code 1.
"""

from __future__ import annotations

from typing import Any, Optional


class MarkovInterpError(Exception):
    """Base exception for all library errors."""

    pass


class InvalidParameterError(MarkovInterpError, ValueError):
    """A parameter is outside its valid range."""

    pass


class NodeIndexError(InvalidParameterError):
    """A node index is outside ``0..n-1``."""

    pass


class DimensionMismatchError(InvalidParameterError):
    """Operand shapes do not agree."""

    pass


class IsolatedNodeError(MarkovInterpError):
    """A node has zero degree, so its Markov row is undefined."""

    def __init__(self, node: int) -> None:
        self.node = int(node)
        super().__init__(f"Node {self.node} is isolated (zero degree)")


class SpectralSizeError(InvalidParameterError):
    """Full eigendecomposition requested above the soft size limit."""

    pass


class UndefinedMetricError(MarkovInterpError):
    """An error metric is undefined for the given input (e.g. a zero vector)."""

    pass


class FormatError(MarkovInterpError):
    """A malformed row or document in an input file."""

    def __init__(
        self, message: str, path: Optional[str] = None, line: Optional[int] = None
    ) -> None:
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(f"{where}{message}")


class NumericalError(MarkovInterpError):
    """Base class for numerical failures (CLI exit code 2)."""

    pass


class SingularEigenvalueError(NumericalError):
    """Standard Nyström extension hit an eigenvalue too close to zero."""

    pass


class SolverInfeasibleError(NumericalError):
    """The ℓ1 problem has no feasible point."""

    def __init__(self, message: str, solution: Any = None) -> None:
        self.solution = solution
        super().__init__(message)


__all__ = [
    "MarkovInterpError",
    "InvalidParameterError",
    "NodeIndexError",
    "DimensionMismatchError",
    "IsolatedNodeError",
    "SpectralSizeError",
    "UndefinedMetricError",
    "FormatError",
    "NumericalError",
    "SingularEigenvalueError",
    "SolverInfeasibleError",
]
