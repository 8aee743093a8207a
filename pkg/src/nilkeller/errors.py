"""Exception hierarchy shared by every module."""

from __future__ import annotations


class NilkellerError(Exception):
    """Base class for all library errors."""


class ContextMismatch(NilkellerError, ValueError):
    """Two polynomials (or matrices) live in different variable contexts."""


class ParseError(NilkellerError, ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


class ShapeError(NilkellerError, ValueError):
    """A map does not have the structural form an operation requires."""


class PreconditionError(NilkellerError):
    """A mathematical hypothesis of an operation does not hold for the input.

    ``hypothesis`` names the failed condition so reports can cite it.
    """

    def __init__(self, hypothesis: str, detail: str = ""):
        msg = hypothesis if not detail else f"{hypothesis}: {detail}"
        super().__init__(msg)
        self.hypothesis = hypothesis
        self.detail = detail


class WitnessError(NilkellerError):
    """A constructed witness failed its own exact verification."""


class CorpusAnomaly(NilkellerError):
    """An instance contradicts a fact the construction relies on."""


class CompositionMismatch(NilkellerError):
    """A tame word does not compose to the map it claims to decompose."""

    def __init__(self, message: str, component: int | None = None):
        super().__init__(message)
        self.component = component


class RecipeDidNotClose(NilkellerError):
    """The constructive recipe does not apply to this generalized instance."""
