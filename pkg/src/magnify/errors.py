"""Exception hierarchy.

Two branches matter for the CLI: ``ValidationError`` (bad input, exit
code 2) and ``NumericalError`` (a computation that could not be carried
out, exit code 3). Everything else is an internal failure (exit code 4).
"""


class MagnifyError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MagnifyError):
    """Input violates a documented precondition or invariant."""


class DuplicatePoints(ValidationError):
    """The space contains duplicate points (off-diagonal zero distances)."""

    def __init__(self, pairs, message=None):
        self.pairs = tuple(pairs)
        if message is None:
            shown = ", ".join(f"({i},{j})" for i, j in self.pairs[:5])
            more = "" if len(self.pairs) <= 5 else f" and {len(self.pairs) - 5} more"
            message = f"duplicate points at index pairs {shown}{more}"
        super().__init__(message)


class ZeroDiameter(ValidationError):
    """All pairwise distances are zero; the space cannot be normalized."""


class InvalidScale(ValidationError):
    """Scale factor t must be finite and strictly positive."""


class DegenerateSpace(ValidationError):
    """Operation requires at least two distinct points."""


class GridMismatch(ValidationError):
    """Profiles were evaluated on different grids and cannot be compared."""


class CardinalityMismatch(ValidationError):
    """Aligned comparison requires spaces of equal cardinality."""


class DegenerateInput(ValidationError):
    """Input is constant or otherwise carries no usable signal."""


class NumericalError(MagnifyError):
    """A numerical procedure failed on valid-looking input."""


class NotPositiveDefinite(NumericalError):
    """Cholesky factorization of the similarity matrix failed."""


class SingularMatrix(NumericalError):
    """Direct inversion hit a (numerically) singular matrix."""


class NoConvergence(NumericalError):
    """Root bracketing or iteration budget exhausted."""
