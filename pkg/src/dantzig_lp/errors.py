"""Exception hierarchy shared by all solvers."""


class DantzigLPError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(DantzigLPError, ValueError):
    pass


class InvalidBound(DantzigLPError, ValueError):
    pass


class NonFiniteInput(DantzigLPError, ValueError):
    pass


class EmptyGrid(DantzigLPError, ValueError):
    pass


class InvalidAnchor(DantzigLPError, ValueError):
    pass


class NumericalFailure(DantzigLPError, ArithmeticError):
    """Basis factorization stayed singular after every repair attempt."""


class InitInfeasible(DantzigLPError, ValueError):
    """``y`` is not in the column span of ``X``; basis pursuit has no feasible point."""


class PowerMethodDivergence(DantzigLPError, ArithmeticError):
    pass


class DegenerateColumn(DantzigLPError, RuntimeError):
    """A generated column stayed all-zero after the re-draw budget ran out."""
