"""Exception hierarchy shared by all equidist modules."""


class EquidistError(Exception):
    """Base class for every error raised by the package."""


class GeneratorSetMismatch(EquidistError, ValueError):
    """Two scalars refer to the same generator name with different values."""


class PrecisionExhausted(EquidistError, ValueError):
    """More digits were requested than the generator approximations carry."""


class DimensionMismatch(EquidistError, ValueError):
    pass


class DomainError(EquidistError, ValueError):
    pass


class AllTopCoefficientsRational(EquidistError):
    """No lattice direction can expose an irrational top-degree value.

    Callers should fall back to a residue-class split of the polynomial.
    """


class CardinalityOverflow(EquidistError, RuntimeError):
    pass


class ZeroVector(EquidistError, ValueError):
    pass


class RejectionBudgetExceeded(EquidistError, RuntimeError):
    pass


class EmptySequence(EquidistError, ValueError):
    pass


class GridBudgetExceeded(EquidistError, RuntimeError):
    pass


class NoLatticePointsBeyondT(EquidistError, RuntimeError):
    pass
