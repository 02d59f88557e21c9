"""Exception hierarchy shared by every module."""


class RBForgeError(Exception):
    pass


class ScalarParseError(RBForgeError, ValueError):
    pass


class FieldMismatchError(RBForgeError, ValueError):
    pass


class AlgebraMismatchError(RBForgeError, ValueError):
    pass


class ShapeError(RBForgeError, ValueError):
    pass


class NonAssociativeError(RBForgeError, ValueError):
    """Raised when a structure-constant tensor fails the associativity gate."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class PreconditionError(RBForgeError, ValueError):
    """An operation's hypothesis does not hold; ``witness`` pins down where."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CapacityError(RBForgeError, ValueError):
    pass


class BudgetExceededError(RBForgeError, ValueError):
    pass


class InternalInconsistency(RBForgeError, AssertionError):
    """Two independent evaluations of the same theorem disagreed."""
