"""Exception types shared across the package."""


class JEError(ValueError):
    """Base class for every validation failure raised by jointex."""


class DomainError(JEError):
    pass


class ShapeError(JEError):
    pass


class ExistenceError(JEError):
    """Marginals admit no vector of the requested kind."""


class ConstraintViolation(JEError):
    """A named feasibility constraint fails.

    ``constraint`` carries the constraint tag, e.g. ``"JE_parameters_1"``.
    """

    def __init__(self, constraint, message, index=None):
        self.constraint = constraint
        self.index = index
        super().__init__(f"{constraint} violated: {message}")


class InfeasibleAllocationError(ConstraintViolation):
    def __init__(self, constraint, message, allocation=None, index=None):
        super().__init__(constraint, message, index=index)
        self.allocation = allocation


class CapacityError(JEError):
    pass


class UsageError(JEError):
    pass


class MembershipError(JEError):
    pass


class PairingError(JEError):
    pass


class UndefinedCorrelationError(JEError):
    pass
