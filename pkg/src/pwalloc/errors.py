"""Exception types raised by the solvers and their inputs."""


class AllocationError(Exception):
    """Base class for every error raised by pwalloc."""


class OutOfRange(AllocationError, ValueError):
    pass


class NotFinite(AllocationError, ValueError):
    pass


class DomainError(AllocationError, ValueError):
    pass


class ConvergenceFailure(AllocationError, RuntimeError):
    pass


class Infeasible(AllocationError, ValueError):
    pass


class InfeasibleDistribution(AllocationError, ValueError):
    pass


class NonPositivePriority(AllocationError, ValueError):
    pass


class BudgetOutOfRange(AllocationError, ValueError):
    pass


class TooLarge(AllocationError, ValueError):
    """Raised when a brute-force enumeration would exceed its point cap."""
