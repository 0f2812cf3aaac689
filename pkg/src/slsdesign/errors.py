"""Exception hierarchy shared by all modules."""


class SLSDesignError(Exception):
    """Base class for every error raised by slsdesign."""


class DomainError(SLSDesignError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(DomainError):
    """A requested enumeration exceeds the supported size."""


class InvalidMeasureError(DomainError):
    """Masses are negative or do not sum to one."""


class DegenerateDistributionError(DomainError):
    """Error moments give an asymmetry parameter t >= 1."""


class SingularityError(SLSDesignError, ArithmeticError):
    """The information matrix H(p) is singular where an inverse is needed."""


class SingularStartError(SingularityError):
    """The solver's starting measure has a singular information matrix."""


class UnsupportedOrderError(SLSDesignError):
    """No implemented Hadamard construction covers the requested order."""


class ConstructionError(SLSDesignError, RuntimeError):
    """A combinatorial construction failed its verification gate."""
