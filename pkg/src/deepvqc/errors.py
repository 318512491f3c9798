"""Exception hierarchy shared by every module."""


class DeepVQCError(Exception):
    """Base class for all package errors."""


class ContractError(DeepVQCError, ValueError):
    """A caller violated a documented precondition."""


class CapacityError(DeepVQCError, ValueError):
    """Requested size exceeds what the register can hold."""


class DegenerateInputError(DeepVQCError, ValueError):
    """Input has no usable content (zero norm, zero variance, ...)."""


class QubitIndexError(DeepVQCError, IndexError):
    pass


class DomainError(DeepVQCError, ValueError):
    pass


class ParseError(DeepVQCError, ValueError):
    pass


class StratificationError(DeepVQCError, ValueError):
    pass


class ToleranceError(DeepVQCError):
    """A numerical check exceeded its tolerance."""
