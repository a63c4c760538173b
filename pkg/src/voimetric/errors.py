"""Exception hierarchy.

Everything derives from :class:`VoiError`. Input problems also derive from
:class:`ValueError` so callers that only know the builtin still catch them.
"""


class VoiError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(VoiError, ValueError):
    """An input failed a precondition."""


class EmptyInput(ValidationError):
    pass


class NegativeComponent(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class DomainError(ValidationError):
    """A scalar argument lies outside the function's domain."""


class DimensionError(ValidationError):
    """An operation received operands of an unsupported size."""


class DimensionMismatch(DimensionError):
    """Two operands that must agree in size do not."""


class InvalidPartition(ValidationError):
    pass


class EmptyInstance(ValidationError):
    pass


class OverflowPresent(ValidationError):
    """Mismatch statistics requested for a packing that left items unplaced."""


class DegenerateInput(ValidationError):
    pass


class SizeCapExceeded(VoiError):
    """An exhaustive solver would exceed its configured enumeration budget."""

    def __init__(self, what: str, count: float, cap: int):
        self.what = what
        self.count = count
        self.cap = cap
        super().__init__(f"{what}: {count:.3g} candidates exceeds size cap {cap}")
