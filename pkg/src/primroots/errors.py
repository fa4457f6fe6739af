"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapacityError(RuntimeError):
    """A request exceeds a configured memory or scan budget."""


class ContractError(AssertionError):
    """A pre- or post-condition failed; carries whatever context was available."""

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = context
