"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid arguments: wrong dimensions, out-of-range parameters, bad files."""


class NumericalError(ArithmeticError):
    """A computation could not reach a trustworthy result.

    Raised for ill-conditioned fits and for Monte-Carlo estimates whose
    dispersion is too large to support a verdict.
    """


class ContractError(ValueError):
    """A precondition on a mathematical object (e.g. primitivity) is violated."""
