"""Exception hierarchy shared by every module of the package."""


class ContinuantError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSequenceError(ContinuantError, ValueError):
    """A sequence of partial quotients contains an element below 1 (or is empty where forbidden)."""


class OutOfRangeError(ContinuantError, ValueError):
    """A numeric argument lies outside the documented domain."""


class InvalidTransformError(ContinuantError, ValueError):
    """A rewriting identity was applied to a sequence that does not satisfy its hypotheses."""


class PreconditionError(ContinuantError, ValueError):
    """A construction was called with inputs that violate its stated preconditions."""


class ConstructionInvariantError(ContinuantError, AssertionError):
    """A constructed sequence failed direct verification. Should never happen."""


class SeedNotFoundError(ContinuantError, LookupError):
    """Exhaustive search found no admissible seed sequence."""

    def __init__(self, a: int, s: int, m: int):
        self.a, self.s, self.m = a, s, m
        super().__init__(f"no seed sequence for a={a}, s={s}, m={m}")


class BudgetExceededError(ContinuantError, RuntimeError):
    """The census exceeded its node budget before finishing."""

    def __init__(self, budget: int, nodes_visited: int, partial_count: int):
        self.budget = budget
        self.nodes_visited = nodes_visited
        self.partial_count = partial_count
        super().__init__(
            f"node budget {budget} exceeded after {nodes_visited} nodes "
            f"({partial_count} sequences found so far)"
        )


class CountOverflowError(ContinuantError, OverflowError):
    """A census count does not fit in 64 bits."""


class NotApplicableError(ContinuantError, ValueError):
    """A bound was requested for parameters below its validity threshold."""


class BracketingError(ContinuantError, ArithmeticError):
    """No sign change was found while bracketing a polynomial root."""
