class NsgapError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ValidationError(NsgapError, ValueError):
    """Input violates a documented invariant."""

    exit_code = 2


class DegenerateConfiguration(NsgapError, ValueError):
    """A ratio is 0/0: the configuration imposes no constraint."""

    exit_code = 2


class BudgetExceeded(NsgapError, RuntimeError):
    """Exhaustive enumeration would exceed the configured evaluation budget."""

    exit_code = 3


class NonConvergence(NsgapError, RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    exit_code = 4
