"""Exception types raised by the library."""


class QwmixError(Exception):
    """Base class for library errors."""


class ValidationError(QwmixError, ValueError):
    """Input violates a documented precondition."""


class ChainStructureError(QwmixError, ValueError):
    """Chain is not ergodic/reversible/lazy where required."""


class IllConditionedError(QwmixError, ArithmeticError):
    """A spectral quantity is too close to a pole to evaluate reliably."""


class PostSelectionError(QwmixError, ArithmeticError):
    """Post-selection probability degenerated below the supported floor."""


class StepBudgetExceeded(QwmixError, RuntimeError):
    """Monte Carlo walk exceeded its total step budget."""
