class ConvergenceError(ArithmeticError):
    """A numerical routine exhausted its iteration or subdivision budget."""


class RegimeWarning(UserWarning):
    """Hurst index outside the arbitrage-free range (3/4, 1]."""
