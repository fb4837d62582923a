"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid user configuration or CLI input (exit status 1)."""


class NumericalGuardError(ArithmeticError):
    """A numerical validity guard tripped, e.g. a resonant denominator or a
    non-convergent quadrature (exit status 2)."""
