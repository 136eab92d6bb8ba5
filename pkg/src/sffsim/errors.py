"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Matrix or vector shape incompatible with the requested operation."""


class CapacityError(RuntimeError):
    """Dense Hilbert-space dimension exceeds the configured cap."""


class UnitarityError(ValueError):
    """Input violates a unitarity contract beyond tolerance."""


class BudgetError(RuntimeError):
    """Brute-force enumeration would exceed the configured budget."""
