"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid input data or arguments (CLI exit code 2)."""


class DataConsistencyError(RuntimeError):
    """Inputs are individually valid but disagree with each other (CLI exit code 3)."""
