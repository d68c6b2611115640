"""Exception types shared across the package."""


class SlicedGFError(Exception):
    """Base class for all package errors."""


class InputError(SlicedGFError, ValueError):
    """Invalid caller-supplied data (bad digit, mismatched operands, bad file)."""


class InvariantError(SlicedGFError, RuntimeError):
    """An internal invariant was violated; indicates a bug, not bad input."""


class BudgetExceededError(SlicedGFError, RuntimeError):
    """A brute-force computation would exceed its configured budget."""
