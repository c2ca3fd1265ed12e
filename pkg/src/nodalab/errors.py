"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: ValidationError -> 2, ResourceGuardError -> 3.
Gate failures are not exceptions; they are recorded in reports and mapped to exit 1.
"""


class ValidationError(ValueError):
    """Bad or inconsistent input: wrong dimension, out-of-range parameter, unknown key."""


class ResolutionError(ValidationError):
    """A measurement was requested below what the grid resolves (e.g. delta < 2 max h)."""


class EmptyNodalSetError(ValidationError):
    """An operation that needs a nonempty nodal set got a sign-definite sample."""


class ResourceGuardError(RuntimeError):
    """A configured resource cap (mode count, grid size) would be exceeded."""
