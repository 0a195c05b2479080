"""Exception hierarchy shared by all modules.

Exit-code mapping used by the CLI: ValidationError -> 2,
OutOfScopeError -> 3, InternalCheckError -> 4.
"""


class CoarsehomError(Exception):
    pass


class ValidationError(CoarsehomError):
    """Malformed or inconsistent input (bad table, dangling reference,
    non-equivariant map, predicate violation on operation inputs)."""


class OutOfScopeError(CoarsehomError):
    """A structurally valid request the library deliberately does not
    answer (e.g. homology of a tape space), never a wrong answer."""


class InternalCheckError(CoarsehomError):
    """A violated internal invariant; indicates a bug, not bad input."""
