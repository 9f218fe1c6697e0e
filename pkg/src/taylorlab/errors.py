"""Exception types shared by every module.

The CLI maps them onto exit codes: argument and precondition errors are
usage errors (2), resource errors signal that a configured cap was hit (3).
"""


class ArgumentError(ValueError):
    """Malformed input: wrong arity, element out of range, bad file."""


class PreconditionError(ValueError):
    """The input is well formed but the operation is not defined for it."""


class ResourceError(RuntimeError):
    """A search or closure exceeded its configured budget."""
