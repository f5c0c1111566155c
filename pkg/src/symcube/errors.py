"""Exceptions shared by all modules.

The CLI maps these onto exit statuses: input problems exit 2,
resource bounds exit 3.
"""


class SymcubeError(Exception):
    """Base class for all library errors."""


class InputError(SymcubeError):
    """Malformed user input: bad syntax, bad indices, bad files."""


class MorphismSyntaxError(InputError):
    """Text that does not parse as a morphism or permutation."""


class IndexOutOfRange(InputError):
    """A generator index violates the bound for its kind."""


class CompositionMismatch(InputError):
    """compose(g, f) with f.dst != g.src."""


class BadDimension(InputError):
    """A dimension argument outside the operation's domain."""


class NotEpi(InputError):
    """An operation requiring an epimorphism received something else."""


class TruncationMismatch(InputError):
    """An operation needs presheaf levels beyond a truncated bound."""


class ResourceBound(SymcubeError):
    """An enumeration would exceed the configured size limit."""
