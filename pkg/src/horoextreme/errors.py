"""Exception types raised by the library.

Domain errors (bad arguments, values outside a formula's validity range) use
plain ValueError; only failures that depend on runtime resources or on the
behaviour of numerical routines get their own classes.
"""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured enumeration or memory budget."""


class QuadratureError(RuntimeError):
    """A numerical integration failed to reach the requested accuracy."""
