"""Exception hierarchy shared by the library and the command line.

The CLI maps each family to a fixed exit code: parse errors to 1,
numerical failures to 2 and domain violations to 3.
"""


class IgaGapError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class DomainError(IgaGapError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 3


class NumericalError(IgaGapError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""

    exit_code = 2


class DefinitenessError(NumericalError):
    """A matrix expected to be positive definite is not."""


class ParseError(IgaGapError, ValueError):
    """Malformed user input (specification strings, config files, flags)."""

    exit_code = 1
