"""Exception types shared across the library and mapped to CLI exit codes."""


class CharlabError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DomainError(CharlabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 3


class ResourceCapError(CharlabError):
    """A configured size cap (modulus, table length, enumeration size) would be exceeded."""

    exit_code = 4


class InvariantError(CharlabError):
    """An internal identity or invariant check failed."""

    exit_code = 5


class ParamError(DomainError):
    """An experiment parameter is missing, unknown or ill-typed."""

    def __init__(self, key: str, message: str):
        super().__init__(f"parameter {key!r}: {message}")
        self.key = key


class UnknownExperimentError(CharlabError):
    exit_code = 2
