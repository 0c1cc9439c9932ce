"""Exception hierarchy shared by every semrep module."""

from __future__ import annotations


class SemRepError(Exception):
    """Base class for all toolkit errors."""


class DuplicateId(SemRepError, ValueError):
    pass


class UnknownId(SemRepError, KeyError):
    def __str__(self) -> str:
        # KeyError quotes its argument; keep plain messages
        return str(self.args[0]) if self.args else ""


class SelfReference(SemRepError, ValueError):
    pass


class EmptyAlternatives(SemRepError, ValueError):
    pass


class CertOutOfRange(SemRepError, ValueError):
    pass


class EmptyDomain(SemRepError, ValueError):
    pass


class InvalidToken(SemRepError, ValueError):
    pass


class InvalidCount(SemRepError, ValueError):
    pass


class IntegrityError(SemRepError):
    def __init__(self, violations):
        self.violations = list(violations)
        summary = "; ".join(str(v) for v in self.violations[:5])
        more = len(self.violations) - 5
        if more > 0:
            summary += f"; ... ({more} more)"
        super().__init__(f"integrity check failed: {summary}")


class SizeLimit(SemRepError):
    pass


class NotGround(SemRepError, ValueError):
    pass


class CapExceeded(SemRepError):
    pass


class IndexOutOfRange(SemRepError, IndexError):
    pass


class OutsideDomain(SemRepError, ValueError):
    pass


class KindMismatch(SemRepError, ValueError):
    pass


class ParseError(SemRepError):
    """Fatal markup or file-format problem.

    ``line`` and ``column`` are 1-based when known.
    """

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None, diagnostics=None):
        self.line = line
        self.column = column
        self.diagnostics = diagnostics
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class DuplicateCategory(SemRepError, ValueError):
    pass


class AmbiguousMapping(SemRepError, ValueError):
    pass


class InvalidURI(SemRepError, ValueError):
    pass


class UnknownLinkKind(SemRepError, ValueError):
    pass


class ProfileError(SemRepError, ValueError):
    pass
