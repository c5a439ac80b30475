"""Shared exception types."""


class FormatError(ValueError):
    """Malformed .fpg/.pcp input or an ill-formed presentation."""


class ConsistencyError(RuntimeError):
    """A pc presentation failed its consistency checks.

    The violations attribute lists the offending overlaps as tuples.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class ResourceCapError(RuntimeError):
    """A configured resource cap (order, class, enumeration size) was hit."""
