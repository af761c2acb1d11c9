"""Exception hierarchy shared by all chainfix modules."""

from __future__ import annotations


class ChainfixError(Exception):
    """Base class for every error raised by this package."""


class InvalidInstanceError(ChainfixError):
    """A space, map, or instance file failed validation.

    Carries the first violated requirement: ``field`` is a dotted path into
    the instance document when known, ``witness`` the offending indices or
    points.
    """

    def __init__(self, message: str, *, field: str | None = None, witness=None):
        super().__init__(message)
        self.field = field
        self.witness = witness


class GrammarError(InvalidInstanceError):
    """An expression string fell outside the supported arithmetic grammar."""


class DomainError(ChainfixError):
    """An operation was called with arguments outside its domain."""


class EscapeError(ChainfixError):
    """An expression map produced a value outside its box.

    Signals an ill-posed instance; the solver reports it as divergence.
    """


class SamplingError(ChainfixError):
    """A sampling plan produced no usable points or quadruples."""
