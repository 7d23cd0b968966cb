"""Exception hierarchy shared by every module.

Each class carries an ``exit_code`` so the command line front end can map
failures onto its uniform contract (2 input, 3 budget, 4 certificate).
"""

from __future__ import annotations


class WeaverError(Exception):
    exit_code = 1


class InvalidInput(WeaverError, ValueError):
    exit_code = 2


class NotPSD(InvalidInput):
    pass


class NotRealRooted(WeaverError, ArithmeticError):
    """Newton iteration left the region above the roots."""

    exit_code = 2


class SingularPoint(WeaverError, ArithmeticError):
    exit_code = 2


class IllConditioned(WeaverError, ArithmeticError):
    exit_code = 2


class BudgetExceeded(WeaverError):
    """Work estimate above the configured cap.

    ``required`` holds the quantity that would have been needed (a block
    count, an enumeration size, ...) so callers can report it.
    """

    exit_code = 3

    def __init__(self, message: str, required: float | None = None, cap: float | None = None):
        super().__init__(message)
        self.required = required
        self.cap = cap


class CertificateUnmet(WeaverError):
    exit_code = 4


class InternalError(WeaverError, RuntimeError):
    """A computed quantity contradicts a proven inequality."""

    exit_code = 4
