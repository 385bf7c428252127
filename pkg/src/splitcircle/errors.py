"""
Exception hierarchy shared by the numerical modules and the CLI.
"""

from __future__ import annotations

from typing import Optional


class SplitCircleError(Exception):
    """Base class for every failure raised by the library."""


class PrecisionExhausted(SplitCircleError):
    """A tolerance schedule needs more mantissa bits than the configured ceiling."""

    def __init__(self, message: str = "precision exhausted", bits: Optional[int] = None, ceiling: Optional[int] = None):
        if bits is not None and ceiling is not None:
            message = f"{message}: {bits} bits required, ceiling is {ceiling}"
        super().__init__(message)
        self.bits = bits
        self.ceiling = ceiling


class SplitFailed(SplitCircleError):
    """Factor extraction did not converge, or a certificate check failed."""

    def __init__(self, message: str = "split failed"):
        super().__init__(message)


class SampleSingular(SplitCircleError):
    """A contour sample landed too close to a root of the polynomial."""

    def __init__(self, message: str = "sample singular"):
        super().__init__(message)


class NumericOverflow(SplitCircleError):
    """A non-finite value appeared where only finite values are allowed."""


class ZeroPolynomialError(SplitCircleError, ZeroDivisionError):
    """Division or reduction by the zero polynomial."""

    def __init__(self, message: str = "division by the zero polynomial"):
        super().__init__(message)


class PolynomialParseError(SplitCircleError, ValueError):
    """Malformed polynomial input; `line` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
