"""
Error hierarchy
Every failure the toolkit reports carries the process exit code it maps to
and, where one exists, a hint on how to fix the input.
"""

from typing import Optional


class WaterfallError(Exception):
    """Base class for all toolkit errors"""

    exit_code: int = 2

    def __init__(self, message: str, hint: Optional[str] = None):
        super().__init__(message)
        self.hint = hint

    def __str__(self) -> str:
        message = super().__str__()
        if self.hint:
            return f"{message} (hint: {self.hint})"
        return message


# Usage / validation errors -> exit 1

class ConfigError(WaterfallError):
    exit_code = 1


class InvalidSnr(WaterfallError, ValueError):
    exit_code = 1


class LengthMismatch(WaterfallError, ValueError):
    exit_code = 1


class EmptyCurve(WaterfallError, ValueError):
    exit_code = 1


# Numerical failures -> exit 2

class NonConvergence(WaterfallError, ArithmeticError):
    exit_code = 2


class DegenerateInput(WaterfallError, ArithmeticError):
    exit_code = 2


class NoWaterfallRegion(DegenerateInput):
    def __init__(self, message: str):
        super().__init__(message, hint="extend the SNR grid to lower values")


class NoConvergedRegion(DegenerateInput):
    def __init__(self, message: str):
        super().__init__(message, hint="extend the SNR grid to higher values")


class LevelNotBracketed(WaterfallError, ValueError):
    exit_code = 2


# Acceptance suite -> exit 3

class AcceptanceFailure(WaterfallError):
    exit_code = 3
