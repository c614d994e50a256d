from typing import Any, Dict, Optional


class LambdaToolError(Exception):
    """Base class for every error raised by the toolkit"""

    exit_code = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    @property
    def error_type(self) -> str:
        return type(self).__name__


# Validation errors (exit code 2)
class ValidationFailure(LambdaToolError, ValueError):
    exit_code = 2


class SpecValidationError(ValidationFailure):
    pass


class NegativeWeight(SpecValidationError):
    pass


class ZeroSum(SpecValidationError):
    pass


class ZeroSuccessorOrAbstraction(SpecValidationError):
    pass


class GcdViolation(SpecValidationError):
    pass


class WeightOverflow(SpecValidationError):
    pass


class UnknownPreset(SpecValidationError):
    pass


class TermSyntaxError(ValidationFailure):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}", position=position)
        self.position = position


class IndexZero(TermSyntaxError):
    pass


class BLCDecodeError(ValidationFailure):
    pass


class Truncated(BLCDecodeError):
    pass


class TrailingBits(BLCDecodeError):
    pass


class BadPrefix(BLCDecodeError):
    pass


class DomainError(ValidationFailure):
    pass


# Resource errors (exit code 3)
class ResourceLimit(LambdaToolError):
    exit_code = 3


class NumericOverflow(ResourceLimit):
    pass


class AttemptsExhausted(ResourceLimit):
    def __init__(self, message: str, attempts: int, rejections: Optional[Dict[str, int]] = None):
        super().__init__(message, attempts=attempts, rejections=dict(rejections or {}))
        self.attempts = attempts
        self.rejections = dict(rejections or {})


# Numeric failures (exit code 1)
class NumericFailure(LambdaToolError):
    exit_code = 1


class NoConvergence(NumericFailure):
    pass


class DoubleRoot(NumericFailure):
    pass


class NegativeRadicand(NumericFailure):
    pass


class NormalizationFailure(NumericFailure):
    pass


# Self-check (exit code 4)
class SelfCheckFailure(LambdaToolError):
    exit_code = 4
