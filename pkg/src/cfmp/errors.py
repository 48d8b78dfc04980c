"""Failure classes shared by the library, the service, and the CLI.

Every error carries a ``failure_class`` string and the process exit code the
CLI maps it to: parse failures exit 2, validation failures 3, convergence
failures 4, arithmetic/domain failures 5.
"""

from __future__ import annotations


class CfmpError(Exception):
    failure_class = "internal"
    exit_code = 1


class ParseError(CfmpError):
    """Malformed input: sequence files, model spec strings, run configs."""

    failure_class = "parse"
    exit_code = 2

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(CfmpError):
    """A sequence or its limit matrix violates the convergence hypotheses."""

    failure_class = "validation"
    exit_code = 3


class ConvergenceError(CfmpError):
    """Certification failed within the depth cap; carries the best effort."""

    failure_class = "convergence"
    exit_code = 4

    def __init__(self, message: str, value: float | None = None,
                 err_bound: float | None = None, depth: int | None = None):
        self.value = value
        self.err_bound = err_bound
        self.depth = depth
        super().__init__(message)


class NonContractiveError(ConvergenceError):
    """Inflated contraction rate reached 1: the two eigenvalues have equal
    modulus and truncation error cannot be certified geometrically."""

    def __init__(self, message: str, rate: float | None = None):
        self.rate = rate
        super().__init__(message)


class DomainError(CfmpError):
    """Arithmetic outside an operation's domain."""

    failure_class = "arithmetic"
    exit_code = 5


class NegativeDiscriminantError(DomainError):
    def __init__(self, message: str, discriminant: float):
        self.discriminant = discriminant
        super().__init__(message)


class SingularApproximantError(DomainError):
    """A backward-recurrence denominator vanished (or underflowed)."""

    def __init__(self, message: str, step: int):
        self.step = step
        super().__init__(message)


class DegenerateIndexError(DomainError):
    """A coefficient formula degenerates at a specific sequence index."""

    def __init__(self, message: str, index: int):
        self.index = index
        super().__init__(message)


class DegenerateSpectrumError(DomainError):
    """Equal eigenvalues: asymptotic constants are undefined."""
