"""Nonnegative 2x2 matrices: spectra, hypothesis checks, companion transform.

All operations are written over an abstract ordered field: entries may be
binary64 floats or ``fractions.Fraction`` (or int), and results stay in the
input field wherever the formulas are rational.  The exact-rational test
oracle drives these same functions with Fraction entries, so the fast path
and the oracle share one code path for everything that does not need a
square root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Tuple, Union

from .errors import DomainError, NegativeDiscriminantError

Scalar = Union[int, float, Fraction]

# Relative slack below which a negative eigenvalue discriminant is treated
# as a rounding artifact of an exact zero.
DISCRIMINANT_SLACK = 1e-14


def exact_div(num: Scalar, den: Scalar) -> Scalar:
    """Division that stays exact for rational operands.

    int / int would silently drop to float; promote to Fraction instead.
    """
    if isinstance(num, Rational) and isinstance(den, Rational):
        return Fraction(num) / Fraction(den)
    return num / den


@dataclass(frozen=True)
class Mat2:
    """Matrix ((a, b), (d, theta)) with nonnegative entries."""

    a: Scalar
    b: Scalar
    d: Scalar
    theta: Scalar

    def __post_init__(self):
        for name in ("a", "b", "d", "theta"):
            value = getattr(self, name)
            if value < 0:
                raise ValueError(f"entry {name} must be nonnegative, got {value!r}")

    def trace(self) -> Scalar:
        return self.a + self.theta

    def det(self) -> Scalar:
        return self.a * self.theta - self.b * self.d

    def rows(self) -> Tuple[Tuple[Scalar, Scalar], Tuple[Scalar, Scalar]]:
        return ((self.a, self.b), (self.d, self.theta))

    def entry(self, i: int, j: int) -> Scalar:
        if i not in (1, 2) or j not in (1, 2):
            raise ValueError(f"entry indices must be 1 or 2, got ({i}, {j})")
        return self.rows()[i - 1][j - 1]


@dataclass(frozen=True)
class Eigenpair:
    """Ordered eigenvalues of a nonnegative 2x2 matrix, rho >= rho1."""

    rho: float
    rho1: float


@dataclass(frozen=True)
class ValidationReport:
    """Per-hypothesis flags for the convergence theorem on the limit matrix.

    The three hypotheses are a+theta != 0, b != 0 and bd != a*theta;
    ``gap_sign`` is the sign of bd - a*theta, which selects between the
    alternating-bound regime (+1) and the monotone regime (-1).
    """

    trace_nonzero: bool
    b_nonzero: bool
    gap_nonzero: bool
    gap_sign: int

    @property
    def passed(self) -> bool:
        return self.trace_nonzero and self.b_nonzero and self.gap_nonzero

    def failures(self) -> list[str]:
        out = []
        if not self.trace_nonzero:
            out.append("a + theta must be nonzero")
        if not self.b_nonzero:
            out.append("b must be nonzero")
        if not self.gap_nonzero:
            out.append("b*d must differ from a*theta")
        return out


@dataclass(frozen=True)
class CompanionMat:
    """Transformed matrix ((a_tilde, b_tilde), (d_tilde, 0)).

    Conjugating M_k by the index-dependent unit lower-triangular factors
    zeroes the (2,2) entry; products of these matrices telescope against
    products of the originals up to boundary factors, and their (1,1)
    entries are reciprocals of tail-approximant products.
    """

    a_tilde: Scalar
    b_tilde: Scalar
    d_tilde: Scalar

    def rows(self) -> Tuple[Tuple[Scalar, Scalar], Tuple[Scalar, Scalar]]:
        zero = self.a_tilde - self.a_tilde
        return ((self.a_tilde, self.b_tilde), (self.d_tilde, zero))

    def det(self) -> Scalar:
        return -self.b_tilde * self.d_tilde

    def entry(self, i: int, j: int) -> Scalar:
        if i not in (1, 2) or j not in (1, 2):
            raise ValueError(f"entry indices must be 1 or 2, got ({i}, {j})")
        return self.rows()[i - 1][j - 1]


@dataclass(frozen=True)
class LowerUnitriangular:
    """((1, 0), (subdiag, 1)); the conjugating factor at one index."""

    subdiag: Scalar

    def rows(self):
        one = 1 if isinstance(self.subdiag, Rational) else 1.0
        zero = one - one
        return ((one, zero), (self.subdiag, one))

    def inverse(self) -> "LowerUnitriangular":
        return LowerUnitriangular(-self.subdiag)


def eigenvalues(m: Mat2) -> Eigenpair:
    """Both eigenvalues of ``m`` by the quadratic formula.

    The discriminant (a+theta)^2 + 4(bd - a*theta) is computed in the
    working field; a tiny negative value (within ``DISCRIMINANT_SLACK``
    relative to (a+theta)^2) is treated as zero, anything more negative
    raises.  For nonnegative entries the discriminant equals
    (a-theta)^2 + 4bd and is never genuinely negative.

    Returns float eigenvalues; the subdominant one is recovered from the
    determinant to avoid cancellation.
    """
    t = m.trace()
    disc = t * t + 4 * (m.b * m.d - m.a * m.theta)
    if disc < 0:
        if disc > -DISCRIMINANT_SLACK * float(t * t):
            disc = 0
        else:
            raise NegativeDiscriminantError(
                f"negative eigenvalue discriminant {float(disc)!r}", float(disc))
    s = math.sqrt(float(disc))
    rho = (float(t) + s) / 2.0
    if rho > 0.0:
        rho1 = float(m.det()) / rho
    else:
        rho1 = (float(t) - s) / 2.0
    return Eigenpair(rho=rho, rho1=rho1)


def validate_limit_matrix(m: Mat2) -> ValidationReport:
    """Non-throwing check of the three limit-matrix hypotheses."""
    gap = m.b * m.d - m.a * m.theta
    sign = 0 if gap == 0 else (1 if gap > 0 else -1)
    return ValidationReport(
        trace_nonzero=m.trace() != 0,
        b_nonzero=m.b != 0,
        gap_nonzero=gap != 0,
        gap_sign=sign,
    )


def companion(m_k: Mat2, m_next: Mat2, index: int | None = None) -> CompanionMat:
    """Companion matrix built from M_k and its successor M_{k+1}.

    a_tilde = a_k + b_k * theta_{k+1} / b_{k+1}
    b_tilde = b_k
    d_tilde = d_k - a_k * theta_k / b_k

    Exact over rationals when both arguments have rational entries.

    Raises
    ------
    DomainError
        If either b entry is zero (the transform divides by both).
    """
    where = "" if index is None else f" at index {index}"
    if m_k.b == 0:
        raise DomainError(f"companion transform needs b != 0{where}")
    if m_next.b == 0:
        raise DomainError(f"companion transform needs successor b != 0{where}")
    return CompanionMat(
        a_tilde=m_k.a + exact_div(m_k.b * m_next.theta, m_next.b),
        b_tilde=m_k.b,
        d_tilde=m_k.d - exact_div(m_k.a * m_k.theta, m_k.b),
    )


def lambda_of(m: Mat2) -> LowerUnitriangular:
    """Conjugating factor for ``m``: unit lower-triangular with theta/b below."""
    if m.b == 0:
        raise DomainError("conjugating factor needs b != 0")
    return LowerUnitriangular(subdiag=exact_div(m.theta, m.b))


Rows2 = Tuple[Tuple[Scalar, Scalar], Tuple[Scalar, Scalar]]


def mat_mul(x: Rows2, y: Rows2) -> Rows2:
    """Plain 2x2 product over row tuples; field-generic."""
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def row_times(row: Tuple[Scalar, Scalar], y: Rows2) -> Tuple[Scalar, Scalar]:
    """Row vector times 2x2 matrix; field-generic."""
    return (
        row[0] * y[0][0] + row[1] * y[1][0],
        row[0] * y[0][1] + row[1] * y[1][1],
    )
