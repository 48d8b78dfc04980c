"""Entry growth of 2x2 matrix products via continued-fraction tails.

For a convergent sequence of nonnegative matrices M_k (entries a, b, d,
theta), the entries of M_{k+1}...M_{k+n} grow like the top eigenvalue power
rho^n of the limit matrix.  The normalized entry

    Pi(k, n) = (e_i M_{k+1}...M_{k+n} e_j^t) * xi_{k+1}...xi_{k+n}

converges as n grows to an explicit constant psi(i, j, k) built from the
limit spectrum, where xi_m are the tails of the coefficient stream derived
from the sequence.  This module constructs that stream, evaluates psi and
its companion-product variant phi, accumulates Pi incrementally in scaled
arithmetic, and exposes the log-scale constants sigma_i used to sandwich
log Pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .contfrac import CFCoeffs, tails_range
from .errors import DegenerateIndexError, DegenerateSpectrumError, DomainError
from .mat2 import Mat2, Scalar, companion, eigenvalues, exact_div, row_times
from .sequences import MatrixSequence


def cf_from_sequence(seq: MatrixSequence) -> CFCoeffs:
    """Coefficient stream of the fraction attached to a matrix sequence.

    beta_k = b_{k+1} / (b_k * (b_{k+1} d_{k+1} - a_{k+1} theta_{k+1}))
    alpha_k = (a_k b_{k+1} + b_k theta_{k+1}) / (same denominator)

    with declared limits beta = 1/(b d - a theta), alpha = (a + theta) *
    beta evaluated at the limit matrix.  Exact over rational entries.
    """
    def at(k: int) -> Tuple[Scalar, Scalar]:
        m_k = seq.at(k)
        m_next = seq.at(k + 1)
        den = m_k.b * (m_next.b * m_next.d - m_next.a * m_next.theta)
        if den == 0:
            raise DegenerateIndexError(
                f"coefficients undefined at index {k}: "
                f"b_k * (b d - a theta at index {k + 1}) = 0", index=k)
        beta_k = exact_div(m_next.b, den)
        alpha_k = exact_div(m_k.a * m_next.b + m_k.b * m_next.theta, den)
        return alpha_k, beta_k

    lim = seq.limit
    gap = lim.b * lim.d - lim.a * lim.theta
    if gap == 0:
        raise DegenerateSpectrumError(
            "limit matrix has b d = a theta; coefficient limits undefined")
    return CFCoeffs(at=at, alpha=exact_div(lim.trace(), gap),
                    beta=exact_div(1, gap))


def _spectral_gap(m: Mat2) -> Tuple[float, float, float]:
    eig = eigenvalues(m)
    gap = eig.rho - eig.rho1
    if gap == 0.0:
        raise DegenerateSpectrumError(
            "limit matrix has a repeated eigenvalue; normalized entries have "
            "no finite target")
    return eig.rho, eig.rho1, gap


def _check_entry_indices(i: int, j: int) -> None:
    if i not in (1, 2) or j not in (1, 2):
        raise ValueError(f"entry indices must be 1 or 2, got ({i}, {j})")


def _second_row_factor(m_next: Mat2, tail_next: float) -> float:
    # shared k-dependent factor of the second-row targets:
    # theta_{k+1}/b_{k+1} - xi_{k+1} * det(M_{k+1})/b_{k+1}
    if m_next.b == 0:
        raise DomainError("second-row target needs b > 0 at index k+1")
    b = float(m_next.b)
    return float(m_next.theta) / b - tail_next * float(m_next.det()) / b


def psi(seq: MatrixSequence, i: int, j: int, k: int, tail_next: float) -> float:
    """Limit of Pi(k, n) as n grows, for entry (i, j).

    psi(1,1,k) = (rho - theta)/(rho - rho1)
    psi(1,2,k) = b/(rho - rho1)
    psi(2,1,k) = (rho - theta)/(rho - rho1) * f(k)
    psi(2,2,k) = b/(rho - rho1) * f(k)

    where b, theta, rho, rho1 belong to the limit matrix, f(k) is the
    second-row factor theta_{k+1}/b_{k+1} - xi_{k+1} det(M_{k+1})/b_{k+1},
    and tail_next is the tail xi_{k+1}.  The second-row prefactors repeat
    the first-row ones: the second row of the product is asymptotically
    proportional to the first, with f(k) the proportionality constant.
    """
    _check_entry_indices(i, j)
    rho, _, gap = _spectral_gap(seq.limit)
    lim = seq.limit
    first = (rho - float(lim.theta)) / gap if j == 1 else float(lim.b) / gap
    if i == 1:
        return first
    return first * _second_row_factor(seq.at(k + 1), tail_next)


def phi(seq: MatrixSequence, i: int, j: int, k: int, tail_next: float) -> float:
    """Companion-product analogue of psi.

    phi(1,1,k) = rho/(rho - rho1)
    phi(1,2,k) = b/(rho - rho1)
    phi(2,1,k) = d~_{k+1} xi_{k+1} * rho/(rho - rho1)
    phi(2,2,k) = d~_{k+1} xi_{k+1} * b/(rho - rho1)

    with d~ the lower-left entry of the companion transform at index k+1.
    """
    _check_entry_indices(i, j)
    rho, _, gap = _spectral_gap(seq.limit)
    lim = seq.limit
    first = rho / gap if j == 1 else float(lim.b) / gap
    if i == 1:
        return first
    m_next = seq.at(k + 1)
    if m_next.b == 0:
        raise DomainError("companion transform needs b > 0 at index k+1")
    d_tilde = float(m_next.d) - float(m_next.a) * float(m_next.theta) / float(m_next.b)
    return first * d_tilde * tail_next


@dataclass(frozen=True)
class ScaledEntry:
    """Signed value mantissa * 2^log2_scale with |mantissa| in [1, 2) or 0."""

    mantissa: float
    log2_scale: int

    @staticmethod
    def from_float(x: float, log2_scale: int = 0) -> "ScaledEntry":
        if x == 0.0:
            return ScaledEntry(0.0, 0)
        frac, exp = math.frexp(x)  # |frac| in [0.5, 1)
        return ScaledEntry(frac * 2.0, log2_scale + exp - 1)

    def sign(self) -> int:
        if self.mantissa == 0.0:
            return 0
        return 1 if self.mantissa > 0 else -1

    def to_float(self) -> float:
        try:
            return math.ldexp(self.mantissa, self.log2_scale)
        except OverflowError:
            return math.inf * self.sign()

    def to_fraction(self) -> Fraction:
        """Exact represented value; mantissa is a dyadic rational."""
        base = Fraction(self.mantissa)
        if self.log2_scale >= 0:
            return base * (2 ** self.log2_scale)
        return base / (2 ** (-self.log2_scale))

    def log2_abs(self) -> float:
        if self.mantissa == 0.0:
            raise DomainError("log of a zero scaled value")
        return math.log2(abs(self.mantissa)) + self.log2_scale

    def times(self, x: float) -> "ScaledEntry":
        return ScaledEntry.from_float(self.mantissa * x, self.log2_scale)


_E_ROWS = {1: (1.0, 0.0), 2: (0.0, 1.0)}


def product_entry(seq: MatrixSequence, k: int, n: int, i: int, j: int) -> ScaledEntry:
    """Entry e_i M_{k+1}...M_{k+n} e_j^t as a scaled value.

    Left-to-right row accumulation with power-of-2 renormalization after
    every multiply, so products far past float range stay representable.
    """
    _check_entry_indices(i, j)
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    row = _E_ROWS[i]
    scale = 0
    for m in range(k + 1, k + n + 1):
        mat = seq.at(m)
        r1, r2 = row_times(row, ((float(mat.a), float(mat.b)),
                                 (float(mat.d), float(mat.theta))))
        top = max(abs(r1), abs(r2))
        if top == 0.0:
            return ScaledEntry(0.0, 0)
        _, exp = math.frexp(top)
        row = (math.ldexp(r1, -exp), math.ldexp(r2, -exp))
        scale += exp
    return ScaledEntry.from_float(row[j - 1], scale)


@dataclass(frozen=True)
class RatioDiagnostics:
    """Trace of Pi(k, n) against its limit target psi(i, j, k).

    ratios holds (n, Pi(k, n)) for n = 1..n_max; sup_dev is the sup of
    |Pi - target| over the last quartile of n (the settled part).
    """

    k: int
    i: int
    j: int
    ratios: List[Tuple[int, float]]
    target: float
    sup_dev: float
    tail_err_bound: float


def ratio_diagnostics(seq: MatrixSequence, k: int, i: int, j: int, n_max: int,
                      tol: float = 1e-12,
                      depth_cap: Optional[int] = None) -> RatioDiagnostics:
    """Normalized products Pi(k, n) for n = 1..n_max with their limit target.

    Pi is accumulated incrementally (row times matrix, then times the scalar
    tail), never as a quotient of two exponentially large numbers: the
    normalized row stays of order one while numerator and denominator alone
    would overflow binary64 near n of a few thousand.
    """
    _check_entry_indices(i, j)
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    cf = cf_from_sequence(seq)
    tails = tails_range(cf, k + 1, k + n_max, tol, depth_cap=depth_cap)
    target = psi(seq, i, j, k, tails[0].value)

    row = _E_ROWS[i]
    ratios: List[Tuple[int, float]] = []
    for n in range(1, n_max + 1):
        mat = seq.at(k + n)
        xi = tails[n - 1].value
        r1, r2 = row_times(row, ((float(mat.a), float(mat.b)),
                                 (float(mat.d), float(mat.theta))))
        row = (r1 * xi, r2 * xi)
        ratios.append((n, row[j - 1]))

    settled_from = (3 * n_max) // 4
    settled = [abs(value - target) for n, value in ratios if n > settled_from]
    if not settled:
        settled = [abs(ratios[-1][1] - target)]
    return RatioDiagnostics(k=k, i=i, j=j, ratios=ratios, target=target,
                            sup_dev=max(settled),
                            tail_err_bound=max(t.err_bound for t in tails))


def sigma(m: Mat2, i: int) -> float:
    """Log-scale sandwich constant: log(rho^i (rho - rho1) / (rho^{i+1} - rho1^{i+1})).

    Evaluated in the gap variable q = rho1/rho as log1p(-q) - log1p(-q^{i+1}),
    which is stable for q near 0 and exact at i = 0 (sigma_0 = 0).
    """
    if i < 0:
        raise ValueError(f"i must be >= 0, got {i}")
    eig = eigenvalues(m)
    if not eig.rho > abs(eig.rho1):
        raise DegenerateSpectrumError(
            f"needs rho > |rho1|, got rho={eig.rho!r}, rho1={eig.rho1!r}")
    q = eig.rho1 / eig.rho
    return math.log1p(-q) - math.log1p(-(q ** (i + 1)))


def m_to_a_entry_identity(seq: MatrixSequence, k: int, n: int, i: int):
    """Both sides of the boundary decomposition relating M- and A-products.

    Left: e_i M_{k+1}...M_{k+n} e_1^t.
    Right: with w = e_i L_{k+1} A_{k+1}...A_{k+n} (L the unit lower
    triangular conjugator), w_1 - (theta_{k+n+1}/b_{k+n+1}) w_2.

    The conjugators telescope through the product, leaving only the two
    boundary factors.  Field-generic and exact over rationals; no scaling,
    so keep n modest for float sequences.
    """
    if i not in (1, 2):
        raise ValueError(f"row index must be 1 or 2, got {i}")
    if k < 0 or n < 1:
        raise ValueError(f"need k >= 0 and n >= 1, got k={k}, n={n}")

    row = (1, 0) if i == 1 else (0, 1)
    for m in range(k + 1, k + n + 1):
        row = row_times(row, seq.at(m).rows())
    lhs = row[0]

    m_first = seq.at(k + 1)
    if m_first.b == 0:
        raise DomainError(f"conjugator needs b > 0 at index {k + 1}")
    if i == 1:
        w = (1, 0)
    else:
        w = (exact_div(m_first.theta, m_first.b), 1)
    for m in range(k + 1, k + n + 1):
        a_m = companion(seq.at(m), seq.at(m + 1), index=m)
        w = row_times(w, a_m.rows())
    m_after = seq.at(k + n + 1)
    if m_after.b == 0:
        raise DomainError(f"boundary factor needs b > 0 at index {k + n + 1}")
    rhs = w[0] - exact_div(m_after.theta, m_after.b) * w[1]
    return lhs, rhs


def spectral_radius_ratio(seq: MatrixSequence, k: int, n_max: int,
                          i: int, j: int) -> List[Tuple[int, float]]:
    """Series (e_i M_{k+1}...M_{k+n} e_j^t) / (rho(M_{k+1})...rho(M_{k+n})).

    Normalizes by per-index spectral radii instead of tails.  No convergence
    is asserted; the series is returned for side-by-side comparison.
    """
    _check_entry_indices(i, j)
    if k < 0 or n_max < 1:
        raise ValueError(f"need k >= 0 and n_max >= 1, got k={k}, n_max={n_max}")
    row = _E_ROWS[i]
    out: List[Tuple[int, float]] = []
    for n in range(1, n_max + 1):
        mat = seq.at(k + n)
        rho_m = eigenvalues(mat).rho
        if rho_m == 0.0:
            raise DomainError(f"zero spectral radius at index {k + n}")
        r1, r2 = row_times(row, ((float(mat.a), float(mat.b)),
                                 (float(mat.d), float(mat.theta))))
        row = (r1 / rho_m, r2 / rho_m)
        out.append((n, row[j - 1]))
    return out
