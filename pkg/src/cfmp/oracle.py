"""Exact rational reference implementations used to certify the float paths.

Everything here recomputes its result from scratch in Fraction arithmetic
with its own loops and its own transform formulas.  Nothing is shared with
the float implementations beyond the plain data types, so an agreement
between the two is evidence, not tautology:

  float route                      exact mirror here
  -----------                      -----------------
  product_entry (scaled rows)      exact_product_entry (full matrix products)
  cf_from_sequence (direct)        exact_coeffs_via_companion (transform route)
  approximant / tails_range        exact_approximant, tail_enclosure

Depth caps bound the bit-length of exact numbers; they are configuration
arguments, not hard constants.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Tuple

from .contfrac import CFCoeffs
from .errors import DegenerateIndexError, DomainError, SingularApproximantError
from .mat2 import Mat2
from .sequences import MatrixSequence

# A Mat2 whose entries are Fractions plays the exact-matrix role.
RationalMat2 = Mat2

DEFAULT_PRODUCT_CAP = 64
DEFAULT_APPROXIMANT_CAP = 256

FracRows = Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]


def rational_mat2(a, b, d, theta) -> RationalMat2:
    """Mat2 with entries coerced to Fraction (ints, strings like '1/3', Fractions)."""
    return Mat2(Fraction(a), Fraction(b), Fraction(d), Fraction(theta))


def _frac_rows(m: Mat2) -> FracRows:
    return ((Fraction(m.a), Fraction(m.b)), (Fraction(m.d), Fraction(m.theta)))


def _mul(x: FracRows, y: FracRows) -> FracRows:
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def _check_cap(depth: int, cap: int, what: str) -> None:
    if depth > cap:
        raise ValueError(f"{what} depth {depth} exceeds oracle cap {cap}")


def exact_product_entry(seq: MatrixSequence, k: int, n: int, i: int, j: int,
                        cap: int = DEFAULT_PRODUCT_CAP) -> Fraction:
    """Entry e_i M_{k+1}...M_{k+n} e_j^t by full exact matrix products."""
    if i not in (1, 2) or j not in (1, 2):
        raise ValueError(f"entry indices must be 1 or 2, got ({i}, {j})")
    if k < 0 or n < 1:
        raise ValueError(f"need k >= 0 and n >= 1, got k={k}, n={n}")
    _check_cap(n, cap, "product")
    prod = _frac_rows(seq.at(k + 1))
    for m in range(k + 2, k + n + 1):
        prod = _mul(prod, _frac_rows(seq.at(m)))
    return prod[i - 1][j - 1]


def exact_approximant(cf: CFCoeffs, k: int, n: int,
                      cap: int = DEFAULT_APPROXIMANT_CAP) -> Fraction:
    """Approximant xi_{k,n} by exact backward recurrence."""
    if k < 1 or n < k:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    _check_cap(n - k + 1, cap, "approximant")
    t = Fraction(0)
    for level in range(n, k - 1, -1):
        alpha_l, beta_l = cf.at(level)
        den = Fraction(alpha_l) + t
        if den == 0:
            raise SingularApproximantError(
                f"exact zero denominator at level {level}", step=level)
        t = Fraction(beta_l) / den
    return t


def _companion_parts(seq: MatrixSequence, m: int) -> Tuple[Fraction, Fraction, Fraction]:
    # own transform formulas, independent of the float-path implementation
    m_m = seq.at(m)
    m_next = seq.at(m + 1)
    b_m = Fraction(m_m.b)
    b_next = Fraction(m_next.b)
    if b_m == 0 or b_next == 0:
        raise DomainError(f"transform needs b != 0 at indices {m}, {m + 1}")
    a_tilde = Fraction(m_m.a) + b_m * Fraction(m_next.theta) / b_next
    d_tilde = Fraction(m_m.d) - Fraction(m_m.a) * Fraction(m_m.theta) / b_m
    return a_tilde, b_m, d_tilde


def exact_y(seq: MatrixSequence, k: int, n: int,
            cap: int = DEFAULT_PRODUCT_CAP) -> Fraction:
    """Top-left entry of the transformed product, e_1 A_k...A_n e_1^t, exactly."""
    if k < 1 or n < k:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    _check_cap(n - k + 1, cap, "transformed product")
    prod: FracRows | None = None
    for m in range(k, n + 1):
        a_t, b_t, d_t = _companion_parts(seq, m)
        rows: FracRows = ((a_t, b_t), (d_t, Fraction(0)))
        prod = rows if prod is None else _mul(prod, rows)
    return prod[0][0]


def exact_coeffs_via_companion(seq: MatrixSequence, k: int) -> Tuple[Fraction, Fraction]:
    """(alpha_k, beta_k) from the transform: beta = 1/(b~_k d~_{k+1}), alpha = a~_k beta."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    a_tilde_k, b_tilde_k, _ = _companion_parts(seq, k)
    _, _, d_tilde_next = _companion_parts(seq, k + 1)
    den = b_tilde_k * d_tilde_next
    if den == 0:
        raise DegenerateIndexError(
            f"transform product b~_k d~_{{k+1}} vanishes at index {k}", index=k)
    return a_tilde_k / den, Fraction(1) / den


def reciprocal_product_sides(seq: MatrixSequence, k: int, n: int,
               cap: int = DEFAULT_PRODUCT_CAP) -> Tuple[Fraction, Fraction]:
    """Both sides of the reciprocal-product identity.

    Left: product over m in [k, n] of 1/xi_{m,n} (exact approximants of the
    transform-route coefficients).  Right: e_1 A_k...A_n e_1^t.  The two are
    equal exactly whenever all approximants are nonzero.
    """
    cf = CFCoeffs(at=lambda m: exact_coeffs_via_companion(seq, m),
                  alpha=Fraction(0), beta=Fraction(0))
    prod_inv = Fraction(1)
    for m in range(k, n + 1):
        xi_mn = exact_approximant(cf, m, n, cap=cap)
        if xi_mn == 0:
            raise DomainError(f"zero approximant at ({m}, {n}); reciprocal undefined")
        prod_inv /= xi_mn
    return prod_inv, exact_y(seq, k, n, cap=cap)


def _positive_coeffs(cf: CFCoeffs, k: int, n: int) -> bool:
    for level in range(k, n + 1):
        alpha_l, beta_l = cf.at(level)
        if not (alpha_l > 0 and beta_l > 0):
            return False
    return True


def tail_enclosure(cf: CFCoeffs, k: int, depth: int = 40,
                   cap: int = DEFAULT_APPROXIMANT_CAP) -> Tuple[Fraction, Fraction]:
    """Exact bracket (lo, hi) around the tail xi_k from alternation.

    For positive coefficient streams the approximants alternate around the
    tail: below it when n-k+1 is even, above when odd.  Adjacent deep
    approximants therefore enclose xi_k.  Requires positive coefficients
    over the inspected range.
    """
    if depth < 2:
        raise ValueError(f"enclosure needs depth >= 2, got {depth}")
    n_hi = k + depth - 1
    if not _positive_coeffs(cf, k, n_hi):
        raise DomainError(
            "tail enclosure needs positive coefficients over the range")
    n_even = n_hi if (n_hi - k + 1) % 2 == 0 else n_hi - 1
    n_odd = n_hi if (n_hi - k + 1) % 2 == 1 else n_hi - 1
    lo = exact_approximant(cf, k, n_even, cap=cap)
    hi = exact_approximant(cf, k, n_odd, cap=cap)
    if not lo < hi:
        raise DomainError(
            f"enclosure collapsed at k={k}: even-depth side {lo} not below "
            f"odd-depth side {hi}")
    return lo, hi


def certify_tail(cf: CFCoeffs, k: int, value: float, err_bound: float,
                 depth: int = 40, cap: int = DEFAULT_APPROXIMANT_CAP) -> bool:
    """Exact check that a float tail sits in the enclosure widened by its bound."""
    lo, hi = tail_enclosure(cf, k, depth=depth, cap=cap)
    v = Fraction(value)
    widen = Fraction(err_bound)
    return lo - widen <= v <= hi + widen


def difference_identity_sides(seq: MatrixSequence, k: int, n: int,
                              cap: int = DEFAULT_PRODUCT_CAP) -> Tuple[Fraction, Fraction]:
    """Both sides of the approximant difference identity, exactly.

    Left: xi_{k,n+1} - xi_{k,n}.  Right:
    -b~_k d~_{n+1} * prod_{j=k+1}^{n} det(A_j) / (y_{k,n} y_{k,n+1})
    with det(A_j) = -b~_j d~_j.  The product is empty (= 1) at n = k.
    """
    if k < 1 or n < k:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    cf = CFCoeffs(at=lambda m: exact_coeffs_via_companion(seq, m),
                  alpha=Fraction(0), beta=Fraction(0))
    lhs = exact_approximant(cf, k, n + 1, cap=cap) - exact_approximant(cf, k, n, cap=cap)

    _, b_tilde_k, _ = _companion_parts(seq, k)
    _, _, d_tilde_top = _companion_parts(seq, n + 1)
    det_prod = Fraction(1)
    for j in range(k + 1, n + 1):
        _, b_t, d_t = _companion_parts(seq, j)
        det_prod *= -b_t * d_t
    rhs = (-b_tilde_k * d_tilde_top * det_prod
           / (exact_y(seq, k, n, cap=cap) * exact_y(seq, k, n + 1, cap=cap)))
    return lhs, rhs
