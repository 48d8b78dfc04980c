"""Continued-fraction evaluation: approximants, tails, certified truncation.

The objects here are coefficient streams (alpha_k, beta_k), k >= 1, whose
value at level k is

    xi_k = beta_k / (alpha_k + beta_{k+1} / (alpha_{k+1} + ...))

Approximants xi_{k,n} truncate the stream at level n.  For streams whose
coefficients converge (limit-periodic case) the tails xi_k converge to a
root of x*(alpha + x) = beta, and the backward recurrence contracts toward
the true tail at an asymptotic rate |xi / (alpha + xi)|.  Tail evaluation
exploits this: seed the recurrence at a finite depth N with the limit value,
run it down to k, and certify the truncation error by a contraction bound
C * rate^(N - k).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from numbers import Rational
from typing import Callable, Iterable, Optional, Tuple

from .errors import (
    ConvergenceError,
    DomainError,
    NonContractiveError,
    SingularApproximantError,
)
from .mat2 import Scalar

# Indices inspected when hedging the contraction rate empirically.
CONTRACTION_WINDOW = 32
# Safety factor applied to the limit contraction rate; covers pre-asymptotic
# indices where per-step contraction can exceed the limit rate.
RATE_INFLATION = 1.05
DEFAULT_DEPTH_CAP = 10 ** 6
# Below this magnitude a float denominator alpha_j + t counts as singular.
DENOM_FLOOR = 1e-300

CoeffPair = Tuple[Scalar, Scalar]


def _effective_depth_cap(explicit: Optional[int]) -> int:
    if explicit is not None:
        if explicit < 1:
            raise ValueError(f"depth cap must be >= 1, got {explicit}")
        return explicit
    env = os.environ.get("CFMP_DEPTH_CAP")
    if env is not None and env.strip():
        try:
            cap = int(env)
        except ValueError:
            raise ValueError(f"CFMP_DEPTH_CAP must be an integer, got {env!r}") from None
        if cap < 1:
            raise ValueError(f"CFMP_DEPTH_CAP must be >= 1, got {cap}")
        return cap
    return DEFAULT_DEPTH_CAP


def _singular(den: Scalar) -> bool:
    if isinstance(den, Rational):
        return den == 0
    return abs(den) < DENOM_FLOOR


@dataclass(frozen=True)
class CFCoeffs:
    """Coefficient stream k -> (alpha_k, beta_k) with declared limits.

    The accessor must be deterministic; repeated reads at one index return
    identical values.  The declared limits are used for tail seeding and
    contraction-rate estimates.
    """

    at: Callable[[int], CoeffPair]
    alpha: Scalar
    beta: Scalar

    @staticmethod
    def constant(alpha: Scalar, beta: Scalar) -> "CFCoeffs":
        return CFCoeffs(at=lambda k: (alpha, beta), alpha=alpha, beta=beta)

    @staticmethod
    def from_table(pairs: Iterable[CoeffPair], alpha: Scalar | None = None,
                   beta: Scalar | None = None) -> "CFCoeffs":
        """Finite table for k = 1..len(pairs), the declared limits beyond.

        Limits default to the last table row.
        """
        table = tuple(tuple(p) for p in pairs)
        if not table:
            raise ValueError("coefficient table must be nonempty")
        if alpha is None:
            alpha = table[-1][0]
        if beta is None:
            beta = table[-1][1]
        limits = (alpha, beta)

        def at(k: int) -> CoeffPair:
            return table[k - 1] if k <= len(table) else limits

        return CFCoeffs(at=at, alpha=alpha, beta=beta)


@dataclass(frozen=True)
class TailEstimate:
    """Tail value with certified error err_bound.

    err_bound = max(C * rate^(depth - k), rounding floor): the first term
    bounds the truncation of the infinite fraction at the recorded depth,
    the floor accounts for the stationary rounding error of the float
    recurrence (a few ulps, amplified by 1/(1 - rate)).  A bound below the
    floor would claim more accuracy than binary64 evaluation can deliver.
    """

    value: float
    err_bound: float
    depth: int
    rate: float


def approximant(cf: CFCoeffs, k: int, n: int) -> Scalar:
    """Finite truncation xi_{k,n}, backward recurrence from level n down to k.

    Field-generic: rational coefficient streams are evaluated exactly.
    """
    if k < 1:
        raise ValueError(f"level k must be >= 1, got {k}")
    if n < k:
        raise ValueError(f"approximant needs n >= k, got k={k}, n={n}")
    t: Scalar = 0
    for j in range(n, k - 1, -1):
        alpha_j, beta_j = cf.at(j)
        den = alpha_j + t
        if _singular(den):
            raise SingularApproximantError(
                f"zero denominator in backward recurrence at level {j}", step=j)
        t = beta_j / den
    return t


def limit_tail(alpha: Scalar, beta: Scalar) -> float:
    """Tail of the constant-coefficient fraction: (alpha/2)*(sqrt(1+4*beta/alpha^2)-1).

    This form selects the correct root of x*(alpha+x) = beta for either sign
    of alpha (both occur, depending on the sign of the coefficient limits).
    """
    a = float(alpha)
    b = float(beta)
    if a == 0.0:
        if b < 0.0:
            raise DomainError("tail fixed point is complex: alpha = 0 and beta < 0")
        return math.sqrt(b)
    rad = 1.0 + 4.0 * b / (a * a)
    if rad < 0.0:
        if rad > -1e-13:
            rad = 0.0
        else:
            raise DomainError(
                f"tail fixed point is complex: alpha^2 + 4*beta < 0 "
                f"(alpha={a!r}, beta={b!r})")
    return (a / 2.0) * (math.sqrt(rad) - 1.0)


def seidel_stern_check(cf: CFCoeffs, k_lo: int, k_hi: int) -> Optional[float]:
    """Smallest C >= 1 with 1/C <= beta_k/alpha_k <= C over [k_lo, k_hi].

    Returns None if some ratio is <= 0 (or a quotient is singular), in which
    case the positive-fraction convergence criterion does not apply.
    """
    if k_hi < k_lo:
        raise ValueError(f"need k_lo <= k_hi, got {k_lo}..{k_hi}")
    worst = 1.0
    for k in range(k_lo, k_hi + 1):
        alpha_k, beta_k = cf.at(k)
        if _singular(alpha_k):
            return None
        ratio = float(beta_k) / float(alpha_k)
        if ratio <= 0.0:
            return None
        worst = max(worst, ratio, 1.0 / ratio)
    return worst


def contraction_rate(cf: CFCoeffs, k_lo: int = 1,
                     window: int = CONTRACTION_WINDOW) -> float:
    """Certified-use contraction rate r with 0 < r < 1.

    r = max(RATE_INFLATION * |xi/(alpha+xi)| at the declared limits,
            max realized one-step factor |beta_j| / (alpha_j + t)^2 over
            j in [k_lo, k_lo+window), measured on a probe pass seeded with
            the limit tail).

    Raises NonContractiveError when the result is >= 1; certification is
    impossible in that regime (spectral gap too small at the limit).
    """
    xi = limit_tail(cf.alpha, cf.beta)
    den_limit = float(cf.alpha) + xi
    if _singular(den_limit):
        raise NonContractiveError(
            "degenerate limit: alpha + xi = 0 at the declared limits", rate=math.inf)
    r_limit = abs(xi / den_limit)

    probe_top = k_lo + 2 * window
    t = xi
    r_emp = 0.0
    for j in range(probe_top, k_lo - 1, -1):
        alpha_j, beta_j = cf.at(j)
        den = float(alpha_j) + t
        if _singular(den):
            raise SingularApproximantError(
                f"zero denominator in rate probe at level {j}", step=j)
        t = float(beta_j) / den
        if j < k_lo + window:
            r_emp = max(r_emp, abs(t / den))

    rate = max(RATE_INFLATION * r_limit, r_emp)
    if rate >= 1.0:
        raise NonContractiveError(
            f"contraction rate {rate:.6g} >= 1; tail certification impossible "
            f"(limit rate {r_limit:.6g}, window max {r_emp:.6g})", rate=rate)
    return rate


def _one_step_approximant(cf: CFCoeffs, n: int) -> float:
    alpha_n, beta_n = cf.at(n)
    if _singular(alpha_n):
        raise SingularApproximantError(
            f"zero denominator in backward recurrence at level {n}", step=n)
    return float(beta_n) / float(alpha_n)


def tails_range(cf: CFCoeffs, k_lo: int, k_hi: int, tol: float,
                depth_cap: Optional[int] = None,
                rate: Optional[float] = None) -> list[TailEstimate]:
    """Tails xi_k for k in [k_lo, k_hi], each with certified error <= tol.

    Single backward pass seeded with the limit tail at depth N+1; N is grown
    until C * rate^(N - k_hi) <= tol where C = |seed - xi_{N,N}| is the
    observed seed offset at depth N.  Raises ConvergenceError when no such
    N <= depth cap exists (rate too close to 1, or tol too small).
    """
    if k_lo < 1:
        raise ValueError(f"k_lo must be >= 1, got {k_lo}")
    if k_hi < k_lo:
        raise ValueError(f"need k_lo <= k_hi, got {k_lo}..{k_hi}")
    if not tol > 0:
        raise ValueError(f"tolerance must be > 0, got {tol}")
    cap = _effective_depth_cap(depth_cap)
    r = contraction_rate(cf, k_lo) if rate is None else float(rate)
    if not 0.0 <= r < 1.0:
        raise NonContractiveError(
            f"supplied contraction rate {r!r} outside [0, 1)", rate=r)
    seed = limit_tail(cf.alpha, cf.beta)

    n_depth = min(cap, k_hi + CONTRACTION_WINDOW)
    c_const = abs(seed - _one_step_approximant(cf, n_depth))
    for _ in range(200):
        if c_const * r ** (n_depth - k_hi) <= tol:
            break
        if n_depth >= cap:
            raise ConvergenceError(
                f"tolerance {tol:g} not certifiable within depth cap {cap} "
                f"(rate {r:.6g}, residual bound "
                f"{c_const * r ** (n_depth - k_hi):.3g})",
                err_bound=c_const * r ** (n_depth - k_hi), depth=n_depth)
        if r == 0.0:
            n_depth = min(cap, n_depth + 1)
        else:
            needed = k_hi + math.ceil(math.log(c_const / tol) / math.log(1.0 / r))
            n_depth = min(cap, max(needed + 8, n_depth + 8))
        c_const = abs(seed - _one_step_approximant(cf, n_depth))
    else:
        raise ConvergenceError(
            f"depth search did not settle below tolerance {tol:g}",
            err_bound=c_const, depth=n_depth)

    t = seed
    values: dict[int, float] = {}
    for j in range(n_depth, k_lo - 1, -1):
        alpha_j, beta_j = cf.at(j)
        den = float(alpha_j) + t
        if _singular(den):
            raise SingularApproximantError(
                f"zero denominator in backward recurrence at level {j}", step=j)
        t = float(beta_j) / den
        if j <= k_hi:
            values[j] = t

    out = []
    for k in range(k_lo, k_hi + 1):
        value = values[k]
        floor = (4.0 / (1.0 - r)) * math.ulp(abs(value))
        err = max(c_const * r ** (n_depth - k), floor)
        if err > tol:
            raise ConvergenceError(
                f"tolerance {tol:g} below the float rounding floor {floor:.3g} "
                f"at k={k}", value=value, err_bound=err, depth=n_depth)
        out.append(TailEstimate(value=value, err_bound=err, depth=n_depth, rate=r))
    return out


def tail(cf: CFCoeffs, k: int, tol: float, depth_cap: Optional[int] = None,
         rate: Optional[float] = None) -> TailEstimate:
    """Single tail xi_k with certified truncation error <= tol."""
    return tails_range(cf, k, k, tol, depth_cap=depth_cap, rate=rate)[0]
