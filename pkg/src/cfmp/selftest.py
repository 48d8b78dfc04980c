"""Seeded certification battery: float paths against the exact oracle.

Each check prints one line through the supplied writer and returns a
result record.  The random cases use a fixed seed so failures reproduce;
the seed is echoed in the output.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional

from . import oracle
from .asymptotics import cf_from_sequence, phi, psi, ratio_diagnostics
from .contfrac import CFCoeffs, approximant, tails_range
from .mat2 import Mat2, eigenvalues, validate_limit_matrix
from .sequences import MatrixSequence, constant_sequence, sequence_from_rows


@dataclass(frozen=True)
class SelftestResult:
    name: str
    passed: bool
    detail: str


def _random_rational_row(rng: random.Random, need_negative_gap: bool = False) -> Mat2:
    """Random nonnegative rational matrix with b > 0 and a per-index gap."""
    while True:
        entries = [Fraction(rng.randint(0, 8), rng.randint(1, 4)) for _ in range(4)]
        a, b, d, theta = entries
        if b == 0:
            continue
        gap = b * d - a * theta
        if gap == 0:
            continue
        if need_negative_gap and gap >= 0:
            continue
        return Mat2(a, b, d, theta)


def _random_rational_sequence(rng: random.Random, prefix_len: int,
                              need_negative_gap: bool = False) -> MatrixSequence:
    while True:
        limit = _random_rational_row(rng, need_negative_gap)
        if validate_limit_matrix(limit).passed:
            break
    rows = [_random_rational_row(rng, need_negative_gap) for _ in range(prefix_len)]
    rows.append(limit)  # land on the limit so deep indices are consistent
    return sequence_from_rows(rows, limit)


def _fibonacci() -> MatrixSequence:
    return constant_sequence(Mat2(1, 1, 1, 0))


GOLDEN = (1 + math.sqrt(5)) / 2


def run_selftest(seed: int = 20260814,
                 emit: Optional[Callable[[str], None]] = None) -> List[SelftestResult]:
    """Run all certification checks; returns one result per check."""
    results: List[SelftestResult] = []
    rng = random.Random(seed)

    def record(name: str, passed: bool, detail: str) -> None:
        results.append(SelftestResult(name=name, passed=passed, detail=detail))
        if emit is not None:
            emit(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")

    if emit is not None:
        emit(f"seed {seed}")

    fib = _fibonacci()
    value = oracle.exact_product_entry(fib, 0, 20, 1, 1)
    record("fibonacci-product-entry", value == 10946,
           f"20-step top-left product entry {value}, want 10946")

    two = constant_sequence(Mat2(2, 1, 1, 1))
    value = oracle.exact_product_entry(two, 0, 3, 2, 2)
    record("cubed-product-entry", value == 5,
           f"3-step bottom-right product entry {value}, want 5")

    golden_cf = CFCoeffs.constant(Fraction(1), Fraction(1))
    value = oracle.exact_approximant(golden_cf, 1, 5)
    record("golden-approximant", value == Fraction(5, 8),
           f"depth-5 approximant {value}, want 5/8")

    ok = True
    worst = ""
    for case in range(6):
        seq = _random_rational_sequence(rng, prefix_len=6)
        cf = cf_from_sequence(seq)
        for k in range(1, 9):
            direct = cf.at(k)
            via_transform = oracle.exact_coeffs_via_companion(seq, k)
            if (Fraction(direct[0]), Fraction(direct[1])) != via_transform:
                ok = False
                worst = f"case {case} index {k}: {direct} vs {via_transform}"
                break
        if not ok:
            break
    record("coefficient-routes-agree", ok, worst or "direct = transform route, 6 cases x 8 indices")

    ok = True
    worst = ""
    for case in range(6):
        seq = _random_rational_sequence(rng, prefix_len=5)
        cf = cf_from_sequence(seq)
        for k, n in ((1, 4), (2, 7), (3, 9)):
            left = approximant(cf, k, n)
            right = oracle.exact_y(seq, k + 1, n) / oracle.exact_y(seq, k, n)
            if Fraction(left) != right:
                ok = False
                worst = f"case {case} (k={k}, n={n}): {left} vs {right}"
                break
        if not ok:
            break
    record("approximant-equals-y-ratio", ok, worst or "xi_{k,n} = y_{k+1,n}/y_{k,n}, 6 cases")

    ok = True
    worst = ""
    for case in range(6):
        seq = _random_rational_sequence(rng, prefix_len=4)
        for k, n in ((1, 5), (2, 8)):
            lhs, rhs = oracle.reciprocal_product_sides(seq, k, n)
            if lhs != rhs:
                ok = False
                worst = f"case {case} (k={k}, n={n}): {lhs} vs {rhs}"
                break
        if not ok:
            break
    record("reciprocal-product-identity", ok,
           worst or "prod 1/xi_{m,n} = transformed top-left entry, 6 cases")

    ok = True
    worst = ""
    for case in range(4):
        seq = _random_rational_sequence(rng, prefix_len=3, need_negative_gap=True)
        for k, n in ((1, 3), (2, 6)):
            lhs, rhs = oracle.difference_identity_sides(seq, k, n)
            if lhs != rhs:
                ok = False
                worst = f"case {case} (k={k}, n={n}): {lhs} vs {rhs}"
                break
        if not ok:
            break
    record("difference-identity", ok, worst or "approximant steps match the closed form, 4 cases")

    estimates = tails_range(cf_from_sequence(two), 1, 10, 1e-12)
    rho = eigenvalues(two.limit).rho
    worst_dev = max(abs(e.value - 1.0 / rho) for e in estimates)
    threshold = max(1e-10, max(e.err_bound for e in estimates))
    record("constant-tails-match-spectrum", worst_dev <= threshold,
           f"max |xi_k - 1/rho| = {worst_dev:.3g} over k = 1..10")

    # enclosure needs positive coefficients, so certify on the positive-gap
    # sequence rather than on (2,1,1,1)
    fib_cf = cf_from_sequence(fib)
    fib_tails = tails_range(fib_cf, 1, 10, 1e-12)
    certified = all(
        oracle.certify_tail(fib_cf, k, e.value, e.err_bound)
        for k, e in enumerate(fib_tails, start=1))
    record("tails-in-exact-enclosure", certified,
           "float tails inside the alternating exact bracket, k = 1..10")

    diag = ratio_diagnostics(fib, 0, 1, 1, 60, tol=1e-13)
    final = diag.ratios[-1][1]
    target = GOLDEN / math.sqrt(5)
    record("fibonacci-ratio-limit", abs(final - target) <= 1e-10,
           f"60-step normalized entry {final:.12f}, want {target:.12f}")

    tails = tails_range(cf_from_sequence(two), 1, 1, 1e-12)
    psi11 = psi(two, 1, 1, 0, tails[0].value)
    phi11 = phi(two, 1, 1, 0, tails[0].value)
    phi12 = phi(two, 1, 2, 0, tails[0].value)
    lim = two.limit
    residual = abs(psi11 - (phi11 - float(lim.theta) / float(lim.b) * phi12))
    record("target-consistency", residual <= 1e-10,
           f"|psi_11 - (phi_11 - (theta/b) phi_12)| = {residual:.3g}")

    return results
