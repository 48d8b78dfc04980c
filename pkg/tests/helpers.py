"""Draw helpers shared by the randomized tests.

Each test seeds its own ``random.Random``; these functions only encapsulate
the rejection sampling for matrices satisfying the various hypotheses
(nonnegative entries, b > 0, nonzero coefficient gap, validated limit).
"""
from __future__ import annotations

import random
from fractions import Fraction

from cfmp.mat2 import Mat2, validate_limit_matrix
from cfmp.sequences import MatrixSequence, sequence_from_rows

FIB = Mat2(1, 1, 1, 0)
GOLDEN = (1 + 5 ** 0.5) / 2


def rational_entry(rng: random.Random,
                   num_hi: int = 8, den_hi: int = 4) -> Fraction:
    return Fraction(rng.randint(0, num_hi), rng.randint(1, den_hi))


def draw_row(rng: random.Random, gap_sign: int | None = None) -> Mat2:
    """Nonnegative rational matrix with b > 0 and bd != a*theta."""
    while True:
        m = Mat2(*(rational_entry(rng) for _ in range(4)))
        if m.b == 0:
            continue
        gap = m.b * m.d - m.a * m.theta
        if gap == 0:
            continue
        if gap_sign is not None and (gap > 0) != (gap_sign > 0):
            continue
        return m


def draw_limit(rng: random.Random, gap_sign: int | None = None) -> Mat2:
    while True:
        m = draw_row(rng, gap_sign=gap_sign)
        if validate_limit_matrix(m).passed:
            return m


def draw_sequence(rng: random.Random, prefix_len: int = 3,
                  gap_sign: int | None = None) -> MatrixSequence:
    """Eventually constant sequence whose rows all satisfy the hypotheses."""
    rows = [draw_row(rng, gap_sign=gap_sign) for _ in range(prefix_len)]
    lim = draw_limit(rng, gap_sign=gap_sign)
    return sequence_from_rows(rows, lim)
