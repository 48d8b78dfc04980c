"""Asymptotic constants, scaled products, and structural identities."""
import math
import random
from fractions import Fraction

import pytest

from cfmp.asymptotics import (
    ScaledEntry,
    cf_from_sequence,
    m_to_a_entry_identity,
    phi,
    product_entry,
    psi,
    ratio_diagnostics,
    sigma,
    spectral_radius_ratio,
)
from cfmp.contfrac import tails_range
from cfmp.errors import (
    ConvergenceError,
    DegenerateSpectrumError,
    DomainError,
    NonContractiveError,
)
from cfmp.mat2 import Mat2, eigenvalues
from cfmp.sequences import constant_sequence, sequence_from_rows
from cfmp import oracle
from helpers import FIB, GOLDEN, draw_limit, draw_row, draw_sequence

SQRT5 = math.sqrt(5)


def fib_numbers(count):
    f = [0, 1]
    while len(f) <= count:
        f.append(f[-1] + f[-2])
    return f


class TestCoefficients:
    def test_fibonacci_is_unit_stream(self):
        cf = cf_from_sequence(constant_sequence(FIB))
        assert cf.at(1) == (1, 1)
        assert cf.at(17) == (1, 1)
        assert (cf.alpha, cf.beta) == (1, 1)

    def test_exact_fractions(self):
        m = Mat2(Fraction(1), Fraction(2), Fraction(3), Fraction(4))
        cf = cf_from_sequence(constant_sequence(m))
        gap = Fraction(2 * 3 - 1 * 4)
        assert cf.at(1) == (Fraction(5) / gap, Fraction(1) / gap)
        assert (cf.alpha, cf.beta) == (Fraction(5) / gap, Fraction(1) / gap)

    def test_direct_route_matches_companion_route(self):
        rng = random.Random(31)
        for _ in range(50):
            seq = draw_sequence(rng)
            cf = cf_from_sequence(seq)
            for k in range(1, 8):
                assert cf.at(k) == oracle.exact_coeffs_via_companion(seq, k)


class TestPsiPhi:
    def test_fibonacci_targets(self):
        seq = constant_sequence(FIB)
        xi = 1 / GOLDEN
        assert psi(seq, 1, 1, 0, xi) == pytest.approx(GOLDEN / SQRT5, rel=1e-14)
        assert psi(seq, 1, 2, 0, xi) == pytest.approx(1 / SQRT5, rel=1e-14)
        assert psi(seq, 2, 1, 0, xi) == pytest.approx(1 / SQRT5, rel=1e-14)
        assert psi(seq, 2, 2, 0, xi) == pytest.approx(1 / (SQRT5 * GOLDEN),
                                                      rel=1e-14)

    def test_rows_are_proportional(self):
        # psi(2,j) = psi(1,j) * f(k): the column ratio is row-independent
        rng = random.Random(32)
        for _ in range(30):
            seq = draw_sequence(rng)
            cf = cf_from_sequence(seq)
            try:
                xi = tails_range(cf, 1, 1, 1e-11)[0].value
            except (NonContractiveError, ConvergenceError, DomainError):
                continue  # certification honestly impossible for this draw
            p11 = psi(seq, 1, 1, 0, xi)
            p12 = psi(seq, 1, 2, 0, xi)
            p21 = psi(seq, 2, 1, 0, xi)
            p22 = psi(seq, 2, 2, 0, xi)
            if abs(p12) < 1e-12 or abs(p22) < 1e-12:
                continue
            assert p21 / p22 == pytest.approx(p11 / p12, rel=1e-9)

    def test_psi_phi_consistency(self):
        # first-row link: psi(1,1) = phi(1,1) - (theta/b) phi(1,2)
        rng = random.Random(33)
        for _ in range(30):
            seq = draw_sequence(rng)
            cf = cf_from_sequence(seq)
            try:
                xi = tails_range(cf, 1, 1, 1e-11)[0].value
            except (NonContractiveError, ConvergenceError, DomainError):
                continue
            lim = seq.limit
            lhs = psi(seq, 1, 1, 0, xi)
            rhs = (phi(seq, 1, 1, 0, xi)
                   - float(lim.theta) / float(lim.b) * phi(seq, 1, 2, 0, xi))
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)

    def test_second_row_target_matches_measured_limit(self):
        # dual route: the (2,1) and (2,2) products must converge to psi(2,j)
        seq = constant_sequence(Mat2(1, 2, 3, 4))
        for i in (1, 2):
            for j in (1, 2):
                diag = ratio_diagnostics(seq, 0, i, j, 40)
                assert diag.sup_dev <= 1e-9, (i, j, diag.sup_dev)

    def test_index_validation(self):
        seq = constant_sequence(FIB)
        with pytest.raises(ValueError):
            psi(seq, 3, 1, 0, 0.5)
        with pytest.raises(ValueError):
            phi(seq, 1, 0, 0, 0.5)


class TestScaledEntry:
    def test_zero(self):
        z = ScaledEntry.from_float(0.0)
        assert z.sign() == 0
        assert z.to_float() == 0.0
        assert z.to_fraction() == 0

    def test_normalization_and_round_trip(self):
        x = ScaledEntry.from_float(-3.0, 4)
        assert x.sign() == -1
        assert x.to_fraction() == -48
        assert x.to_float() == -48.0
        assert 1 <= abs(x.mantissa) < 2
        assert x.log2_abs() == pytest.approx(math.log2(48), rel=1e-15)

    def test_times_renormalizes(self):
        x = ScaledEntry.from_float(1.5)
        y = x.times(1e300).times(1e300)  # would overflow a bare float
        assert 1 <= abs(y.mantissa) < 2
        assert y.log2_abs() == pytest.approx(
            math.log2(1.5) + 2 * math.log2(1e300), rel=1e-12)

    def test_beyond_float_range_reports_inf(self):
        x = ScaledEntry.from_float(1.0, 5000)
        assert x.to_float() == math.inf
        assert x.to_fraction() == Fraction(2) ** 5000


class TestProductEntry:
    def test_fibonacci_entries_exact(self):
        seq = constant_sequence(FIB)
        f = fib_numbers(32)
        for n in (1, 2, 5, 20, 30):
            assert product_entry(seq, 0, n, 1, 1).to_fraction() == f[n + 1]
            assert product_entry(seq, 0, n, 1, 2).to_fraction() == f[n]
            assert product_entry(seq, 0, n, 2, 1).to_fraction() == f[n]
            assert product_entry(seq, 0, n, 2, 2).to_fraction() == f[n - 1]

    def test_fibonacci_large_n(self):
        seq = constant_sequence(FIB)
        f = fib_numbers(92)
        x = product_entry(seq, 0, 90, 1, 1)
        assert x.log2_abs() == pytest.approx(math.log2(f[91]), abs=1e-12)

    def test_overflow_regime(self):
        seq = constant_sequence(FIB)
        x = product_entry(seq, 0, 3000, 1, 1)
        assert x.to_float() == math.inf
        expected = 3001 * math.log2(GOLDEN) - math.log2(5) / 2
        assert x.log2_abs() == pytest.approx(expected, rel=1e-9)

    def test_matches_exact_oracle(self):
        rng = random.Random(34)
        for _ in range(25):
            seq = draw_sequence(rng)
            for n in (1, 3, 7):
                for i in (1, 2):
                    for j in (1, 2):
                        got = product_entry(seq, 1, n, i, j)
                        want = oracle.exact_product_entry(seq, 1, n, i, j)
                        if want == 0:
                            assert got.sign() == 0
                        else:
                            rel = abs(got.to_fraction() / want - 1)
                            assert rel <= Fraction(1, 10 ** 12)

    def test_offset_start(self):
        rows = [Mat2(9, 1, 1, 0)] + [FIB] * 3
        seq = sequence_from_rows(rows, FIB)
        # k = 1 skips the first row
        assert product_entry(seq, 1, 2, 1, 1).to_fraction() == 2  # F_3


class TestRatioDiagnostics:
    def test_fibonacci_trace(self):
        seq = constant_sequence(FIB)
        diag = ratio_diagnostics(seq, 0, 1, 1, 60)
        assert diag.k == 0 and diag.i == 1 and diag.j == 1
        assert len(diag.ratios) == 60
        assert diag.target == pytest.approx(GOLDEN / SQRT5, rel=1e-13)
        assert diag.sup_dev <= 1e-10
        assert diag.tail_err_bound >= 0
        # trace values are F_{n+1}/phi^n
        f = fib_numbers(61)
        n5, pi5 = diag.ratios[4]
        assert n5 == 5
        assert pi5 == pytest.approx(f[6] / GOLDEN ** 5, rel=1e-12)

    def test_sup_dev_over_settled_part(self):
        seq = constant_sequence(FIB)
        diag = ratio_diagnostics(seq, 0, 1, 1, 40)
        last_quarter = [abs(p - diag.target) for n, p in diag.ratios[30:]]
        assert diag.sup_dev == pytest.approx(max(last_quarter), rel=1e-12)


class TestSigma:
    def test_index_zero_is_zero(self):
        assert sigma(FIB, 0) == 0.0

    def test_fibonacci_log_growth(self):
        assert sigma(FIB, 1) == pytest.approx(math.log(GOLDEN), rel=1e-14)

    def test_matches_direct_formula(self):
        # log(rho^i (rho - rho1) / (rho^(i+1) - rho1^(i+1))), computed naively
        rng = random.Random(35)
        for _ in range(40):
            m = draw_limit(rng)
            eig = eigenvalues(m)
            if not eig.rho > abs(eig.rho1):
                continue
            for i in (0, 1, 3, 8):
                naive = math.log(eig.rho ** i * (eig.rho - eig.rho1)
                                 / (eig.rho ** (i + 1) - eig.rho1 ** (i + 1)))
                assert sigma(m, i) == pytest.approx(naive, rel=1e-10,
                                                    abs=1e-13)

    def test_limit_value(self):
        eig = eigenvalues(FIB)
        q = eig.rho1 / eig.rho
        assert sigma(FIB, 200) == pytest.approx(math.log1p(-q), rel=1e-14)

    def test_degenerate_spectrum_rejected(self):
        with pytest.raises(DegenerateSpectrumError):
            sigma(Mat2(0, 1, 1, 0), 3)   # rho = 1 = |rho1|

    def test_negative_index_rejected(self):
        with pytest.raises(ValueError):
            sigma(FIB, -1)


class TestEntryIdentity:
    def test_exact_on_rationals(self):
        rng = random.Random(36)
        for _ in range(40):
            seq = draw_sequence(rng)
            for i in (1, 2):
                for n in (1, 2, 5):
                    lhs, rhs = m_to_a_entry_identity(seq, 0, n, i)
                    assert lhs == rhs

    def test_fibonacci_values(self):
        seq = constant_sequence(FIB)
        f = fib_numbers(12)
        for n in (1, 3, 6):
            lhs, rhs = m_to_a_entry_identity(seq, 0, n, 1)
            assert lhs == f[n + 1] == rhs
            lhs2, rhs2 = m_to_a_entry_identity(seq, 0, n, 2)
            assert lhs2 == f[n] == rhs2


class TestSpectralRadiusRatio:
    def test_equals_tail_normalization_for_constant(self):
        # constant sequences: per-index rho normalization == tail normalization
        seq = constant_sequence(FIB)
        series = spectral_radius_ratio(seq, 0, 30, 1, 1)
        diag = ratio_diagnostics(seq, 0, 1, 1, 30)
        assert len(series) == 30
        for (n1, s), (n2, p) in zip(series, diag.ratios):
            assert n1 == n2
            assert s == pytest.approx(p, rel=1e-11)

    def test_zero_spectral_radius_rejected(self):
        rows = [Mat2(0, 1, 0, 0)] * 2   # nilpotent: rho = 0
        seq = sequence_from_rows(rows, FIB)
        with pytest.raises(DomainError):
            spectral_radius_ratio(seq, 0, 2, 1, 1)
