import math
from fractions import Fraction

import numpy as np
import pytest

from superquad.averages import (accurate_sum, avg_A, avg_B, avg_general,
                                diff_D, diff_Delta, diff_E, diff_H, diff_R)
from superquad.functions import CONVEX, by_spec, catalog, zero_model
from superquad.sequences import Sequence, arithmetic

F2 = by_spec("pow:2")
F1 = by_spec("pow:1")
F3 = by_spec("pow:3")


def brute_avg_A(f, n):
    return math.fsum(f(r / n) for r in range(1, n)) / (n - 1)


def brute_avg_B(f, n):
    return math.fsum(f(r / n) for r in range(0, n + 1)) / (n + 1)


class TestAvgA:
    def test_single_term(self):
        assert avg_A(F2, 2).value == pytest.approx(0.25, abs=1e-15)

    def test_closed_form_small(self):
        # exact oracle: sum of squares
        assert avg_A(F2, 3).value == pytest.approx(float(Fraction(5, 18)), rel=1e-14)

    def test_cube(self):
        assert avg_A(F3, 4).value == pytest.approx((1 + 8 + 27) / (3 * 64), rel=1e-14)

    def test_against_brute_force(self):
        for n in (2, 7, 57, 301):
            assert avg_A(F3, n).value == pytest.approx(brute_avg_A(F3, n), rel=1e-13)

    def test_n_validation(self):
        with pytest.raises(ValueError):
            avg_A(F2, 1)


class TestAvgB:
    def test_n1(self):
        assert avg_B(F2, 1).value == pytest.approx(0.5, abs=1e-15)

    def test_closed_form_small(self):
        assert avg_B(F2, 3).value == pytest.approx(float(Fraction(7, 18)), rel=1e-14)

    def test_linear(self):
        assert avg_B(F1, 2).value == pytest.approx(0.5, abs=1e-15)

    def test_includes_endpoint_value(self):
        # the r = 0 term comes from the model, not an assumed zero
        shifted = by_spec("pnorm:2")  # f(0) = 1
        assert avg_B(shifted, 1).value == pytest.approx((1 + math.sqrt(2)) / 2, rel=1e-14)

    def test_n_validation(self):
        with pytest.raises(ValueError):
            avg_B(F2, 0)


class TestAvgGeneral:
    def test_three_terms(self):
        a = Sequence((1, 2, 3))
        got = avg_general(F2, a, 3.0, 3.0, 3).value
        assert got == pytest.approx(float(Fraction(14, 27)), rel=1e-14)

    def test_single_term_identity(self):
        a = Sequence((7.0,))
        assert avg_general(F3, a, 7.0, 1.0, 1).value == pytest.approx(F3(1.0), abs=1e-15)

    def test_two_terms(self):
        a = Sequence((1, 2))
        assert avg_general(F2, a, 2.0, 2.0, 2).value == pytest.approx(5 / 8, rel=1e-14)

    def test_domain_violation_reports_index(self):
        a = Sequence((1, 2, 5))
        with pytest.raises(ValueError, match=r"a\[3\]"):
            avg_general(F2, a, 2.0, 3.0, 3)

    def test_weight_validation(self):
        with pytest.raises(ValueError):
            avg_general(F2, Sequence((1,)), 1.0, 0.0, 1)


class TestDifferences:
    def test_delta_squares(self):
        a = Sequence((1, 2, 3))
        assert diff_Delta(F2, a, 2) == pytest.approx(float(Fraction(23, 216)), rel=1e-13)

    def test_delta_linear_closed_form(self):
        for n in (2, 3, 10):
            a = arithmetic(1, 1, n + 1)
            expected = (n + 1) / (2 * n) - (n + 2) / (2 * (n + 1))
            assert diff_Delta(F1, a, n) == pytest.approx(expected, rel=1e-13)

    def test_delta_zero_function(self):
        assert diff_Delta(zero_model(), arithmetic(1, 1, 4), 3) == 0.0

    def test_D_reduces_to_delta(self):
        a = Sequence((1, 2, 3))
        assert diff_D(F2, a, a, 2) == pytest.approx(float(Fraction(23, 216)), rel=1e-13)

    def test_E_is_negated_delta(self):
        a = Sequence((1, 2, 3))
        assert diff_E(F2, a, 2) == pytest.approx(-float(Fraction(23, 216)), rel=1e-13)
        for f in (F1, F3):
            for n in (2, 5):
                aa = arithmetic(1, 2, n + 1)
                assert diff_E(f, aa, n) == pytest.approx(-diff_Delta(f, aa, n), abs=1e-15)

    def test_H_reduces_to_D(self):
        a = Sequence((1, 2, 3, 4))
        c = Sequence((1, 3, 7, 15))
        assert diff_H(F2, a, a, c, 3) == pytest.approx(diff_D(F2, a, c, 3), abs=1e-15)

    def test_R_zero_function(self):
        assert diff_R(zero_model(), arithmetic(1, 1, 4), 3) == 0.0

    def test_R_direct(self):
        a = Sequence((1, 2, 3))
        expected = (F2(1 / 3) + F2(2 / 3) + F2(1.0)) / 3 - (F2(1 / 2) + F2(1.0)) / 2
        assert diff_R(F2, a, 2) == pytest.approx(expected, rel=1e-13)


class TestMonotoneAverages:
    def test_convex_catalog_monotone(self):
        # interior average grows, endpoint average shrinks
        for f in catalog():
            if CONVEX not in f.declared_flags:
                continue
            prev_a = avg_A(f, 2).value
            prev_b = avg_B(f, 2).value
            for n in range(3, 60):
                cur_a = avg_A(f, n).value
                cur_b = avg_B(f, n).value
                assert cur_a - prev_a >= -1e-12, (f.name, n)
                assert prev_b - cur_b >= -1e-12, (f.name, n)
                prev_a, prev_b = cur_a, cur_b


class TestConcurrentEvaluation:
    def test_threaded_averages_match_serial(self):
        from concurrent.futures import ThreadPoolExecutor
        ns = list(range(2, 120))
        serial = [avg_A(F2, n).value for n in ns]
        with ThreadPoolExecutor(max_workers=8) as pool:
            threaded = list(pool.map(lambda n: avg_A(F2, n).value, ns))
        assert threaded == serial


class TestAccurateSum:
    def test_order_invariance_small(self):
        rng = np.random.default_rng(3)
        v = rng.uniform(0, 1, 513)
        assert accurate_sum(v) == pytest.approx(accurate_sum(v[::-1]), rel=1e-15)

    def test_order_invariance_chunked(self):
        rng = np.random.default_rng(4)
        v = rng.uniform(0, 1, 9973)
        f, r = accurate_sum(v), accurate_sum(v[::-1].copy())
        assert abs(f - r) <= 1e-12 * abs(f)

    def test_matches_fsum(self):
        v = [0.1] * 10
        assert accurate_sum(v) == math.fsum(v)

    def test_accepts_generators(self):
        assert accurate_sum(x / 10 for x in range(5)) == pytest.approx(1.0, abs=1e-15)
