import math
from itertools import product

import pytest

from cubicrauzy.algebra import FamilyParam, roots
from cubicrauzy.numeration import (
    DigitWord,
    PeriodicWord,
    admissible_count,
    d_one,
    enumerate_admissible,
    eval_word,
    greedy_expand,
    is_admissible,
    periodic_is_admissible,
)

P3 = FamilyParam(3)
P4 = FamilyParam(4)


def brute_force_admissible(param, n):
    """Filter the full digit cube through is_admissible."""
    a = param.a
    return [w for w in product(range(a), repeat=n) if is_admissible(DigitWord(2, w), param)]


class TestIsAdmissible:
    def test_forbidden_window_exact_equality(self):
        # ascending digits 1,0,2,2 contain the backward window (2,2,0,1)
        assert not is_admissible(DigitWord(2, (1, 0, 2, 2)), P3)

    def test_all_zero(self):
        assert is_admissible(DigitWord(2, (0,) * 6), P3)

    def test_window_just_below_bound(self):
        # backward window (2,2,0,0) < (2,2,0,1)
        assert is_admissible(DigitWord(2, (0, 0, 2, 2)), P3)

    def test_digit_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            is_admissible(DigitWord(2, (3,)), P3)

    def test_truncation_preserves_admissibility(self):
        for w in enumerate_admissible(P3, 6):
            for m in range(1, 6):
                assert is_admissible(DigitWord(2, w.digits[:m]), P3)

    def test_periodic_stream(self):
        t = 2
        assert periodic_is_admissible(PeriodicWord(2, (), (t, t, 0, 0)), P3)
        assert not periodic_is_admissible(PeriodicWord(2, (1,), (0, 2, 2)), P3)


class TestGreedyExpand:
    def test_expansion_of_one_a3(self):
        e = roots(P3)
        w = greedy_expand(1, e, 12)
        leading = [w.digit(-i) for i in range(1, 13)]
        assert leading == [2, 2, 0, 1] + [0] * 8

    def test_expansion_of_one_a5(self):
        e = roots(FamilyParam(5))
        w = greedy_expand(1, e, 10)
        assert [w.digit(-i) for i in range(1, 11)] == [4, 4, 0, 1] + [0] * 6

    def test_beta_inverse(self):
        # 1/beta passed exactly as its (1, beta, beta^2) coefficient triple
        e = roots(P3)
        w = greedy_expand((1, -3, 1), e, 8)
        assert [w.digit(-i) for i in range(1, 9)] == [1, 0, 0, 0, 0, 0, 0, 0]

    def test_remainder_bound(self):
        e = roots(P3)
        for x in (0.3, 0.72, 0.999):
            n = 20
            w = greedy_expand(x, e, n)
            partial = sum(w.digit(-i) * e.beta ** -i for i in range(1, n + 1))
            assert abs(x - partial) < e.beta ** -n

    def test_output_is_admissible_below_one(self):
        e = roots(P3)
        for x in (0.5, 0.123456, 0.87, 0.9999, 0.36):
            assert is_admissible(greedy_expand(x, e, 25), P3)

    def test_expansion_of_one_is_the_excluded_word(self):
        # admissibility is strict inequality against the expansion of 1, so
        # that expansion itself is the unique greedy output that fails it
        e = roots(P3)
        w = greedy_expand(1, e, 10)
        assert not is_admissible(w, P3)
        head = tuple(w.digit(-i) for i in range(1, 5))
        assert head == d_one(3, -1).preperiod

    def test_domain(self):
        e = roots(P3)
        with pytest.raises(ValueError):
            greedy_expand(0, e, 5)
        with pytest.raises(ValueError):
            greedy_expand(1.5, e, 5)


class TestClassifier:
    def test_row_b_minus_one(self):
        for a in (3, 5, 9):
            row = d_one(a, -1)
            assert row.preperiod == (a - 1, a - 1, 0, 1)
            assert row.is_finite

    def test_row_middle(self):
        row = d_one(5, 2)
        assert row.preperiod == (5, 2, 1)
        assert row.is_finite

    def test_row_top(self):
        row = d_one(4, 5)
        assert row.preperiod == (5, 0, 0, 4, 1)

    def test_row_periodic(self):
        row = d_one(5, -3)
        assert row.preperiod == (4, 1)
        assert row.period == (2,)

    def test_range_errors(self):
        with pytest.raises(ValueError):
            d_one(3, 5)
        with pytest.raises(ValueError):
            d_one(3, -3)
        with pytest.raises(ValueError):
            d_one(-1, 0)


class TestEnumeration:
    def test_single_digits(self):
        words = list(enumerate_admissible(P3, 1))
        assert [w.digits for w in words] == [(0,), (1,), (2,)]

    def test_against_brute_force(self):
        for param in (P3, P4):
            for n in range(1, 7):
                fast = [w.digits for w in enumerate_admissible(param, n)]
                assert fast == brute_force_admissible(param, n)
                assert len(fast) == admissible_count(param, n)

    def test_count_example_n4(self):
        assert admissible_count(P3, 4) == len(brute_force_admissible(P3, 4))

    def test_growth_ratio_approaches_beta(self):
        e = roots(P3)
        ratio = admissible_count(P3, 21) / admissible_count(P3, 20)
        assert math.isclose(ratio, e.beta, rel_tol=1e-4)

    def test_no_duplicates(self):
        words = [w.digits for w in enumerate_admissible(P3, 6)]
        assert len(words) == len(set(words))


class TestEvalWord:
    def test_zero_word(self):
        e = roots(P3)
        assert eval_word(DigitWord(2, (0, 0, 0)), e) == 0j

    def test_single_digit(self):
        e = roots(P3)
        z = eval_word(DigitWord(2, (1,)), e)
        assert z == pytest.approx(e.alpha ** 2)

    def test_matches_exact_algebra(self):
        from cubicrauzy.algebra import AlgNum, alpha_power, embed

        e = roots(P3)
        z = eval_word(DigitWord(2, (2, 2)), e)
        exact = alpha_power(2, P3) * 2 + alpha_power(3, P3) * 2
        assert z == pytest.approx(embed(exact, e), abs=1e-13)

    def test_negative_start(self):
        e = roots(P3)
        z = eval_word(DigitWord(-2, (1, 0, 2)), e)
        want = e.alpha ** -2 + 2 * e.alpha ** 0
        assert z == pytest.approx(want, abs=1e-12)
