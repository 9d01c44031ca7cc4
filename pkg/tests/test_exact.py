import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from cstrigger.association import ContingencyTable as T
from cstrigger.exact import (
    evaluate_table,
    fisher_exact_log_p,
    fisher_exact_two_sided,
    log_hypergeometric_pmf,
    log_hypergeometric_support,
    relative_switching_propensity,
)
from oracles import fisher_bruteforce, hypergeom_exact

cells = st.integers(0, 15)


class TestLogHypergeometricPmf:
    def test_hand_value(self):
        # C(2,1) C(2,1) / C(4,2) = 4/6
        assert log_hypergeometric_pmf(1, 2, 2, 4) == pytest.approx(math.log(2 / 3), abs=1e-15)

    def test_degenerate_margin(self):
        assert log_hypergeometric_pmf(0, 0, 7, 20) == 0.0
        assert log_hypergeometric_pmf(0, 5, 0, 20) == 0.0
        assert log_hypergeometric_pmf(0, 0, 0, 0) == 0.0

    @pytest.mark.parametrize("k", [-1, 1, 4])
    def test_out_of_support(self, k):
        # margins (3, 4, 5): support is 2..3
        with pytest.raises(ValueError):
            log_hypergeometric_pmf(k, 3, 4, 5)

    def test_bad_margins(self):
        with pytest.raises(ValueError):
            log_hypergeometric_pmf(0, 6, 2, 5)

    @given(st.integers(1, 80).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(0, n))))
    @settings(max_examples=200)
    def test_against_exact_rationals(self, margins):
        n, r1, c1 = margins
        lo, hi = max(0, r1 + c1 - n), min(r1, c1)
        for k in range(lo, hi + 1):
            exact = float(hypergeom_exact(k, r1, c1, n))
            assert math.exp(log_hypergeometric_pmf(k, r1, c1, n)) == pytest.approx(exact, rel=1e-12)

    def test_vectorised_matches_scalar(self):
        rng = random.Random(11)
        for _ in range(40):
            n = rng.randint(1, 5000)
            r1, c1 = rng.randint(0, n), rng.randint(0, n)
            lo, logp = log_hypergeometric_support(r1, c1, n)
            for i in range(0, len(logp), max(1, len(logp) // 7)):
                assert logp[i] == pytest.approx(log_hypergeometric_pmf(lo + i, r1, c1, n), rel=1e-12, abs=1e-12)

    def test_normalisation_up_to_a_million(self):
        rng = random.Random(5)
        margins = [(10**6, 400_000, 300_000), (10**6, 500_000, 500_000), (10**6, 1000, 2000), (10**6, 1, 999_999)]
        margins += [(n, rng.randint(0, n), rng.randint(0, n)) for n in (rng.randint(10, 10**6) for _ in range(12))]
        for n, r1, c1 in margins:
            _, logp = log_hypergeometric_support(r1, c1, n)
            assert math.fsum(np.exp(logp).tolist()) == pytest.approx(1.0, abs=1e-12), (n, r1, c1)


class TestFisher:
    def test_reference_table(self):
        p = fisher_exact_two_sided(T(216, 17515, 659, 143299))
        assert abs(math.log10(p) - math.log10(2.2e-30)) <= 0.31

    def test_balanced(self):
        assert fisher_exact_two_sided(T(5, 5, 5, 5)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("t", [T(0, 0, 3, 4), T(0, 3, 0, 4), T(2, 3, 0, 0), T(0, 0, 0, 0), T(7, 0, 0, 0)])
    def test_zero_margin(self, t):
        assert fisher_exact_two_sided(t) == 1.0

    def test_negative_cell(self):
        with pytest.raises(ValueError):
            fisher_exact_two_sided(T(-1, 2, 3, 4))

    @given(cells, cells, cells, cells)
    @settings(max_examples=300)
    def test_bruteforce(self, a, b, c, d):
        assert fisher_exact_two_sided(T(a, b, c, d)) == pytest.approx(fisher_bruteforce(a, b, c, d), abs=1e-10)

    @given(cells, cells, cells, cells)
    def test_symmetries(self, a, b, c, d):
        p = fisher_exact_two_sided(T(a, b, c, d))
        for other in (T(a, c, b, d), T(b, a, d, c), T(c, d, a, b), T(d, c, b, a)):
            assert fisher_exact_two_sided(other) == pytest.approx(p, rel=1e-9, abs=1e-14)
        assert 0 < p <= 1

    @given(st.integers(0, 400), st.integers(0, 4000), st.integers(0, 400), st.integers(0, 4000))
    @settings(max_examples=100)
    def test_agrees_with_scipy(self, a, b, c, d):
        ref = sps.fisher_exact([[a, b], [c, d]]).pvalue
        assert fisher_exact_two_sided(T(a, b, c, d)) == pytest.approx(ref, rel=1e-6, abs=1e-300)

    def test_log_p_survives_underflow(self):
        t = T(20000, 1000, 1000, 20000)
        assert fisher_exact_two_sided(t) == 0.0
        assert -math.inf < fisher_exact_log_p(t) < -700


class TestRelativeSwitchingPropensity:
    def test_reference_table(self):
        assert relative_switching_propensity(T(216, 17515, 659, 143299)) == pytest.approx(2.266, abs=1e-3)

    @given(st.integers(1, 1000), st.integers(1, 1000))
    def test_equal_rates(self, x, y):
        assert relative_switching_propensity(T(x, y, x, y)) == pytest.approx(1.0)

    def test_hand_value(self):
        assert relative_switching_propensity(T(3, 1, 7, 9)) == pytest.approx(3.0)

    @pytest.mark.parametrize("t", [T(0, 4, 0, 5), T(3, 0, 4, 0), T(3, 0, 4, 9)])
    def test_undefined(self, t):
        assert relative_switching_propensity(t) is None

    @given(cells, st.integers(1, 15), cells, cells)
    def test_direction_of_effect(self, a, b, c, d):
        rsp = relative_switching_propensity(T(a, b, c, d))
        if a + c == 0:
            assert rsp is None
            return
        shared_rate, nonshared_rate = a / (a + c), b / (b + d)
        assert (rsp > 1) == (shared_rate > nonshared_rate)


def test_evaluate_table_fields():
    r = evaluate_table(T(216, 17515, 659, 143299))
    assert r.shared_rate == pytest.approx(0.247, abs=5e-4)
    assert r.nonshared_rate == pytest.approx(0.109, abs=5e-4)
    assert r.significant()
    empty = evaluate_table(T(0, 3, 0, 5))
    assert empty.shared_rate is None and empty.rsp is None and empty.p_value == 1.0
