"""Exponent algebra tests.

Root values are cross-checked against a brute-force bisection oracle
that knows nothing about the closed forms, plus a handful of frozen
values derived from that oracle.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memwave.errors import DomainError
from memwave.exponents import (
    BlowupVerdict,
    ModelParams,
    Regime,
    Verdict,
    classify,
    fujita_exponent,
    iteration_bound,
    memory_fujita_exponent,
    memory_strauss_exponent,
    region_grid,
    shifted_exponents,
    sobolev_cap,
    strauss_exponent,
    testfn_bound,
)


def bisect_positive_root(a, b, c, lo=1.0, hi=1e6, tol=1e-13):
    """Oracle: positive root of a*x^2 - b*x - c by plain bisection."""
    f = lambda x: a * x * x - b * x - c
    assert f(lo) < 0 < f(hi)
    while hi - lo > tol * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestClosedForms:
    def test_fujita_values(self):
        assert fujita_exponent(1) == 3.0
        assert fujita_exponent(2) == 2.0
        assert fujita_exponent(4) == 1.5

    def test_strauss_against_bisection(self):
        for n_eff in (2.0, 3.0, 5.0, 10.0, 3.7):
            want = bisect_positive_root(n_eff - 1, n_eff + 1, 2.0)
            assert strauss_exponent(n_eff) == pytest.approx(want, rel=1e-12)

    def test_strauss_frozen(self):
        assert strauss_exponent(3) == pytest.approx(1.0 + math.sqrt(2.0), rel=1e-15)
        assert strauss_exponent(2) == pytest.approx((3.0 + math.sqrt(17.0)) / 2.0, rel=1e-15)
        assert strauss_exponent(1) == math.inf

    def test_memory_strauss_frozen(self):
        assert memory_strauss_exponent(5, 0.5) == pytest.approx(2.0, rel=1e-14)
        assert memory_strauss_exponent(3, 0.5) == pytest.approx(
            (5.0 + math.sqrt(41.0)) / 4.0, rel=1e-15
        )
        assert memory_strauss_exponent(1, 0.3) == math.inf

    def test_memory_strauss_against_bisection(self):
        for n_eff in (1.5, 2.0, 3.0, 6.0):
            for gamma in (0.1, 0.5, 0.9):
                want = bisect_positive_root(n_eff - 1, n_eff + 3 - 2 * gamma, 2.0)
                assert memory_strauss_exponent(n_eff, gamma) == pytest.approx(want, rel=1e-12)

    def test_memory_fujita(self):
        assert memory_fujita_exponent(1, 0.5) == math.inf
        assert memory_fujita_exponent(3, 0.5) == pytest.approx(2.5, rel=1e-15)
        # gamma -> 1 recovers the Fujita exponent
        assert memory_fujita_exponent(4, 1 - 1e-9) == pytest.approx(1.5, abs=1e-8)

    def test_domain_guards(self):
        with pytest.raises(DomainError):
            strauss_exponent(0.5)
        with pytest.raises(DomainError):
            memory_strauss_exponent(3, 1.0)
        with pytest.raises(DomainError):
            memory_fujita_exponent(0, 0.5)
        with pytest.raises(DomainError):
            ModelParams(2, 0.0, 0.5, 2.0)
        with pytest.raises(DomainError):
            ModelParams(2, 1.0, 0.5, 1.0)


@settings(max_examples=300, deadline=None)
@given(
    n_eff=st.floats(min_value=1.01, max_value=50.0),
    gamma=st.floats(min_value=1e-6, max_value=1.0, exclude_max=True),
)
def test_memory_strauss_quadratic_residual(n_eff, gamma):
    p0 = memory_strauss_exponent(n_eff, gamma)
    residual = (n_eff - 1) * p0 * p0 - (n_eff + 3 - 2 * gamma) * p0 - 2.0
    assert abs(residual) < 1e-12


@settings(max_examples=200, deadline=None)
@given(
    n_eff=st.floats(min_value=1.1, max_value=20.0),
    gamma=st.floats(min_value=0.05, max_value=0.95),
)
def test_memory_strauss_monotone(n_eff, gamma):
    # strictly decreasing in n_eff, strictly increasing in 1 - gamma
    assert memory_strauss_exponent(n_eff + 0.1, gamma) < memory_strauss_exponent(n_eff, gamma)
    if gamma + 0.01 < 1.0:
        assert memory_strauss_exponent(n_eff, gamma + 0.01) < memory_strauss_exponent(
            n_eff, gamma
        )


class TestLimits:
    def test_memory_strauss_to_strauss(self):
        for n_eff in (2.0, 3.0, 5.0, 10.0):
            for eps in (1e-4, 1e-6, 1e-8):
                gap = abs(memory_strauss_exponent(n_eff, 1 - eps) - strauss_exponent(n_eff))
                assert gap <= 100 * eps

    def test_p1_to_fujita(self):
        for n in (1, 2, 3, 5):
            for eps in (1e-4, 1e-6, 1e-8):
                rep = shifted_exponents(ModelParams(n, 2.5, 1 - eps, 2.0))
                assert abs(rep.p1 - fujita_exponent(n)) <= 100 * eps

    def test_p3_to_shifted_fujita(self):
        for n in (1, 2, 3):
            for mu in (0.5, 1.0):
                for eps in (1e-4, 1e-6, 1e-8):
                    rep = shifted_exponents(ModelParams(n, mu, 1 - eps, 2.0))
                    assert abs(rep.p3 - fujita_exponent(n + mu - 1)) <= 100 * eps

    def test_d0_limit(self):
        rep = shifted_exponents(ModelParams(2, 3.0, 1 - 1e-8, 2.0))
        assert rep.d0 == pytest.approx(1.0, abs=1e-6)


class TestReport:
    def test_report_fields(self):
        rep = shifted_exponents(ModelParams(2, 3.0, 0.5, 2.0))
        assert rep.p1 == pytest.approx(8.0 / 3.0, rel=1e-15)
        assert rep.p0 == pytest.approx(2.0, rel=1e-14)
        assert rep.fujita > 1.0
        assert rep.d0 >= 0.5 and rep.d1 >= 0.5
        assert rep.sobolev_cap == math.inf

    def test_sobolev_cap(self):
        assert sobolev_cap(1) == math.inf
        assert sobolev_cap(2) == math.inf
        assert sobolev_cap(3) == pytest.approx(3.0)
        assert sobolev_cap(4) == pytest.approx(2.0)


class TestCaseTable:
    def test_mu_gt_1(self):
        assert testfn_bound(ModelParams(2, 3.0, 0.5, 2.0)) == pytest.approx(8.0 / 3.0)

    def test_mu_le_1_n1_infinite(self):
        assert testfn_bound(ModelParams(1, 0.5, 0.5, 2.0)) == math.inf

    def test_mu_eq_2(self):
        assert testfn_bound(ModelParams(2, 2.0, 0.5, 2.0)) == pytest.approx(8.0 / 3.0)

    def test_n3_takes_min(self):
        rep = shifted_exponents(ModelParams(3, 3.0, 0.2, 2.0))
        assert testfn_bound(ModelParams(3, 3.0, 0.2, 2.0)) == pytest.approx(
            min(rep.p1, rep.p2)
        )

    def test_n4_capped(self):
        params = ModelParams(4, 3.0, 0.5, 2.0)
        rep = shifted_exponents(params)
        assert testfn_bound(params) == pytest.approx(min(rep.p2, 2.0))

    def test_iteration_bound(self):
        assert iteration_bound(ModelParams(2, 3.0, 0.5, 2.0)) == pytest.approx(2.0)
        assert iteration_bound(ModelParams(3, 2.0, 0.5, 2.0)) == pytest.approx(2.0)


class TestClassify:
    def test_examples(self):
        assert classify(ModelParams(2, 3.0, 0.5, 2.5)).verdict is Verdict.BLOWUP_TESTFN
        assert classify(ModelParams(2, 3.0, 0.5, 1.5)).verdict is Verdict.BLOWUP_BOTH
        assert classify(ModelParams(2, 3.0, 0.5, 5.0)).verdict is Verdict.OUTSIDE_KNOWN_RANGE

    def test_strictness(self):
        # iteration bound is strict: p exactly at the bound is not certified by it
        v = classify(ModelParams(2, 3.0, 0.5, 2.0))
        assert not v.iteration_applies
        assert v.testfn_applies  # 2.0 <= 8/3 non-strict

    def test_regimes(self):
        assert classify(ModelParams(1, 0.5, 0.5, 2.0)).regime is Regime.MU_LE_1
        assert classify(ModelParams(1, 2.0, 0.5, 2.0)).regime is Regime.MU_EQ_2
        assert classify(ModelParams(1, 3.0, 0.5, 2.0)).regime is Regime.MU_GT_1_NE_2

    def test_pure(self):
        a = classify(ModelParams(3, 1.7, 0.3, 2.2))
        b = classify(ModelParams(3, 1.7, 0.3, 2.2))
        assert a == b

    def test_data_note_present(self):
        v = classify(ModelParams(2, 3.0, 0.5, 1.5))
        assert "u1" in v.data_note


class TestTwoDimensionalCompetition:
    def test_closed_form_agreement(self):
        # For n = 2 and mu > 1 the better of the two bounds has a known
        # closed form; agreement to 1e-10 on a 50 x 50 grid.
        for i in range(50):
            mu = 1.01 + (5.0 - 1.01) * i / 49
            if mu == 2.0:
                continue
            for j in range(50):
                gamma = 0.02 + 0.96 * j / 49
                params = ModelParams(2, mu, gamma, 2.0)
                ours = max(testfn_bound(params), iteration_bound(params))
                rad = mu * mu + 18 * mu - 4 * mu * gamma + 4 * gamma * gamma - 20 * gamma + 33
                closed = max(
                    4.0 / (1.0 + gamma),
                    (5.0 + mu - 2.0 * gamma + math.sqrt(rad)) / (2.0 * (1.0 + mu)),
                )
                assert abs(ours - closed) < 1e-10


class TestRegionGrid:
    def test_cardinality(self):
        cells = region_grid(2, (0.1, 5.0), (0.05, 0.95), (2.0, 2.0), (10, 10, 1))
        assert len(cells) == 100

    def test_deterministic_order(self):
        a = region_grid(2, (0.5, 3.0), (0.2, 0.8), (1.5, 3.0), (3, 3, 3))
        b = region_grid(2, (0.5, 3.0), (0.2, 0.8), (1.5, 3.0), (3, 3, 3))
        assert a == b
        # mu slowest axis
        assert a[0].mu == a[8].mu < a[9].mu

    def test_monotone_in_p(self):
        # if blow-up is certified at p2 then it is certified at any smaller p1
        cells = region_grid(2, (3.0, 3.0), (0.5, 0.5), (1.1, 5.0), (1, 1, 40))
        certified = [c.verdict.verdict is not Verdict.OUTSIDE_KNOWN_RANGE for c in cells]
        # once False, stays False as p grows
        seen_false = False
        for flag in certified:
            if not flag:
                seen_false = True
            if seen_false:
                assert not flag

    def test_boundary_at_p1(self):
        cells = region_grid(2, (3.0, 3.0), (0.5, 0.5), (2.6, 2.7), (1, 1, 101))
        boundary = 8.0 / 3.0
        for c in cells:
            inside = c.verdict.verdict is not Verdict.OUTSIDE_KNOWN_RANGE
            assert inside == (c.p <= boundary + 1e-12)

    def test_empty_range(self):
        with pytest.raises(DomainError):
            region_grid(2, (5.0, 0.1), (0.05, 0.95), (2.0, 2.0), (10, 10, 1))
        with pytest.raises(DomainError):
            region_grid(2, (0.1, 5.0), (0.05, 0.95), (2.0, 2.0), (0, 10, 1))
