"""Iteration engine: recursions, margins, envelopes, and the integral oracle."""

import math

import numpy as np
import pytest

from memwave.errors import CertificateError, DataError, DomainError
from memwave.exponents import ModelParams, memory_strauss_exponent
from memwave.fractional import TimeGrid
from memwave.kato import (
    KatoParams,
    blowup_time_bound,
    build_kato_instance,
    check_blowup_condition,
    iterate_sequences,
    lower_envelope,
    nested_integral_oracle,
    normalize_negative_exponents,
    summation_identity_check,
    unit_ball_volume,
)


def random_params(rng, a_low=0.0):
    return KatoParams(
        alpha0=float(rng.uniform(0.0, 5.0)),
        beta0=float(rng.uniform(0.0, 5.0)),
        K0=float(rng.uniform(0.01, 100.0)),
        Ktilde0=float(rng.uniform(0.01, 100.0)),
        a0=float(rng.uniform(0.0, 5.0)),
        a1=float(rng.uniform(a_low, 2.0)),
        a2=float(rng.uniform(a_low, 2.0)),
        a3=float(rng.uniform(a_low, 2.0)),
        p=float(rng.uniform(1.1, 4.0)),
    )


class TestParamsValidation:
    def test_rejects_bad_fields(self):
        good = dict(alpha0=1.0, beta0=1.0, K0=1.0, Ktilde0=1.0, a0=1.0, a1=0.0, a2=0.0, a3=0.0, p=2.0)
        with pytest.raises(DomainError):
            KatoParams(**{**good, "K0": 0.0})
        with pytest.raises(DomainError):
            KatoParams(**{**good, "p": 1.0})
        with pytest.raises(DomainError):
            KatoParams(**{**good, "T0": -1.0})
        with pytest.raises(DomainError):
            KatoParams(**{**good, "alpha0": -0.5})
        with pytest.raises(DomainError):
            KatoParams(**{**good, "a2": math.nan})

    def test_weight_sum(self):
        prm = KatoParams(alpha0=0, beta0=0, K0=1, Ktilde0=1, a0=0, a1=1.0, a2=0.5, a3=0.25, p=2.0)
        assert prm.weight_sum == 4.75


class TestNormalize:
    def test_single_absorption(self):
        prm = KatoParams(alpha0=1, beta0=2, K0=1, Ktilde0=1, a0=1.0, a1=0.0, a2=0.0, a3=-0.5, p=2.0)
        out = normalize_negative_exponents(prm)
        assert out.a3 == 0.0
        assert out.a0 == 1.5

    def test_margin_invariant(self):
        prm = KatoParams(alpha0=1, beta0=2, K0=1, Ktilde0=1, a0=1.0, a1=-1.0, a2=0.5, a3=-0.25, p=2.0)
        before = check_blowup_condition(prm)[1]
        after = check_blowup_condition(normalize_negative_exponents(prm))[1]
        assert after == pytest.approx(before, abs=1e-12)

    def test_identity_on_valid_input(self):
        prm = KatoParams(alpha0=1, beta0=2, K0=1, Ktilde0=1, a0=1.0, a1=0.5, a2=0.0, a3=1.0, p=2.0)
        assert normalize_negative_exponents(prm) is prm

    def test_double_absorption(self):
        prm = KatoParams(alpha0=0, beta0=0, K0=1, Ktilde0=1, a0=0.0, a1=-1.0, a2=-1.0, a3=0.0, p=1.5)
        out = normalize_negative_exponents(prm)
        assert (out.a0, out.a1, out.a2) == (2.0, 0.0, 0.0)


class TestCondition:
    def test_simple_positive_margin(self):
        prm = KatoParams(alpha0=0, beta0=1, K0=1, Ktilde0=1, a0=3.0, a1=0, a2=0, a3=0, p=2.0)
        holds, margin = check_blowup_condition(prm)
        assert holds
        assert margin == 1.0

    def test_boundary_margin_does_not_hold(self):
        prm = KatoParams(alpha0=2, beta0=2, K0=1, Ktilde0=1, a0=4.5, a1=0.5, a2=1.0, a3=0.0, p=3.0)
        holds, margin = check_blowup_condition(prm)
        assert margin == 0.0
        assert not holds


class TestIterateSequences:
    def test_single_step(self):
        prm = KatoParams(alpha0=1, beta0=0, K0=1, Ktilde0=1, a0=2.0, a1=0, a2=0, a3=0, p=2.0)
        tr = iterate_sequences(prm, 1)
        assert tr.alpha_j[1] == 4.0  # a0 + p alpha0 = 2 + 2

    def test_geometric_beta(self):
        prm = KatoParams(alpha0=0, beta0=0, K0=1, Ktilde0=1, a0=0.0, a1=0, a2=0, a3=0, p=2.0)
        tr = iterate_sequences(prm, 10)
        expected = 3.0 * (2.0 ** np.arange(11) - 1.0)
        assert np.allclose(tr.beta_j, expected, rtol=0, atol=0)

    def test_closed_forms_match_recursion(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            prm = random_params(rng)
            tr = iterate_sequences(prm, 30)
            j = np.arange(31)
            p, S = prm.p, prm.weight_sum
            ca = (prm.alpha0 + prm.a0 / (p - 1.0)) * p**j - prm.a0 / (p - 1.0)
            cb = (prm.beta0 + S / (p - 1.0)) * p**j - S / (p - 1.0)
            assert np.max(np.abs(tr.alpha_j - ca) / np.maximum(1.0, np.abs(ca))) <= 1e-12
            assert np.max(np.abs(tr.beta_j - cb) / np.maximum(1.0, np.abs(cb))) <= 1e-12

    def test_sequences_strictly_increase(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            prm = random_params(rng, a_low=0.1)
            tr = iterate_sequences(prm, 25)
            assert np.all(np.diff(tr.beta_j) > 0.0)
            assert np.all(np.diff(tr.alpha_j) >= 0.0)

    def test_constant_floor_beyond_onset_index(self):
        # log K_j >= p^j log E0 once j reaches j0
        rng = np.random.default_rng(17)
        for _ in range(100):
            prm = random_params(rng)
            tr = iterate_sequences(prm, 40)
            j = np.arange(tr.j0, 41)
            floor = prm.p**j * tr.E0_log
            slack = 1e-9 * np.maximum(1.0, np.abs(floor))
            assert np.all(tr.K_j_log[tr.j0 :] >= floor - slack)

    def test_scaling_covariance_of_frame_constant(self):
        # Ktilde0 -> c Ktilde0 lifts log K_j by (p^j - 1)/(p - 1) log c
        prm = KatoParams(alpha0=1, beta0=2, K0=3, Ktilde0=0.7, a0=1.0, a1=0.5, a2=0.0, a3=0.2, p=1.7)
        c = 4.3
        scaled = KatoParams(
            alpha0=1, beta0=2, K0=3, Ktilde0=c * 0.7, a0=1.0, a1=0.5, a2=0.0, a3=0.2, p=1.7
        )
        base = iterate_sequences(prm, 10)
        lift = iterate_sequences(scaled, 10)
        j = np.arange(11)
        shift = (prm.p**j - 1.0) / (prm.p - 1.0) * math.log(c)
        assert np.allclose(lift.K_j_log, base.K_j_log + shift, rtol=1e-12, atol=1e-9)

    def test_no_overflow_deep_iteration(self):
        prm = KatoParams(alpha0=5, beta0=5, K0=100, Ktilde0=100, a0=5.0, a1=2, a2=2, a3=2, p=4.0)
        tr = iterate_sequences(prm, 200)
        assert np.all(np.isfinite(tr.K_j_log))

    def test_iteration_count_validated(self):
        prm = KatoParams(alpha0=0, beta0=0, K0=1, Ktilde0=1, a0=0, a1=0, a2=0, a3=0, p=2.0)
        with pytest.raises(DomainError):
            iterate_sequences(prm, 0)
        with pytest.raises(DomainError):
            iterate_sequences(prm, 201)


class TestSummationIdentity:
    def test_small_cases_exact(self):
        assert summation_identity_check(2.0, 3) == 0.0
        assert summation_identity_check(3.0, 1) == 0.0

    def test_random_sweep_relative(self):
        rng = np.random.default_rng(19)
        for _ in range(300):
            p = float(rng.uniform(1.01, 5.0))
            j = int(rng.integers(1, 41))
            resid = summation_identity_check(p, j)
            scale = ((p ** (j + 1) - p) / (p - 1.0) - j) / (p - 1.0)
            assert resid <= 1e-9 * scale

    def test_validation(self):
        with pytest.raises(DomainError):
            summation_identity_check(1.0, 3)
        with pytest.raises(DomainError):
            summation_identity_check(2.0, 0)


def sample_instance(c1=0.01, T0=10.0):
    model = ModelParams(n=1, mu=0.5, gamma=0.5, p=2.0)
    prm = build_kato_instance(model, R=1.0, T0=T0, C1=c1)
    return prm, iterate_sequences(prm, 60)


class TestEnvelope:
    def test_divergence_beyond_certified_time(self):
        prm, tr = sample_instance()
        t = 2.0 * blowup_time_bound(prm, tr)
        env = [lower_envelope(prm, tr, t, j) for j in range(tr.j0, tr.j0 + 31)]
        assert all(b > a for a, b in zip(env, env[1:]))
        assert env[-1] - env[0] > math.log(1e6)

    def test_collapse_below_certified_time(self):
        # inside the certified time the inner logarithm is negative and
        # the p^j factor drives the bound to zero
        prm, tr = sample_instance()
        tstar = blowup_time_bound(prm, tr)
        t = max(1.0, 2.0 * prm.T0)
        assert t < tstar
        env = [lower_envelope(prm, tr, t, j) for j in range(tr.j0, tr.j0 + 31)]
        assert all(b < a for a, b in zip(env, env[1:]))
        assert env[-1] - env[0] < math.log(1e-6)

    def test_domain_guards(self):
        prm, tr = sample_instance()
        with pytest.raises(DomainError):
            lower_envelope(prm, tr, 0.5 * max(1.0, 2.0 * prm.T0), tr.j0)
        with pytest.raises(DomainError):
            lower_envelope(prm, tr, 100.0, tr.j0 - 1)


class TestBlowupTimeBound:
    def test_monotone_in_initial_constant(self):
        prm1, tr1 = sample_instance(c1=0.01)
        prm2, tr2 = sample_instance(c1=0.02)
        assert blowup_time_bound(prm2, tr2) <= blowup_time_bound(prm1, tr1)

    def test_clamped_at_onset(self):
        prm, tr = sample_instance(c1=1e12)
        assert blowup_time_bound(prm, tr) == max(1.0, 2.0 * prm.T0)

    def test_grows_toward_margin_boundary(self):
        # margin -> 0+ sends the certified time to infinity
        t_values = []
        for p in (1.8, 1.9, 1.95):
            model = ModelParams(n=2, mu=3.0, gamma=0.5, p=p)
            prm = build_kato_instance(model, R=1.0, T0=1.0, C1=0.01)
            tr = iterate_sequences(prm, 40)
            t_values.append(blowup_time_bound(prm, tr))
        assert t_values[0] < t_values[1] < t_values[2]

    def test_refuses_without_certificate(self):
        model = ModelParams(n=2, mu=3.0, gamma=0.5, p=2.5)  # beyond the boundary
        prm = build_kato_instance(model, R=1.0, T0=1.0, C1=1.0)
        tr = iterate_sequences(prm, 30)
        with pytest.raises(CertificateError):
            blowup_time_bound(prm, tr)


class TestBuildInstance:
    def test_field_formulas(self):
        model = ModelParams(n=2, mu=3.0, gamma=0.5, p=2.0)
        prm = build_kato_instance(model, R=1.5, T0=4.0, C1=2.0)
        c_gamma = 1.0 / math.gamma(0.5)
        assert prm.alpha0 == 3.0 + 4.0 * 2.0 / 2.0  # mu + (n+mu-1)p/2
        assert prm.beta0 == 6.5  # n+mu+2-gamma
        assert prm.K0 == pytest.approx(2.0 * c_gamma / (2.0 * 6.0 * 7.0), rel=1e-14)
        assert prm.Ktilde0 == pytest.approx((math.pi * 1.5**2) ** -1.0 * c_gamma, rel=1e-14)
        assert (prm.a0, prm.a1, prm.a2, prm.a3) == (3.0 + 0.5 + 2.0, 0.0, 3.0, 0.0)
        assert prm.T0 == 4.0

    def test_margin_sign_matches_final_quadratic(self):
        rng = np.random.default_rng(23)
        for _ in range(10000):
            n = int(rng.integers(1, 7))
            mu = float(rng.uniform(0.05, 6.0))
            gamma = float(rng.uniform(0.05, 0.95))
            p = float(rng.uniform(1.05, 5.0))
            prm = build_kato_instance(ModelParams(n=n, mu=mu, gamma=gamma, p=p), 1.0, 1.0, 1.0)
            margin = check_blowup_condition(prm)[1]
            quad = -(n + mu - 1.0) / 2.0 * p * p + ((n + mu + 1.0) / 2.0 + 1.0 - gamma) * p + 1.0
            assert (margin > 0.0) == (quad > 0.0)

    def test_margin_boundary_at_shifted_strauss_root(self):
        model = ModelParams(n=2, mu=3.0, gamma=0.5, p=memory_strauss_exponent(5.0, 0.5))
        prm = build_kato_instance(model, R=1.0, T0=1.0, C1=1.0)
        assert check_blowup_condition(prm)[1] == pytest.approx(0.0, abs=1e-12)

    def test_kernel_constant_vanishes_toward_gamma_one(self):
        # 1/Gamma(1-gamma) -> 0; instances are not extrapolated past gamma < 1
        vals = []
        for gamma in (0.9, 0.99, 0.999):
            prm = build_kato_instance(ModelParams(n=1, mu=1.0, gamma=gamma, p=2.0), 1.0, 1.0, 1.0)
            vals.append(prm.Ktilde0)
        assert vals[0] > vals[1] > vals[2] > 0.0

    def test_unit_ball_volume(self):
        assert unit_ball_volume(1) == pytest.approx(2.0)
        assert unit_ball_volume(2) == pytest.approx(math.pi)
        assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)

    def test_validation(self):
        model = ModelParams(n=1, mu=1.0, gamma=0.5, p=2.0)
        with pytest.raises(DomainError):
            build_kato_instance(model, R=0.5, T0=1.0, C1=1.0)
        with pytest.raises(DomainError):
            build_kato_instance(model, R=1.0, T0=1.0, C1=0.0)


class TestNestedIntegralOracle:
    def setup_method(self):
        model = ModelParams(n=1, mu=0.5, gamma=0.5, p=2.0)
        self.prm = build_kato_instance(model, R=1.0, T0=1.0, C1=0.5)
        self.trace = iterate_sequences(self.prm, 3)
        self.grid = TimeGrid(t_end=self.prm.T0 + 20.0, steps=4000, t_start=self.prm.T0)

    def analytic(self, j):
        t = self.grid.nodes
        return (
            math.exp(self.trace.K_j_log[j])
            * (1.0 + t) ** -self.trace.alpha_j[j]
            * (t - self.prm.T0) ** self.trace.beta_j[j]
        )

    def test_zero_maps_to_zero(self):
        out = nested_integral_oracle(self.prm, np.zeros(self.grid.steps + 1), self.grid)
        assert np.all(out == 0.0)

    def test_dominates_analytic_next_step(self):
        out = nested_integral_oracle(self.prm, self.analytic(0), self.grid)
        assert np.all(out >= self.analytic(1))

    def test_two_applications_dominate_second_step(self):
        out = nested_integral_oracle(self.prm, self.analytic(0), self.grid)
        out = nested_integral_oracle(self.prm, out, self.grid)
        assert np.all(out >= self.analytic(2))

    def test_callable_initial_bound(self):
        k0, a0, b0 = math.exp(self.trace.K_j_log[0]), self.prm.alpha0, self.prm.beta0
        out = nested_integral_oracle(
            self.prm,
            lambda t: k0 * (1.0 + t) ** -a0 * (t - self.prm.T0) ** b0,
            self.grid,
        )
        assert np.allclose(out, nested_integral_oracle(self.prm, self.analytic(0), self.grid))

    def test_grid_must_start_at_onset(self):
        bad = TimeGrid(t_end=10.0, steps=100, t_start=0.0)
        with pytest.raises(DomainError):
            nested_integral_oracle(self.prm, np.zeros(101), bad)

    def test_rejects_negative_candidate(self):
        with pytest.raises(DataError):
            nested_integral_oracle(self.prm, -np.ones(self.grid.steps + 1), self.grid)
