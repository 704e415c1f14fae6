"""Tests for the finite-key length engine and the test-size optimizer."""

import math

import numpy as np
import pytest

from qcka_cad.bitcore import binary_entropy
from qcka_cad.keyrate import (
    epsilon_constants,
    key_length,
    leak_ec,
    min_entropy_bound,
    optimize_m,
    pa_output_length_check,
)
from qcka_cad.protosim import NoiseModel, ProtocolParams, analytic_pa, run_trial
from qcka_cad.sampling import delta_from_epsilon

# 50-digit reference: 80 * (1 - h(0.0375)).
BOUND_80_REF = 61.543203544681886
# 50-digit reference: h(0.01/0.82).
H_E_IND_REF = 0.09501724567107634


class TestEpsilonConstants:
    def test_symbolic_relations(self):
        for eps in (1e-6, 1e-12, 1e-36):
            prime, fail, pa = epsilon_constants(eps)
            root = float(np.cbrt(eps))
            assert prime == 4 * eps + 2 * root
            assert fail == 2 * root
            assert pa == 9 * eps + 2 * root

    def test_exact_at_production_epsilon(self):
        prime, fail, pa = epsilon_constants(1e-36)
        assert fail == 2e-12
        assert abs(pa - 2e-12) < 1e-20
        assert abs(prime - 2e-12) < 1e-20

    def test_domain(self):
        with pytest.raises(ValueError):
            epsilon_constants(0.0)
        with pytest.raises(ValueError):
            epsilon_constants(1.0)


class TestMinEntropyBound:
    def test_perfect_channel(self):
        assert min_entropy_bound(100, 100, 0.0, 0.0) == 100.0

    def test_reference_point(self):
        value = min_entropy_bound(100, 80, 0.02, 0.01)
        assert value == pytest.approx(BOUND_80_REF, rel=1e-12)
        assert value == pytest.approx(61.54, abs=0.01)

    def test_clamped_argument_gives_zero(self):
        # (100/50)*0.3 = 0.6 clamps to 1/2, where h = 1.
        assert min_entropy_bound(100, 50, 0.3, 0.0) == 0.0

    def test_no_accepted_blocks(self):
        assert min_entropy_bound(100, 0, 0.1, 0.01) == 0.0

    def test_preconditions(self):
        with pytest.raises(ValueError):
            min_entropy_bound(100, 101, 0.1, 0.0)
        with pytest.raises(ValueError):
            min_entropy_bound(100, 50, -0.1, 0.0)


class TestLeakEc:
    def test_noiseless_is_log_term_only(self):
        for p, eps in ((1, 1e-36), (3, 1e-12)):
            value = leak_ec(1000, p, (0.0,) * p, 1.0, eps)
            assert value == pytest.approx(math.log2(2 * p / eps), rel=1e-12)

    def test_single_party_reference(self):
        value = leak_ec(1, 1, (0.1,), 0.82, 1e-36)
        expected = H_E_IND_REF + math.log2(2.0) - math.log2(1e-36)
        assert value == pytest.approx(expected, rel=1e-10)
        assert H_E_IND_REF == pytest.approx(0.0953, abs=5e-4)

    def test_two_party_formula_split(self):
        pa = analytic_pa((0.1, 0.025))
        cons = leak_ec(1000, 2, (0.1, 0.025), pa, 1e-36, "conservative")
        ind = leak_ec(1000, 2, (0.1, 0.025), pa, 1e-36, "independent")
        assert cons > ind  # pooled error rate is the larger of the two
        assert cons - ind == pytest.approx(
            1000 * (binary_entropy(0.01 / pa) - binary_entropy(0.01 / 0.82)), rel=1e-9
        )

    def test_zero_acceptance_rejected(self):
        with pytest.raises(ValueError, match="accepted"):
            leak_ec(10, 1, (0.1,), 0.0, 1e-36)


class TestKeyLength:
    def test_noiseless_closed_form(self):
        params = ProtocolParams(2, 5_000_000, 1_000_000, 1e-36)
        noise = NoiseModel(0.0, (0.0, 0.0))
        report = key_length(params, noise)
        n = params.key_blocks
        delta = delta_from_epsilon(5_000_000, 1_000_000, 1e-36)
        expected = (
            n * (1.0 - binary_entropy(delta))
            - math.log2(2 * 2 / 1e-36)
            - 2.0 * math.log2(1.0 / 1e-36)
        )
        assert report.ell == pytest.approx(expected, rel=1e-12)
        assert report.rate == report.ell / params.total_signals
        assert report.accepted == n and report.qx == 0.0

    def test_noiseless_rate_floor_with_optimized_m(self):
        _, report = optimize_m(1, 5_000_000, 1e-36, NoiseModel(0.0, (0.0,)))
        assert report.rate > 0.3

    def test_zero_rate_when_entropy_clamped(self):
        params = ProtocolParams(1, 100_000, 20_000, 1e-36)
        report = key_length(params, NoiseModel(0.3, (0.1,)))
        assert report.hmin == 0.0
        assert report.ell < 0.0  # raw margin kept for diagnostics
        assert report.rate == 0.0

    def test_simulated_inputs_accepted(self):
        params = ProtocolParams(2, 150_000, 50_000, 1e-36, seed=2)
        noise = NoiseModel(0.05, (0.05, 0.0125))
        t = run_trial(params, noise)
        report = key_length(params, noise, n_a=t.accepted, qx=t.qx_observed)
        assert report.accepted == t.accepted
        assert report.qx == t.qx_observed

    def test_agreement_between_simulated_and_analytic(self):
        # Monte Carlo fluctuations propagated to ell by finite differences.
        params = ProtocolParams(2, 150_000, 50_000, 1e-36, seed=6)
        noise = NoiseModel(0.05, (0.05, 0.0125))
        analytic = key_length(params, noise)
        t = run_trial(params, noise)
        simulated = key_length(params, noise, n_a=t.accepted, qx=t.qx_observed)

        n, m = params.key_blocks, params.test_size
        qx, n_a = analytic.qx, analytic.accepted
        dq = 1e-4
        d_ell_dqx = (
            key_length(params, noise, n_a=n_a, qx=qx + dq).ell
            - key_length(params, noise, n_a=n_a, qx=qx - dq).ell
        ) / (2 * dq)
        dn = 200
        d_ell_dna = (
            key_length(params, noise, n_a=n_a + dn, qx=qx).ell
            - key_length(params, noise, n_a=n_a - dn, qx=qx).ell
        ) / (2 * dn)
        sigma_qx = math.sqrt(qx * (1 - qx) / m)
        sigma_na = math.sqrt(analytic.pa * (1 - analytic.pa) * n)
        tol = 3 * (abs(d_ell_dqx) * sigma_qx + abs(d_ell_dna) * sigma_na) + 1.0
        assert abs(simulated.ell - analytic.ell) <= tol

    def test_flags_no_accepted_blocks(self):
        params = ProtocolParams(1, 1000, 100, 1e-6)
        report = key_length(params, NoiseModel(0.1, (0.1,)), n_a=0)
        assert "no accepted blocks" in report.flags
        assert report.rate == 0.0


class TestRateProperties:
    def test_monotone_nonincreasing_in_q(self):
        params = ProtocolParams(2, 1_000_000, 250_000, 1e-36)
        rates = [
            key_length(params, NoiseModel(q, (0.05, 0.05))).rate
            for q in np.arange(0.0, 0.1501, 0.01)
        ]
        assert all(a >= b - 1e-15 for a, b in zip(rates, rates[1:]))

    def test_rate_bounded_by_key_fraction(self):
        for n_pop, m in ((10_000, 2_000), (1_000_000, 100_000)):
            for q in (0.0, 0.05, 0.1):
                params = ProtocolParams(1, n_pop, m, 1e-36)
                report = key_length(params, NoiseModel(q, (q,)))
                assert report.rate <= (n_pop - m) / (2 * n_pop)
                assert report.rate < 0.5


class TestOptimizeM:
    def test_interior_optimum(self):
        m_star, report = optimize_m(1, 5_000_000, 1e-36, NoiseModel(0.0, (0.0,)))
        assert 1 < m_star < 2_500_000
        assert report.test_size == m_star
        assert report.rate > 0.0

    def test_deterministic(self):
        noise = NoiseModel(0.05, (0.05,))
        assert optimize_m(1, 100_000, 1e-36, noise) == optimize_m(1, 100_000, 1e-36, noise)

    def test_doubling_signals_never_hurts(self):
        noise = NoiseModel(0.08, (0.08,))
        half = 100_000
        rates = []
        for _ in range(5):
            _, report = optimize_m(1, half, 1e-36, noise)
            rates.append(report.rate)
            half *= 2
        assert all(b >= a - 1e-15 for a, b in zip(rates, rates[1:]))

    def test_asymmetric_configuration_is_positive(self):
        _, report = optimize_m(2, 5_000_000, 1e-36, NoiseModel(0.1, (0.1, 0.025)))
        assert report.rate > 0.0

    def test_no_positive_rate_flagged(self):
        m_star, report = optimize_m(1, 10_000, 1e-36, NoiseModel(0.25, (0.25,)))
        assert report.rate == 0.0
        assert "no positive rate" in report.flags
        assert 1 <= m_star < 5_000

    def test_beats_fixed_fractions(self):
        # The discrete golden-section lands on the optimum's plateau; allow
        # for its flatness (rates there agree to ~1e-7 relative).
        noise = NoiseModel(0.05, (0.05, 0.0125))
        _, best = optimize_m(2, 1_000_000, 1e-36, noise)
        for frac in (0.01, 0.1, 0.25, 0.49):
            m = max(1, int(500_000 * frac))
            report = key_length(ProtocolParams(2, 1_000_000, m, 1e-36), noise)
            assert best.rate >= report.rate * (1.0 - 1e-6)


class TestPaOutputLengthCheck:
    def test_vacuous_at_full_length(self):
        assert pa_output_length_check(100.0, 100.0, 1e-6) == pytest.approx(
            1.0 + 2e-6, rel=1e-12
        )

    def test_two_log_margin_gives_three_epsilon(self):
        eps = 1e-9
        hmin = 500.0
        ell = hmin - 2 * math.log2(1 / eps)
        assert pa_output_length_check(hmin, ell, eps) == pytest.approx(3 * eps, rel=1e-9)

    def test_zero_length(self):
        value = pa_output_length_check(100.0, 0.0, 1e-36)
        assert value == pytest.approx(2.0**-50 + 2e-36, rel=1e-12)

    def test_negative_length_rejected(self):
        with pytest.raises(ValueError):
            pa_output_length_check(100.0, -1.0, 1e-6)

    def test_positive_rate_reports_meet_target(self):
        for bobs, q, qz in ((1, 0.02, (0.02,)), (2, 0.1, (0.1, 0.025))):
            _, report = optimize_m(bobs, 5_000_000, 1e-36, NoiseModel(q, qz))
            assert report.rate > 0.0
            bound = pa_output_length_check(report.hmin, report.ell, report.epsilon)
            assert bound <= report.epsilon_pa
