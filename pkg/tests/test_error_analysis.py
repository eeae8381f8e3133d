import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from amqd import (
    ConfigError,
    ErrorEstimate,
    EstimationError,
    MonteCarloConfig,
    NoiseSpec,
    OutageQuery,
    Regime,
    TransmittanceModel,
    analytic_event_probability,
    chi2_density,
    chi2_density_small_x,
    diversity_slope_scan,
    error_event,
    fit_diversity_slope,
    monte_carlo_p_err,
    outage_cdf,
    p_err_amqd_analytic,
    p_err_single_analytic,
    wilson_interval,
)


class TestErrorEvent:
    def test_zero_gain_is_always_an_error(self):
        assert error_event(0.0, 1.0, 0.1, Regime.EXACT)

    def test_exact_event_is_strict(self):
        # log2(1 + 1*3) = 2 exactly; strict < fails
        assert not error_event(1.0, 3.0, 2.0, Regime.EXACT)
        assert error_event(1.0, 3.0, 2.0000001, Regime.EXACT)

    def test_low_snr_linearization(self):
        # 0.1 * 0.1 * log2(e) ~ 0.0144 < 0.1
        assert error_event(0.1, 0.1, 0.1, Regime.LOW_SNR)
        assert not error_event(0.1, 0.1, 0.01, Regime.LOW_SNR)

    def test_high_snr_zero_product_is_an_error_not_an_exception(self):
        assert error_event(0.0, 5.0, 1.0, Regime.HIGH_SNR)

    def test_high_snr_log_form(self):
        # log2(4 * 4) = 4
        assert error_event(4.0, 4.0, 5.0, Regime.HIGH_SNR)
        assert not error_event(4.0, 4.0, 4.0, Regime.HIGH_SNR)

    def test_magnitude_threshold_defaults_to_inverse_snr(self):
        assert error_event(0.09, 10.0, 0.0, Regime.MAGNITUDE_THRESHOLD)
        assert not error_event(0.11, 10.0, 0.0, Regime.MAGNITUDE_THRESHOLD)
        assert error_event(0.11, 10.0, 0.0, Regime.MAGNITUDE_THRESHOLD, threshold=0.2)

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ConfigError):
            error_event(-0.1, 1.0, 0.0)
        with pytest.raises(ConfigError):
            error_event(0.1, 0.0, 0.0)

    def test_outage_query_validation(self):
        q = OutageQuery(2, 10.0, 1.0, Regime.EXACT)
        assert q.l == 2
        with pytest.raises(ConfigError):
            OutageQuery(0, 10.0, 1.0)
        with pytest.raises(ConfigError):
            OutageQuery(1, 0.0, 1.0)


class TestClosedForms:
    def test_snr_one_gives_certain_error(self):
        for zeta in (0.0, 0.3, 0.6):
            assert p_err_single_analytic(1.0, zeta) == 1.0

    def test_single_carrier_inverse_snr(self):
        assert p_err_single_analytic(100.0, 0.0) == pytest.approx(0.01, rel=1e-14)

    def test_single_carrier_reduced_exponent(self):
        assert p_err_single_analytic(100.0, 0.6) == pytest.approx(0.15848931924611134, rel=1e-12)

    def test_multicarrier_matches_single_at_l_one(self):
        for snr in (2.0, 10.0, 100.0, 1e4):
            a = p_err_amqd_analytic(snr, 1, 0.0, include_factorial=True)
            b = p_err_single_analytic(snr, 0.0)
            assert abs(a - b) / b <= 1e-14

    def test_factorial_prefactor(self):
        assert p_err_amqd_analytic(10.0, 2, 0.0, include_factorial=True) == pytest.approx(
            0.005, rel=1e-14
        )

    def test_reference_curve_value(self):
        assert p_err_amqd_analytic(10.0, 5, 0.6) == pytest.approx(0.01, rel=1e-12)

    def test_invalid_parameters_rejected(self):
        with pytest.raises(ConfigError):
            p_err_single_analytic(0.0, 0.0)
        with pytest.raises(ConfigError):
            p_err_single_analytic(10.0, 1.0)
        with pytest.raises(ConfigError):
            p_err_amqd_analytic(10.0, 0, 0.0)


class TestChiSquareDensity:
    def test_density_at_origin(self):
        assert chi2_density(0.0, 1) == 1.0
        assert chi2_density(0.0, 2) == 0.0

    def test_known_values(self):
        assert chi2_density(1.0, 2) == pytest.approx(math.exp(-1.0), rel=1e-12)
        assert chi2_density(2.0, 3) == pytest.approx(2.0 * math.exp(-2.0), rel=1e-12)

    def test_matches_gamma_distribution(self):
        for l in (1, 2, 5, 10):
            for x in (0.01, 0.5, 1.0, 4.0, 20.0):
                assert chi2_density(x, l) == pytest.approx(
                    stats.gamma.pdf(x, a=l), rel=1e-12, abs=1e-300
                )

    def test_negative_argument_rejected(self):
        with pytest.raises(ConfigError):
            chi2_density(-0.1, 2)
        with pytest.raises(ConfigError):
            chi2_density_small_x(-0.1, 2)

    def test_small_x_leading_term(self):
        for l in (1, 2, 3, 5):
            x = 1e-4
            assert chi2_density_small_x(x, l) == pytest.approx(
                x ** (l - 1) / math.factorial(l - 1), rel=1e-12
            )
            # the exact density sits just below the leading term
            assert chi2_density(x, l) <= chi2_density_small_x(x, l)
            assert chi2_density(x, l) == pytest.approx(chi2_density_small_x(x, l), rel=2e-4)

    def test_density_integrates_to_one(self):
        for l in (1, 3, 6):
            total, _ = integrate.quad(lambda x: chi2_density(x, l), 0.0, np.inf)
            assert total == pytest.approx(1.0, rel=1e-10)


class TestOutageCdf:
    def test_zero_threshold(self):
        assert outage_cdf(0.0, 3) == 0.0

    def test_exponential_case(self):
        assert outage_cdf(0.01, 1, "exact") == pytest.approx(0.009950166250831947, rel=1e-12)
        assert outage_cdf(0.01, 1, "approx") == pytest.approx(0.01, rel=1e-14)

    def test_two_subchannel_case(self):
        # 1 - e^-t (1 + t) at t = 0.1
        assert outage_cdf(0.1, 2, "exact") == pytest.approx(0.004678840160444475, rel=1e-12)
        assert outage_cdf(0.1, 2, "approx") == pytest.approx(0.005, rel=1e-14)

    def test_quadrature_agreement(self):
        for l in (1, 4, 7, 10):
            for t in (1e-4, 0.1, 1.0, 5.0):
                quad, _ = integrate.quad(
                    lambda x: chi2_density(x, l), 0.0, t, epsabs=0.0, epsrel=1e-12, limit=200
                )
                exact = outage_cdf(t, l, "exact")
                assert abs(quad - exact) / exact <= 1e-10

    def test_approx_overestimates_slightly(self):
        for l in range(1, 7):
            for t in (1e-4, 1e-3, 0.01):
                ratio = outage_cdf(t, l, "approx") / outage_cdf(t, l, "exact")
                assert 1.0 <= ratio <= 1.0 + t

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ConfigError):
            outage_cdf(-1.0, 2)
        with pytest.raises(ConfigError):
            outage_cdf(1.0, 2, "fancy")


class TestWilsonInterval:
    @given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=1, max_value=10**6))
    @settings(max_examples=120, deadline=None)
    def test_endpoints_solve_the_score_equation(self, k, n):
        if k > n:
            k = k % (n + 1)
        lo, hi = wilson_interval(k, n)
        z = 1.96
        p_hat = k / n
        # endpoints are the roots of (p_hat - p)^2 = z^2 p (1 - p) / n
        roots = np.sort(np.roots([1.0 + z * z / n, -(2.0 * p_hat + z * z / n), p_hat * p_hat]))
        assert lo == pytest.approx(float(roots[0]), abs=1e-10)
        assert hi == pytest.approx(float(roots[1]), abs=1e-10)
        assert 0.0 <= lo + 1e-12 and hi <= 1.0 + 1e-12
        assert lo - 1e-12 <= p_hat <= hi + 1e-12

    def test_extreme_counts(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == 0.0 and hi > 0.0
        lo, hi = wilson_interval(100, 100)
        assert hi == pytest.approx(1.0) and lo < 1.0

    def test_invalid_counts_rejected(self):
        with pytest.raises(ConfigError):
            wilson_interval(5, 0)
        with pytest.raises(ConfigError):
            wilson_interval(6, 5)


class TestErrorEstimate:
    def test_from_counts(self):
        est = ErrorEstimate.from_counts(50, 1000)
        assert est.p_hat == 0.05
        assert est.ci_low < 0.05 < est.ci_high
        assert est.covers(0.05)
        assert not est.covers(0.2)

    def test_inconsistent_p_hat_rejected(self):
        with pytest.raises(ConfigError):
            ErrorEstimate(0.5, 100, 0.4, 0.6, 49)

    def test_interval_must_contain_estimate(self):
        with pytest.raises(ConfigError):
            ErrorEstimate(0.49, 100, 0.5, 0.6, 49)


class TestMonteCarloPErr:
    def test_reachable_rate_never_errors(self):
        # log2(1 + 1*1) = 1, strict < 1 is false on every trial
        config = MonteCarloConfig(l=1, trials=500, seed=0, event="rate", snr=1.0, rate_bits=1.0)
        est = monte_carlo_p_err(config, TransmittanceModel.fixed((1.0,)))
        assert est.p_hat == 0.0

    def test_unreachable_rate_always_errors(self):
        config = MonteCarloConfig(l=1, trials=500, seed=0, event="rate", snr=1.0, rate_bits=2.0)
        est = monte_carlo_p_err(config, TransmittanceModel.fixed((1.0,)))
        assert est.p_hat == 1.0

    def test_uniform_phase_threshold_event_is_deterministic(self):
        model = TransmittanceModel.uniform_phase(0.5)
        lo = MonteCarloConfig(l=2, trials=100, seed=0, event="threshold", threshold=0.4)
        hi = MonteCarloConfig(l=2, trials=100, seed=0, event="threshold", threshold=0.6)
        assert monte_carlo_p_err(lo, model).p_hat == 0.0  # 2 * 0.25 = 0.5 >= 0.4
        assert monte_carlo_p_err(hi, model).p_hat == 1.0

    def test_single_subchannel_estimate_covers_oracle(self):
        config = MonteCarloConfig(l=1, trials=10**6, seed=0, event="threshold", threshold=0.1)
        est = monte_carlo_p_err(config, TransmittanceModel.rayleigh(1.0))
        assert est.covers(outage_cdf(0.1, 1, "exact"))

    def test_aggregate_estimate_covers_gamma_oracle(self):
        config = MonteCarloConfig(l=3, trials=2 * 10**5, seed=2, event="threshold", threshold=1.0)
        est = monte_carlo_p_err(config, TransmittanceModel.rayleigh(1.0))
        assert est.covers(outage_cdf(1.0, 3, "exact"))

    def test_worker_count_does_not_change_the_estimate(self):
        config = MonteCarloConfig(l=2, trials=200000, seed=11, event="threshold", threshold=0.3)
        model = TransmittanceModel.rayleigh(1.0)
        assert monte_carlo_p_err(config, model, workers=1) == monte_carlo_p_err(
            config, model, workers=3
        )

    def test_rate_event_reduces_to_magnitude_threshold(self):
        # identical seeds draw identical gains, and the two events have the
        # same geometry, so the counts agree exactly
        snr, rate_bits = 8.0, 1.5
        m_thr = (2.0**rate_bits - 1.0) / snr
        rate_cfg = MonteCarloConfig(l=1, trials=3 * 10**5, seed=6, event="rate", snr=snr,
                                    rate_bits=rate_bits)
        thr_cfg = MonteCarloConfig(l=1, trials=3 * 10**5, seed=6, event="threshold",
                                   threshold=m_thr)
        model = TransmittanceModel.rayleigh(1.0)
        assert monte_carlo_p_err(rate_cfg, model) == monte_carlo_p_err(thr_cfg, model)

    def test_snr_derived_from_noise_when_unset(self):
        model = TransmittanceModel.rayleigh(1.0)
        derived = MonteCarloConfig(l=1, trials=10**5, seed=3, event="threshold")
        explicit = MonteCarloConfig(l=1, trials=10**5, seed=3, event="threshold", snr=4.0)
        noise = NoiseSpec((0.25,))
        assert monte_carlo_p_err(derived, model, noise=noise) == monte_carlo_p_err(explicit, model)

    def test_missing_event_parameters_rejected(self):
        model = TransmittanceModel.rayleigh(1.0)
        with pytest.raises(ConfigError):
            monte_carlo_p_err(
                MonteCarloConfig(l=1, trials=10, seed=0, event="threshold"), model
            )
        with pytest.raises(ConfigError):
            monte_carlo_p_err(
                MonteCarloConfig(l=1, trials=10, seed=0, event="rate", snr=2.0), model
            )


class TestAnalyticEventProbability:
    def test_threshold_event_matches_outage_cdf(self):
        model = TransmittanceModel.rayleigh(2.0)
        p = analytic_event_probability(model, "threshold", 3, threshold=0.5)
        assert p == pytest.approx(outage_cdf(0.25, 3, "exact"), rel=1e-12)

    def test_rate_event_exponential_form(self):
        model = TransmittanceModel.rayleigh(1.0)
        p = analytic_event_probability(model, "rate", 1, snr=10.0, rate_bits=1.0)
        assert p == pytest.approx(1.0 - math.exp(-0.1), rel=1e-12)

    def test_fixed_model_indicator(self):
        model = TransmittanceModel.fixed((0.5, 0.5))
        assert analytic_event_probability(model, "threshold", 2, threshold=0.6) == 1.0
        assert analytic_event_probability(model, "threshold", 2, threshold=0.4) == 0.0


class TestFitDiversitySlope:
    def test_exact_power_law(self):
        snrs = np.logspace(1, 4, 7)
        pts = [(s, s**-2.0) for s in snrs]
        assert abs(fit_diversity_slope(pts) - 2.0) <= 1e-10

    def test_reduced_exponent_curve(self):
        snrs = np.logspace(2, 4, 9)
        pts = [(s, p_err_single_analytic(s, 0.6)) for s in snrs]
        assert abs(fit_diversity_slope(pts) - 0.4) <= 1e-10

    def test_constant_curve_has_zero_slope(self):
        pts = [(10.0, 0.5), (100.0, 0.5), (1000.0, 0.5)]
        assert abs(fit_diversity_slope(pts)) <= 1e-12

    def test_zero_probability_points_excluded(self):
        snrs = np.logspace(1, 3, 5)
        pts = [(s, s**-1.0) for s in snrs]
        pts[2] = (pts[2][0], 0.0)
        assert abs(fit_diversity_slope(pts) - 1.0) <= 1e-10

    def test_too_few_usable_points_is_an_estimation_error(self):
        with pytest.raises(EstimationError):
            fit_diversity_slope([(10.0, 0.0), (100.0, 0.0), (1000.0, 0.1)])

    def test_unsorted_snr_rejected(self):
        with pytest.raises(ConfigError):
            fit_diversity_slope([(10.0, 0.1), (5.0, 0.2), (100.0, 0.05)])

    def test_too_few_points_rejected(self):
        with pytest.raises(ConfigError):
            fit_diversity_slope([(10.0, 0.1), (100.0, 0.01)])


class TestDiversitySlopeScan:
    # the zeta = 0 sweeps run in the acceptance suite; here the reduced
    # allocation zeta = 0.5 checks the l*(1-zeta) law cheaply
    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_slope_tracks_reduced_diversity_order(self, l):
        res = diversity_slope_scan(
            l, 0.5, seed=8100 + l, anchor_probability=0.05, target_errors=400
        )
        expected = l * 0.5
        assert 0.9 * expected <= res.slope <= 1.1 * expected

    def test_thresholds_follow_the_schedule(self):
        res = diversity_slope_scan(2, 0.25, seed=1, target_errors=1, min_trials=1000)
        ratios = np.asarray(res.thresholds) / res.thresholds[0]
        expected = (np.asarray(res.snr) / res.snr[0]) ** (-0.75)
        assert np.allclose(ratios, expected, rtol=1e-12)

    def test_invalid_scan_parameters_rejected(self):
        with pytest.raises(ConfigError):
            diversity_slope_scan(1, 0.0, seed=0, num_points=2)
        with pytest.raises(ConfigError):
            diversity_slope_scan(1, 0.0, seed=0, anchor_probability=1.5)
        with pytest.raises(ConfigError):
            diversity_slope_scan(1, 0.0, seed=0, snr_min=100.0, snr_max=10.0)
