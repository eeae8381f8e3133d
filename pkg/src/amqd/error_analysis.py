"""Error events, closed-form error probabilities, and Monte Carlo estimators.

Closed forms implemented here:
  single carrier   p_err = snr^-(1-zeta)
  multicarrier     p_err = snr^-(l(1-zeta))   (optionally with a 1/l! prefactor)
  aggregate outage P[sum_l |F_i|^2 < t] for unit-mean Rayleigh gains, which is
  the regularized lower incomplete gamma P(l, t); its small-t evaluation is
  t^l / l!.

Monte Carlo estimates are exactly reproducible: trials are split into fixed
batches of 65536, batch b drawing from the Philox substream keyed by
(seed, spawn_key=(b,)), so the result is byte-identical for any worker count.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from .exceptions import ConfigError, EstimationError
from .sampling import FIXED, RAYLEIGH, UNIFORM_PHASE, NoiseSpec, TransmittanceModel

LOG2E = math.log2(math.e)

_BATCH = 65536


class Regime(Enum):
    """Which form of the outage event to evaluate."""

    EXACT = "exact"
    LOW_SNR = "low_snr"
    HIGH_SNR = "high_snr"
    MAGNITUDE_THRESHOLD = "magnitude_threshold"


@dataclass(frozen=True)
class OutageQuery:
    """A single outage-probability question: channel count, SNR, rate, regime."""

    l: int
    snr: float
    rate_bits: float
    regime: Regime = Regime.EXACT

    def __post_init__(self):
        if int(self.l) < 1:
            raise ConfigError("l must be >= 1")
        if not (float(self.snr) > 0.0):
            raise ConfigError("snr must be positive")
        if float(self.rate_bits) < 0.0:
            raise ConfigError("rate_bits must be nonnegative")


def error_event(
    f_t_mag2: float,
    snr_star: float,
    rate_bits: float,
    regime: Regime = Regime.EXACT,
    threshold: float | None = None,
) -> bool:
    """True when the realized gain cannot support the target rate.

    exact:      log2(1 + m*s) < rate        (strict)
    low_snr:    m*s*log2(e) < rate
    high_snr:   log2(m*s) < rate; m*s = 0 counts as an error, not an exception
    magnitude_threshold: m < threshold (default threshold 1/s)
    """
    m = float(f_t_mag2)
    s = float(snr_star)
    if not (math.isfinite(m) and m >= 0.0):
        raise ConfigError("|F|^2 must be finite and nonnegative")
    if not (math.isfinite(s) and s > 0.0):
        raise ConfigError("snr_star must be finite and positive")
    r = float(rate_bits)
    if regime is Regime.EXACT:
        return math.log2(1.0 + m * s) < r
    if regime is Regime.LOW_SNR:
        return m * s * LOG2E < r
    if regime is Regime.HIGH_SNR:
        if m * s == 0.0:
            return True
        return math.log2(m * s) < r
    if regime is Regime.MAGNITUDE_THRESHOLD:
        t = 1.0 / s if threshold is None else float(threshold)
        return m < t
    raise ConfigError(f"unknown regime: {regime!r}")


def p_err_single_analytic(snr: float, zeta: float = 0.0) -> float:
    """Single-carrier error probability snr^-(1-zeta)."""
    if not (float(snr) > 0.0):
        raise ConfigError("snr must be positive")
    z = float(zeta)
    if not (0.0 <= z < 1.0):
        raise ConfigError("zeta must lie in [0, 1)")
    return float(snr) ** (-(1.0 - z))


def p_err_amqd_analytic(
    snr: float, l: int, zeta: float = 0.0, include_factorial: bool = False
) -> float:
    """Multicarrier error probability snr^-(l(1-zeta)).

    include_factorial=True applies the 1/l! prefactor of the small-outage
    expansion; at l = 1 both variants coincide with the single-carrier form.
    """
    if not (float(snr) > 0.0):
        raise ConfigError("snr must be positive")
    if int(l) < 1:
        raise ConfigError("l must be >= 1")
    z = float(zeta)
    if not (0.0 <= z < 1.0):
        raise ConfigError("zeta must lie in [0, 1)")
    p = float(snr) ** (-int(l) * (1.0 - z))
    if include_factorial:
        p /= math.factorial(int(l))
    return p


def chi2_density(x: float, l: int) -> float:
    """Density x^(l-1) e^(-x) / (l-1)! of the summed squared gains.

    This is the Gamma(l, 1) density, equivalently a chi-square with 2l degrees
    of freedom after scaling.
    """
    if int(l) < 1:
        raise ConfigError("l must be >= 1")
    xf = float(x)
    if xf < 0.0:
        raise ConfigError("density domain is x >= 0")
    if xf == 0.0:
        return 1.0 if int(l) == 1 else 0.0
    return math.exp((int(l) - 1) * math.log(xf) - xf - math.lgamma(int(l)))


def chi2_density_small_x(x: float, l: int) -> float:
    """Leading term x^(l-1) / (l-1)! of the density near zero."""
    if int(l) < 1:
        raise ConfigError("l must be >= 1")
    xf = float(x)
    if xf < 0.0:
        raise ConfigError("density domain is x >= 0")
    if xf == 0.0:
        return 1.0 if int(l) == 1 else 0.0
    return math.exp((int(l) - 1) * math.log(xf) - math.lgamma(int(l)))


def outage_cdf(threshold: float, l: int, mode: str = "exact") -> float:
    """P[sum of l unit-mean squared gains < threshold].

    exact: regularized lower incomplete gamma P(l, threshold).
    approx: threshold^l / l!, the small-threshold evaluation.
    """
    if int(l) < 1:
        raise ConfigError("l must be >= 1")
    t = float(threshold)
    if t < 0.0:
        raise ConfigError("threshold must be nonnegative")
    if mode == "exact":
        return float(special.gammainc(int(l), t))
    if mode == "approx":
        return t ** int(l) / math.factorial(int(l))
    raise ConfigError(f"unknown outage mode: {mode!r}")


def wilson_interval(errors: int, trials: int, z: float = 1.96):
    """95% Wilson score interval for a binomial proportion.

    Stays valid at the tiny error probabilities measured here, where the
    normal-approximation interval collapses.
    """
    n = int(trials)
    k = int(errors)
    if n < 1:
        raise ConfigError("trials must be >= 1")
    if not (0 <= k <= n):
        raise ConfigError("errors must lie in [0, trials]")
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n)) / denom
    return center - half, center + half


@dataclass(frozen=True)
class ErrorEstimate:
    """Monte Carlo error-probability estimate with a 95% confidence interval."""

    p_hat: float
    trials: int
    ci_low: float
    ci_high: float
    errors_observed: int

    def __post_init__(self):
        if int(self.trials) < 1:
            raise ConfigError("trials must be >= 1")
        if not (0 <= int(self.errors_observed) <= int(self.trials)):
            raise ConfigError("errors_observed must lie in [0, trials]")
        if float(self.p_hat) != int(self.errors_observed) / int(self.trials):
            raise ConfigError("p_hat must equal errors_observed / trials")
        slack = 1e-12
        if not (self.ci_low <= self.p_hat + slack and self.p_hat <= self.ci_high + slack):
            raise ConfigError("confidence interval must contain p_hat")

    @classmethod
    def from_counts(cls, errors: int, trials: int) -> "ErrorEstimate":
        lo, hi = wilson_interval(errors, trials)
        return cls(int(errors) / int(trials), int(trials), lo, hi, int(errors))

    def covers(self, p: float) -> bool:
        return self.ci_low <= float(p) <= self.ci_high


@dataclass(frozen=True)
class MonteCarloConfig:
    """What to sample: event kind, dimensions, thresholds, trial budget, seed.

    event "threshold": aggregate event sum_l |F_i|^2 < threshold
                       (threshold defaults to 1/snr when unset).
    event "rate":      per-sub-channel event log2(1 + |F|^2 * snr) < rate_bits,
                       drawn on one sub-channel per trial.
    """

    l: int
    trials: int
    seed: int
    event: str = "threshold"
    snr: float | None = None
    rate_bits: float | None = None
    threshold: float | None = None

    def __post_init__(self):
        if int(self.l) < 1:
            raise ConfigError("l must be >= 1")
        if int(self.trials) < 1:
            raise ConfigError("trials must be >= 1")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if self.event not in ("threshold", "rate"):
            raise ConfigError("event must be 'threshold' or 'rate'")
        if self.snr is not None and not (float(self.snr) > 0.0):
            raise ConfigError("snr must be positive")
        if self.rate_bits is not None and float(self.rate_bits) < 0.0:
            raise ConfigError("rate_bits must be nonnegative")
        if self.threshold is not None and float(self.threshold) < 0.0:
            raise ConfigError("threshold must be nonnegative")


def _count_batch(args) -> int:
    """Error count for one batch; pure function of its arguments."""
    seed, batch_index, m, l, sigma2_f, threshold = args
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(batch_index),))
    g = np.random.Generator(np.random.Philox(ss))
    re = g.standard_normal((m, l))
    im = g.standard_normal((m, l))
    s = ((re * re + im * im) * (sigma2_f / 2.0)).sum(axis=1)
    return int(np.count_nonzero(s < threshold))


def _resolve_snr_star(config: MonteCarloConfig, noise: NoiseSpec | None) -> float | None:
    """Worst-case SNR for the run; the noise spec is consulted only when the
    config leaves snr unset (unit signal variance convention)."""
    if config.snr is not None:
        return float(config.snr)
    if noise is not None:
        worst = max(noise.sigma2_per_subchannel)
        if worst <= 0.0:
            return None
        return 1.0 / worst
    return None


def _event_geometry(config: MonteCarloConfig, noise: NoiseSpec | None):
    """Reduce the configured event to (draw dimension, magnitude-sum threshold)."""
    snr_star = _resolve_snr_star(config, noise)
    if config.event == "threshold":
        if config.threshold is not None:
            return int(config.l), float(config.threshold)
        if snr_star is None:
            raise ConfigError("threshold event needs an explicit threshold or an snr")
        return int(config.l), 1.0 / snr_star
    # rate event: log2(1 + m*s) < rate  <=>  m < (2^rate - 1) / s
    if config.rate_bits is None:
        raise ConfigError("rate event needs rate_bits")
    if snr_star is None:
        raise ConfigError("rate event needs an snr (directly or via the noise spec)")
    return 1, (2.0 ** float(config.rate_bits) - 1.0) / snr_star


def monte_carlo_p_err(
    config: MonteCarloConfig,
    model: TransmittanceModel,
    noise: NoiseSpec | None = None,
    workers: int = 1,
) -> ErrorEstimate:
    """Estimate the configured error event by sampling the gain model.

    Deterministic given (config, model): identical results for any worker
    count, because batch b always consumes substream (seed, spawn_key=(b,)).
    """
    if int(workers) < 1:
        raise ConfigError("workers must be >= 1")
    l_draw, threshold = _event_geometry(config, noise)
    trials = int(config.trials)

    if model.kind in (FIXED, UNIFORM_PHASE):
        # magnitudes are deterministic for these models, so the event is too
        if model.kind == FIXED:
            if len(model.values) != int(config.l):
                raise ConfigError("fixed model value count must equal l")
            mags2 = [abs(v) ** 2 for v in model.values]
        else:
            mags2 = [float(model.magnitude) ** 2] * int(config.l)
        agg = mags2[0] if config.event == "rate" else sum(mags2)
        errors = trials if agg < threshold else 0
        return ErrorEstimate.from_counts(errors, trials)

    if model.kind != RAYLEIGH:
        raise ConfigError(f"unsupported model kind: {model.kind!r}")

    batches = []
    done = 0
    b = 0
    while done < trials:
        m = min(_BATCH, trials - done)
        batches.append((int(config.seed), b, m, l_draw, float(model.sigma2_f), threshold))
        done += m
        b += 1
    if int(workers) == 1 or len(batches) == 1:
        counts = [_count_batch(args) for args in batches]
    else:
        with multiprocessing.Pool(int(workers)) as pool:
            counts = pool.map(_count_batch, batches)
    return ErrorEstimate.from_counts(sum(counts), trials)


def analytic_event_probability(
    model: TransmittanceModel,
    event: str,
    l: int,
    snr: float | None = None,
    rate_bits: float | None = None,
    threshold: float | None = None,
) -> float:
    """Closed-form probability of the exact event monte_carlo_p_err samples."""
    config = MonteCarloConfig(
        l=l, trials=1, seed=0, event=event, snr=snr, rate_bits=rate_bits, threshold=threshold
    )
    l_draw, t = _event_geometry(config, None)
    if model.kind == RAYLEIGH:
        s2 = float(model.sigma2_f)
        if s2 == 0.0:
            return 1.0 if t > 0.0 else 0.0
        if config.event == "threshold":
            return float(special.gammainc(int(l), t / s2))
        return float(-math.expm1(-t / s2))  # exponential CDF at the rate threshold
    if model.kind == FIXED:
        if len(model.values) != int(l):
            raise ConfigError("fixed model value count must equal l")
        mags2 = [abs(v) ** 2 for v in model.values]
    else:
        mags2 = [float(model.magnitude) ** 2] * int(l)
    agg = mags2[0] if config.event == "rate" else sum(mags2)
    return 1.0 if agg < t else 0.0


def fit_diversity_slope(points) -> float:
    """Diversity order from (snr, p_err) samples: negated log-log LSQ slope.

    Points with p_err = 0 are dropped; fewer than 3 usable points is an
    estimation failure.
    """
    pts = [(float(s), float(p)) for s, p in points]
    if len(pts) < 3:
        raise ConfigError("need at least 3 points")
    snrs = [s for s, _ in pts]
    if any(b <= a for a, b in zip(snrs, snrs[1:])):
        raise ConfigError("snr values must be strictly increasing")
    if any(p < 0.0 for _, p in pts):
        raise ConfigError("p_err must be nonnegative")
    usable = [(s, p) for s, p in pts if p > 0.0]
    if len(usable) < 3:
        raise EstimationError("fewer than 3 points with p_err > 0; cannot fit a slope")
    xs = np.log([s for s, _ in usable])
    ys = np.log([p for _, p in usable])
    return float(-np.polyfit(xs, ys, 1)[0])


@dataclass(frozen=True)
class SlopeScanResult:
    """Monte Carlo sweep over an SNR grid plus the fitted diversity order."""

    snr: tuple
    thresholds: tuple
    estimates: tuple
    slope: float

    def points(self):
        return [(s, e.p_hat) for s, e in zip(self.snr, self.estimates)]


def diversity_slope_scan(
    l: int,
    zeta: float,
    seed: int,
    snr_min: float = 1e2,
    snr_max: float = 1e4,
    num_points: int = 5,
    anchor_probability: float = 0.05,
    target_errors: int = 400,
    min_trials: int = 100000,
    max_trials: int = 2_000_000_000,
    sigma2_f: float = 1.0,
    workers: int = 1,
) -> SlopeScanResult:
    """Measure the error-probability slope of the aggregate outage event.

    The threshold follows t(snr) = t0 * (snr/snr_min)^-(1-zeta), which makes
    the outage probability scale as snr^-(l(1-zeta)) for small t, so the
    fitted slope estimates the multicarrier diversity order.  t0 is placed
    where the outage CDF equals anchor_probability; per-point trial counts
    aim at target_errors expected errors (clamped to [min_trials, max_trials]).
    Point i uses seed + i.
    """
    if int(num_points) < 3:
        raise ConfigError("need at least 3 grid points")
    if not (0.0 < float(anchor_probability) < 1.0):
        raise ConfigError("anchor_probability must lie in (0, 1)")
    if not (0.0 < float(snr_min) < float(snr_max)):
        raise ConfigError("need 0 < snr_min < snr_max")
    if int(target_errors) < 1:
        raise ConfigError("target_errors must be >= 1")
    z = float(zeta)
    if not (0.0 <= z < 1.0):
        raise ConfigError("zeta must lie in [0, 1)")

    snr = np.logspace(math.log10(float(snr_min)), math.log10(float(snr_max)), int(num_points))
    t0 = float(special.gammaincinv(int(l), float(anchor_probability)))
    thr = float(sigma2_f) * t0 * (snr / snr[0]) ** (-(1.0 - z))
    p_pred = special.gammainc(int(l), thr / float(sigma2_f))  # budgeting only

    estimates = []
    for i, (t_i, p_i) in enumerate(zip(thr, p_pred)):
        trials = int(np.clip(np.ceil(int(target_errors) / p_i), int(min_trials), int(max_trials)))
        config = MonteCarloConfig(
            l=int(l), trials=trials, seed=int(seed) + i, event="threshold", threshold=float(t_i)
        )
        estimates.append(
            monte_carlo_p_err(config, TransmittanceModel.rayleigh(sigma2_f), workers=workers)
        )
    slope = fit_diversity_slope([(float(s), e.p_hat) for s, e in zip(snr, estimates)])
    return SlopeScanResult(tuple(float(s) for s in snr), tuple(float(t) for t in thr),
                           tuple(estimates), slope)
