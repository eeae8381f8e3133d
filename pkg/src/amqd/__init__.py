"""Multicarrier CVQKD transmission chain: transforms, Gaussian sub-channels,
diversity metrics, and error-probability analysis with Monte Carlo checks."""

from .channel import (
    RateAllocation,
    SnrSpec,
    SubchannelSet,
    WorstCaseSet,
    apply_channel,
    end_to_end_roundtrip,
    secret_key_rate,
    worst_case_set,
)
from .config import ExperimentConfig, SnrGrid, parse_model_spec
from .diversity import (
    Constellation,
    DiversityMetrics,
    DiversityParams,
    PermutationConstellation,
    build_permutation_constellation,
    diversity_order,
    exceeds_product_distance_bound,
    normalized_difference,
    product_distance,
    product_distance_bound,
)
from .error_analysis import (
    ErrorEstimate,
    MonteCarloConfig,
    OutageQuery,
    Regime,
    SlopeScanResult,
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
from .exceptions import ConfigError, EstimationError
from .experiments import (
    Table,
    expected_error_warnings,
    gnuplot_script,
    run_analytic_table,
    run_figure2,
    run_monte_carlo,
    write_gnuplot_script,
)
from .sampling import (
    ComplexGaussianSpec,
    NoiseSpec,
    RngStream,
    TransmittanceModel,
    sample_modulation_block,
    sample_modulation_vector,
    sample_noise_block,
    sample_noise_vector,
    sample_transmittances,
)
from .transform import (
    Domain,
    ModulatedVector,
    forward_transform,
    fourier_transmittance,
    inverse_transform,
    unitary_dft,
    unitary_idft,
)
from .validation import ValidationReport, run_validation

__version__ = "0.1.0"
