"""Finite-blocklength link analysis for mini-slot OFDM.

Short-packet transmission inside a handful of OFDM symbols leaves little
room for pilots, which makes the classic trade between pilot-assisted
coherent reception and differential (frequency- or time-direction)
signalling sharp enough to matter. This package computes both sides of
that trade: channel-estimation MSE and the effective SNR it implies,
mismatched information density statistics for the differential equivalent
channel, normal-approximation block error rates, and Monte Carlo
converse/achievability bounds that sandwich them. A small CLI drives
parameter sweeps, scheme selection and Doppler crossover searches from
JSON scenarios.
"""

from .channel import (
    ChannelGrid,
    DopplerSpec,
    PowerDelayProfile,
    exponential_pdp,
    freq_correlation,
    sample_channel_grid,
    sample_channel_grids,
    time_correlation,
    time_freq_correlation,
)
from .grid import (
    FDDI,
    MINI_SLOT_LENGTHS,
    PA,
    SCHEMES,
    TDDI,
    Constellation,
    MiniSlotGrid,
    PilotPattern,
    ReClass,
    SchemeConfig,
    classify,
    data_symbol_count,
    default_constellation,
    match_coding_rates,
    psk,
    qam,
    standard_pattern,
)
from .modem import (
    DegenerateEstimateError,
    DiffDecision,
    RxGrid,
    SymbolGrid,
    coherent_detect,
    differential_detect,
    differential_encode,
    fast_rx,
    ofdm_time_domain_chain,
)
from .chanest import (
    EstimationCollapseError,
    MseBreakdown,
    MseMeasurement,
    PilotCovariance,
    average_mse,
    channel_estimation_mse,
    effective_snr,
    interpolate_linear,
    lmmse_estimate,
    measure_mse,
    phi_linear,
    phi_lmmse,
    phi_region_a,
    phi_region_b,
    pilot_covariance,
)
from .fbl import (
    DiffChannelParams,
    FblResult,
    InfeasiblePayloadError,
    IvEstimate,
    ModelFidelityWarning,
    awgn_capacity_dispersion,
    coherent_capacity_dispersion,
    diff_capacity_dispersion,
    diff_transition_logpdf,
    fddi_correlation,
    normal_approx_bler,
    sample_coherent_density,
    sample_diff_density,
    scheme_fbl,
    tddi_correlation,
)
from .bounds import (
    BoundEstimate,
    block_density_samples,
    dt_upper_bound,
    is_lower_bound,
    sample_block_density,
)
from .cli import (
    ConfigError,
    Recommendation,
    Scenario,
    doppler_crossover,
    run_sweep,
    select_scheme,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # channel
    "ChannelGrid", "DopplerSpec", "PowerDelayProfile", "exponential_pdp",
    "freq_correlation", "sample_channel_grid", "sample_channel_grids",
    "time_correlation", "time_freq_correlation",
    # grid
    "FDDI", "MINI_SLOT_LENGTHS", "PA", "SCHEMES", "TDDI", "Constellation",
    "MiniSlotGrid", "PilotPattern", "ReClass", "SchemeConfig", "classify",
    "data_symbol_count", "default_constellation", "match_coding_rates",
    "psk", "qam", "standard_pattern",
    # modem
    "DegenerateEstimateError", "DiffDecision", "RxGrid", "SymbolGrid",
    "coherent_detect", "differential_detect", "differential_encode",
    "fast_rx", "ofdm_time_domain_chain",
    # chanest
    "EstimationCollapseError", "MseBreakdown", "MseMeasurement",
    "PilotCovariance", "average_mse", "channel_estimation_mse",
    "effective_snr", "interpolate_linear", "lmmse_estimate", "measure_mse",
    "phi_linear", "phi_lmmse", "phi_region_a", "phi_region_b",
    "pilot_covariance",
    # fbl
    "DiffChannelParams", "FblResult", "InfeasiblePayloadError", "IvEstimate",
    "ModelFidelityWarning", "awgn_capacity_dispersion",
    "coherent_capacity_dispersion", "diff_capacity_dispersion",
    "diff_transition_logpdf", "fddi_correlation", "normal_approx_bler",
    "sample_coherent_density", "sample_diff_density", "scheme_fbl",
    "tddi_correlation",
    # bounds
    "BoundEstimate", "block_density_samples", "dt_upper_bound",
    "is_lower_bound", "sample_block_density",
    # cli
    "ConfigError", "Recommendation", "Scenario", "doppler_crossover",
    "run_sweep", "select_scheme",
]
