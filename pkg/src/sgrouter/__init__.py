"""Stochastic-geometry throughput analysis and routing for THz/RF relay networks."""

from .channel import (
    AlphaMuFading,
    Band,
    BandParams,
    ExponentialFading,
    HopLink,
    alpha_mu_ccdf,
    avg_snr,
    hop_throughput_avg,
    hop_throughput_instant,
    sample_fading,
    total_throughput,
    unit_power_snr,
)
from .geometry import (
    DistanceKind,
    DistancePdf,
    PointField,
    Window,
    nearest_to,
    sample_hop_distance,
    sample_ppp,
    sim_window,
    type1_pdf,
    type2_pdf,
)
from .optimizer import (
    NoConvergence,
    NoRoot,
    Regime,
    RegimeViolation,
    RoutePlan,
    Scenario,
    allocate_power,
    allocate_power_high_snr,
    allocate_power_low_snr,
    equal_split_throughput,
    hop_cap,
    hop_cap_bound,
    hop_count_root,
    ideal_route,
    optimal_hop_count,
    stepwise_hop_count,
)
from .analysis import (
    AnalysisConfig,
    HopKind,
    QuadratureFailure,
    analytic_coverage,
    analytic_hop_throughput,
    analytic_total_throughput,
    combine_route_throughput,
    expected_instant_throughput,
    fairness_threshold,
)
from .simulate import (
    Ideal,
    LongHop,
    McSummary,
    RouteFailure,
    ShortHop,
    StepwiseOptimal,
    StepwiseSuboptimal,
    TrialResult,
    default_long_hop,
    monte_carlo,
    plan_route,
    realize_coverage,
    realize_throughput,
    run_trial,
)
from .config import ConfigError, RunConfig, load_config, table1_rf, table1_thz

__version__ = "0.1.0"
