"""Coverage and rate of Poisson massive-MIMO cellular networks with pilot contamination."""

__version__ = "0.1.0"

from .analytic import (
    CoverageCurve,
    RateResult,
    SumRateResult,
    coverage_baseline,
    coverage_curve,
    coverage_dl,
    coverage_dl_closed,
    optimal_pilot_length,
    optimal_sum_rate,
    rate_baseline,
    rate_dl,
    sum_rate,
)
from .errors import (
    EmptyPatternError,
    InfiniteSirError,
    InvalidParameterError,
    NumericalFailureError,
    OutOfDomainError,
    WindowTooSmallError,
)
from .monte_carlo import (
    Campaign,
    ConvergenceRow,
    Table1,
    reproduce_table1,
    run_convergence_study,
    run_coverage,
    wilson_interval,
)
from .network_sim import (
    MODES,
    NetworkRealization,
    SimConfig,
    build_realization,
    sir_asymptotic_dl,
    sir_asymptotic_ul,
    sir_baseline_single_antenna,
    sir_finite_dl,
    sir_power_constrained_dl,
)
from .point_process import ORIGIN, Point, PointPattern, nearest_point, path_gain, sample_ppp
from .special_functions import eta, lower_incomplete_gamma, upper_incomplete_gamma
