"""MDS-coded cache placement for small-cell networks under eavesdropping constraints."""
from .model import (
    CoverageProfile,
    Kind,
    Library,
    Placement,
    PopularityProfile,
    ScenarioSpec,
    eta,
    zipf_popularity,
)
from .geometry import GridTopology, build_grid, coverage_count, estimate_gamma
from .optimizer import (
    Bounds,
    QuantizationError,
    SolveResult,
    backhaul_rate,
    grid_oracle_solve,
    quantize,
    scenario_bounds,
    solve_placement,
)
from .secrecy import (
    SecrecyReport,
    check_s1_general,
    check_s1_worstcase,
    check_s2,
    max_cache_size_s2,
    min_cache_size_s1,
)
from .simulate import RequestMode, SimConfig, SimReport, breach_probability_s1, simulate_delivery

__version__ = "0.1.0"
