"""Menu planning for two-sided matching markets with MNL customer choice.

Customers pick at most one supplier from the menu they are shown, suppliers
accept each interested customer with a probability that decays in their own
queue length, and the platform's objective is the expected number of matches.
The package provides exact and Monte Carlo evaluators, approximation planners
for the low-value and high-value regimes, allocation upper bounds, a
brute-force oracle for small instances, and a simulation harness.
"""

from .buckets import (
    BucketIndex,
    BucketTable,
    build_buckets,
    cap_high_q,
    clamp_low_q,
)
from .combined import plan, plan_combined, plan_high_value
from .evaluate import (
    EvalResult,
    MCResult,
    exact_expected_matches,
    monte_carlo_expected_matches,
    poisson_binomial,
)
from .harness import GenConfig, TableRow, generate_instance, rows_from_csv, rows_to_csv, run_table
from .highvalue import (
    Allocation,
    WaterfillResult,
    allocation_upper_bound,
    greedy_allocation,
    half_approx_allocation,
    round_relaxation,
    singleton_menus,
    waterfill_relaxation,
)
from ._kernels import backend_name
from .lowvalue import (
    GUARANTEE_FACTOR,
    MENU_MASS_BUDGET,
    FractionalPlan,
    IntegralPlan,
    RegimeError,
    ShowCounts,
    construct_menus,
    lp_upper_bound,
    plan_low_value,
    round_plan,
    solve_lp,
)
from .market import (
    ChoiceDistribution,
    MarketInstance,
    MenuSet,
    Supplier,
    customer_choice_distribution,
    instance_from_dict,
    instance_to_dict,
    menus_from_dict,
    menus_to_dict,
    supplier_match_probability,
    validate,
)
from .oracle import SizeError, brute_force_optimal, hardness_instance

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "BucketIndex",
    "BucketTable",
    "ChoiceDistribution",
    "EvalResult",
    "FractionalPlan",
    "GUARANTEE_FACTOR",
    "GenConfig",
    "IntegralPlan",
    "MCResult",
    "MENU_MASS_BUDGET",
    "MarketInstance",
    "MenuSet",
    "RegimeError",
    "ShowCounts",
    "SizeError",
    "Supplier",
    "TableRow",
    "WaterfillResult",
    "allocation_upper_bound",
    "backend_name",
    "brute_force_optimal",
    "build_buckets",
    "cap_high_q",
    "clamp_low_q",
    "construct_menus",
    "customer_choice_distribution",
    "exact_expected_matches",
    "generate_instance",
    "greedy_allocation",
    "half_approx_allocation",
    "hardness_instance",
    "instance_from_dict",
    "instance_to_dict",
    "lp_upper_bound",
    "menus_from_dict",
    "menus_to_dict",
    "monte_carlo_expected_matches",
    "plan",
    "plan_combined",
    "plan_high_value",
    "plan_low_value",
    "poisson_binomial",
    "round_plan",
    "round_relaxation",
    "rows_from_csv",
    "rows_to_csv",
    "run_table",
    "singleton_menus",
    "solve_lp",
    "supplier_match_probability",
    "validate",
    "waterfill_relaxation",
    "__version__",
]
