"""Multi-resource fair allocation with bounded task counts.

Solvers for the normalized-share max-min family (the max-norm case
generalizes dominant-resource fairness to finite task counts), an
entitlement-floor variant that keeps the sharing incentive under every
norm order, executable fairness checkers, LP efficiency oracles, a
log-utility baseline, and a reproducible benchmark harness.
"""

from .filling import solve_modified_lmmns, solve_waterfilling
from .lmmns import closed_form_ns, oracle_binary_search, solve_lmmns, solve_lmmns_general
from .lp import LinearProgram, simplex_solve, solve_ceei, utilization_lp, welfare_lp
from .model import (
    Allocation,
    ConvergenceError,
    InfeasibleError,
    Instance,
    InvalidInstanceError,
    equal_weights,
    make_allocation,
    make_instance,
    validate,
)
from .norms import ShareProfile, dominant_share, p_norm, weighted_shares
from .properties import (
    ProbeConfig,
    PropertyReport,
    check_bbf,
    check_ef,
    check_pe,
    check_si,
    lexicographic_compare,
    probe_gsp,
)
from .selection import median_select

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "ConvergenceError",
    "InfeasibleError",
    "Instance",
    "InvalidInstanceError",
    "LinearProgram",
    "ProbeConfig",
    "PropertyReport",
    "ShareProfile",
    "check_bbf",
    "check_ef",
    "check_pe",
    "check_si",
    "closed_form_ns",
    "dominant_share",
    "equal_weights",
    "lexicographic_compare",
    "make_allocation",
    "make_instance",
    "median_select",
    "oracle_binary_search",
    "p_norm",
    "probe_gsp",
    "simplex_solve",
    "solve_ceei",
    "solve_lmmns",
    "solve_lmmns_general",
    "solve_modified_lmmns",
    "solve_waterfilling",
    "utilization_lp",
    "validate",
    "weighted_shares",
    "welfare_lp",
]
