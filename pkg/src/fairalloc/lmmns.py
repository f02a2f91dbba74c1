"""Threshold solvers for lexicographically max-min normalized shares.

The optimum has a flat structure: there is one scalar level NS* such that
every user sits at min(NS_i^max, NS*).  The fast engine finds NS* by median
pruning: each round it tests feasibility at the median of the undecided
share caps, then discards half of them, folding users decided "capped" into
spent capacity and users decided "at the level" into one aggregated linear
coefficient per resource.  Total work is O(m n).

A bisection engine over the same structure acts as an independent oracle,
and a multi-round driver extends both to instances with zero demand
entries: when a resource saturates, only the users that touch it freeze;
everyone else keeps growing against the leftover capacity (at most one
round per resource).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import Allocation, Instance, InfeasibleError, make_allocation, require_valid
from .norms import ShareProfile, weighted_shares
from .selection import median_select

# Absolute slack for feasibility and saturation comparisons inside solvers.
SOLVER_TOL = 1e-9
# Coefficients below this are treated as structurally zero.
COEFF_TOL = 1e-15


@dataclass
class SolverState:
    """Classification state of the median-pruning engine.

    ``undecided``, ``dummy`` and ``capped`` always partition the users the
    engine was started with; ``remaining_capacity`` is the round capacity
    minus the full consumption of every user already classified capped; and
    ``mu[j]`` accumulates demands[i, j] / norm_per_task[i] over the dummy set.
    """

    undecided: np.ndarray
    remaining_capacity: np.ndarray
    mu: np.ndarray
    dummy: list[int] = field(default_factory=list)
    capped: list[int] = field(default_factory=list)


def closed_form_ns(
    inst: Instance,
    dummy_set,
    capped_set,
    capacity=None,
    profile: ShareProfile | None = None,
) -> float:
    """Common level for the dummy users once every cap decision is made.

    Evaluates min_j (capacity_j - sum_{i capped} demands[i, j] * bounds[i])
    over mu_j, where mu aggregates the dummy users' demand per unit of
    normalized share.  Resources with mu_j ~ 0 are skipped (irrelevant to the
    dummy users); a numerator that is negative beyond tolerance is an error,
    and one negative within tolerance clamps the level to zero.
    """
    dummy = np.asarray(list(dummy_set), dtype=int)
    capped = np.asarray(list(capped_set), dtype=int)
    if dummy.size == 0:
        raise ValueError("closed_form_ns needs a non-empty dummy set")
    if np.intersect1d(dummy, capped).size:
        raise ValueError("dummy and capped sets must be disjoint")
    if profile is None:
        profile = weighted_shares(inst)
    cap = np.ones(inst.n_resources) if capacity is None else np.asarray(capacity, dtype=float)
    numer = cap.copy()
    if capped.size:
        numer = numer - inst.bounds[capped] @ inst.demands[capped]
    if np.any(numer < -1e-6):
        raise ValueError("capped set oversubscribes a resource; sets are inconsistent")
    mu = (inst.demands[dummy] / profile.norm_per_task[dummy, None]).sum(axis=0)
    live = mu > COEFF_TOL
    if not live.any():
        raise InfeasibleError(
            "dummy users touch no constrained resource; cap them at their share limit"
        )
    return max(float((numer[live] / mu[live]).min()), 0.0)


def _alg1_threshold(
    demands: np.ndarray,
    bounds: np.ndarray,
    norm_pt: np.ndarray,
    ns_max: np.ndarray,
    active: np.ndarray,
    capacity: np.ndarray,
    trace: list | None = None,
) -> tuple[float, SolverState]:
    """Median-pruning engine: max common level for ``active`` vs ``capacity``.

    Returns (level, state).  The level is ``math.inf`` when every active user
    caps out before any resource binds.
    """
    m = demands.shape[1]
    state = SolverState(
        undecided=active.copy(),
        remaining_capacity=np.asarray(capacity, dtype=float).copy(),
        mu=np.zeros(m),
    )
    idx = active.copy()
    while idx.size:
        vals = ns_max[idx]
        med = median_select(vals, (idx.size + 1) // 2)
        feasible = False
        if math.isfinite(med):
            trial_x = np.minimum(bounds[idx], med / norm_pt[idx])
            load = trial_x @ demands[idx] + med * state.mu
            feasible = bool(np.all(load <= state.remaining_capacity + SOLVER_TOL))
        if feasible:
            sel = vals <= med
            chosen = idx[sel]
            state.remaining_capacity -= bounds[chosen] @ demands[chosen]
            np.maximum(state.remaining_capacity, 0.0, out=state.remaining_capacity)
            state.capped.extend(chosen.tolist())
        else:
            sel = vals >= med
            chosen = idx[sel]
            state.mu += (demands[chosen] / norm_pt[chosen, None]).sum(axis=0)
            state.dummy.extend(chosen.tolist())
        idx = idx[~sel]
        state.undecided = idx
        if trace is not None:
            trace.append(
                (
                    idx.copy(),
                    tuple(state.dummy),
                    tuple(state.capped),
                    state.remaining_capacity.copy(),
                    state.mu.copy(),
                )
            )
    if not state.dummy:
        return math.inf, state
    live = state.mu > COEFF_TOL
    if not live.any():
        raise InfeasibleError("level users touch no constrained resource")
    level = float((state.remaining_capacity[live] / state.mu[live]).min())
    return max(level, 0.0), state


def _bisect_threshold(
    demands: np.ndarray,
    bounds: np.ndarray,
    norm_pt: np.ndarray,
    ns_max: np.ndarray,
    active: np.ndarray,
    capacity: np.ndarray,
    tol: float,
) -> float:
    """Bisection engine over the same level structure; the independent oracle."""
    d = demands[active]
    b = bounds[active]
    npt = norm_pt[active]
    caps = ns_max[active]
    rc = np.asarray(capacity, dtype=float)

    def feasible(level: float) -> bool:
        load = np.minimum(b, level / npt) @ d
        return bool(np.all(load <= rc + SOLVER_TOL))

    finite = caps[np.isfinite(caps)]
    if finite.size == caps.size and feasible(float(finite.max()) if finite.size else 0.0):
        return math.inf
    hi = max(1.0, 2.0 * float(finite.max())) if finite.size else 1.0
    guard = 0
    while feasible(hi):
        hi *= 2.0
        guard += 1
        if guard > 200:
            raise RuntimeError("bisection upper bound did not close")
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    # refine via the exact ratio once the capped/level split is stable
    mid = 0.5 * (lo + hi)
    capped_sel = caps <= mid
    level_sel = ~capped_sel
    if level_sel.any():
        numer = rc - (b[capped_sel] @ d[capped_sel] if capped_sel.any() else 0.0)
        mu = (d[level_sel] / npt[level_sel, None]).sum(axis=0)
        live = mu > COEFF_TOL
        if live.any():
            cand = max(float((numer[live] / mu[live]).min()), 0.0)
            if lo - tol <= cand <= hi + tol and feasible(min(cand, hi)):
                return cand
    return lo


def solve_lmmns(inst: Instance) -> Allocation:
    """Max-min optimal allocation for an instance with all-positive demands.

    Zero demand entries break the single-level structure; route those
    instances through :func:`solve_lmmns_general`.
    """
    require_valid(inst)
    if np.any(inst.demands <= 0.0):
        raise ValueError("instance has zero demand entries; use solve_lmmns_general")
    prof = weighted_shares(inst)
    level, _ = _alg1_threshold(
        inst.demands,
        inst.bounds,
        prof.norm_per_task,
        prof.ns_max,
        np.arange(inst.n_users),
        np.ones(inst.n_resources),
    )
    if math.isinf(level):
        x = inst.bounds.copy()
    else:
        x = np.minimum(inst.bounds, level / prof.norm_per_task)
    return make_allocation(inst, x)


def solve_lmmns_general(inst: Instance) -> Allocation:
    """Multi-round solver; accepts zero demand entries."""
    require_valid(inst)
    return _solve_rounds(inst, engine="alg1")


def oracle_binary_search(inst: Instance, tol: float = 1e-9) -> Allocation:
    """Independent bisection-based solver used to cross-check the fast engine."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    require_valid(inst)
    return _solve_rounds(inst, engine="bisect", tol=tol)


def _solve_rounds(inst: Instance, engine: str, tol: float = 1e-9) -> Allocation:
    prof = weighted_shares(inst)
    n, m = inst.n_users, inst.n_resources
    demands, bounds, norm_pt, ns_max = inst.demands, inst.bounds, prof.norm_per_task, prof.ns_max
    x = np.zeros(n)
    active = np.arange(n)
    capacity = np.ones(m)
    saturated = np.zeros(m, dtype=bool)
    rounds = 0
    while active.size:
        rounds += 1
        if rounds > n + m + 1:
            raise RuntimeError("round count exceeded n + m; solver stuck")
        if engine == "alg1":
            level, _ = _alg1_threshold(demands, bounds, norm_pt, ns_max, active, capacity)
        else:
            level = _bisect_threshold(demands, bounds, norm_pt, ns_max, active, capacity, tol)
        if math.isinf(level):
            x_act = bounds[active].copy()
        else:
            x_act = np.minimum(bounds[active], level / norm_pt[active])
        load = x_act @ demands[active]
        newly_sat = ~saturated & (capacity - load <= SOLVER_TOL)
        capped_now = ns_max[active] <= level + SOLVER_TOL
        if newly_sat.any():
            frozen = capped_now | (demands[active][:, newly_sat] > 0).any(axis=1)
        else:
            frozen = capped_now
        if not frozen.any():
            raise RuntimeError("no user froze at the round level; solver stuck")
        hold = active[frozen]
        x[hold] = x_act[frozen]
        capacity = np.maximum(capacity - x_act[frozen] @ demands[hold], 0.0)
        saturated |= newly_sat
        active = active[~frozen]
    return make_allocation(inst, x)
