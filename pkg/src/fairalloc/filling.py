"""Progressive-filling solvers.

Two solvers share the water level picture: every unfrozen user's normalized
share rises together, and users drop out at discrete events.

``solve_waterfilling`` reproduces the plain max-min optimum.  When a
resource fills up only the users that actually consume it freeze; the rest
keep rising, so it agrees with the multi-round solver on instances with
zero demand entries.

``solve_modified_lmmns`` adds per-user share floors that guarantee each
user at least a 1/n entitlement on its dominant resource.  Its solution is
the single level t* maximizing feasibility of clamp(t, floor_i, cap_i): all
users stop at the first level where a binding resource fills, users below
their floor stay pinned at the floor, users above their cap stay at the
cap.  Events are solved in closed form rather than stepped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import Allocation, Instance, InfeasibleError, make_allocation, require_valid
from .norms import weighted_shares

EVENT_TOL = 1e-9
COEFF_TOL = 1e-15

FROZE_AT_CAP = "cap"
FROZE_AT_SATURATION = "saturation"
FROZE_AT_FLOOR = "floor"


@dataclass
class FillState:
    """Trace of one progressive-filling run."""

    level: float = 0.0
    frozen_ns: dict[int, float] = field(default_factory=dict)
    freeze_reason: dict[int, str] = field(default_factory=dict)
    growing: list[int] = field(default_factory=list)
    events: int = 0


def solve_waterfilling(inst: Instance, state: FillState | None = None) -> Allocation:
    """Plain max-min optimum via event-driven water filling."""
    require_valid(inst)
    prof = weighted_shares(inst)
    n, m = inst.n_users, inst.n_resources
    demands, bounds = inst.demands, inst.bounds
    norm_pt, ns_max = prof.norm_per_task, prof.ns_max
    if state is None:
        state = FillState()
    state.growing = list(range(n))

    x = np.zeros(n)
    frozen_load = np.zeros(m)
    saturated = np.zeros(m, dtype=bool)
    growing = np.arange(n)
    level = 0.0
    while growing.size:
        state.events += 1
        if state.events > 2 * n + 1:
            raise RuntimeError("too many fill events; solver stuck")
        nu = (demands[growing] / norm_pt[growing, None]).sum(axis=0)
        nu[saturated] = 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            sat_levels = np.where(nu > COEFF_TOL, (1.0 - frozen_load) / np.where(nu > COEFF_TOL, nu, 1.0), math.inf)
        sat_levels = np.maximum(sat_levels, level)
        cap_level = float(ns_max[growing].min())
        nxt = min(cap_level, float(sat_levels.min()))
        if not math.isfinite(nxt):
            raise RuntimeError("no freeze event exists; solver stuck")
        nxt = max(nxt, level)
        tol = EVENT_TOL * max(1.0, nxt)
        newly_sat = ~saturated & (sat_levels <= nxt + tol)
        hit_cap = ns_max[growing] <= nxt + tol
        if newly_sat.any():
            freeze = hit_cap | (demands[growing][:, newly_sat] > 0).any(axis=1)
        else:
            freeze = hit_cap
        if not freeze.any():
            raise RuntimeError("fill event froze nobody; solver stuck")
        held = growing[freeze]
        x[held] = np.minimum(bounds[held], nxt / norm_pt[held])
        frozen_load += x[held] @ demands[held]
        for k, i in enumerate(held.tolist()):
            state.frozen_ns[i] = float(norm_pt[i] * x[i])
            state.freeze_reason[i] = (
                FROZE_AT_CAP if hit_cap[freeze][k] else FROZE_AT_SATURATION
            )
        saturated |= newly_sat
        growing = growing[~freeze]
        level = nxt
        state.level = level
        state.growing = growing.tolist()
    return make_allocation(inst, x)


def share_floors(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Per-user task floors 1 / (n * dominant demand) and their share levels."""
    prof = weighted_shares(inst)
    n = inst.n_users
    r_dom = inst.demands[np.arange(n), prof.dominant_resource]
    x_floor = 1.0 / (n * r_dom)
    return x_floor, prof.norm_per_task * x_floor


def solve_modified_lmmns(inst: Instance, state: FillState | None = None) -> Allocation:
    """Max-min optimum over allocations that keep every user above its floor.

    Raises :class:`InfeasibleError` when some floor exceeds the user's task
    bound or the floor allocation alone oversubscribes a resource.
    """
    require_valid(inst)
    prof = weighted_shares(inst)
    n = inst.n_users
    x_floor, ns_min = share_floors(inst)
    short = np.where(inst.bounds < x_floor - EVENT_TOL)[0]
    if short.size:
        i = int(short[0])
        raise InfeasibleError(
            f"user {i}: task floor {x_floor[i]:.6g} exceeds its bound {inst.bounds[i]:.6g}"
        )
    floor_load = x_floor @ inst.demands
    if np.any(floor_load > 1.0 + EVENT_TOL):
        j = int(np.argmax(floor_load))
        raise InfeasibleError(
            f"floor allocation oversubscribes resource {j}: {floor_load[j]:.6g} > 1"
        )
    ns_min = np.minimum(ns_min, prof.ns_max)  # guard caps equal to floors within tolerance
    level = _clamped_level(inst.demands, prof.norm_per_task, ns_min, prof.ns_max)
    x = np.clip(level, ns_min, prof.ns_max) / prof.norm_per_task
    x = np.minimum(x, inst.bounds)
    if state is not None:
        state.level = level if math.isfinite(level) else float(np.max(prof.ns_max[np.isfinite(prof.ns_max)], initial=0.0))
        for i in range(n):
            state.frozen_ns[i] = float(prof.norm_per_task[i] * x[i])
            if level < ns_min[i] - EVENT_TOL:
                state.freeze_reason[i] = FROZE_AT_FLOOR
            elif prof.ns_max[i] <= level + EVENT_TOL:
                state.freeze_reason[i] = FROZE_AT_CAP
            else:
                state.freeze_reason[i] = FROZE_AT_SATURATION
    return make_allocation(inst, x)


def _clamped_level(demands, norm_pt, ns_min, ns_max) -> float:
    """Largest t with sum_i demands[i] * clamp(t, ns_min, ns_max) / norm <= 1.

    Per-resource consumption is piecewise linear and nondecreasing in t, so
    the first infeasible breakpoint is found by bisection over the sorted
    breakpoints and the exact level by interpolating within one segment.
    """

    def load(t: float) -> np.ndarray:
        return (np.clip(t, ns_min, ns_max) / norm_pt) @ demands

    def ok(t: float) -> bool:
        return bool(np.all(load(t) <= 1.0 + EVENT_TOL))

    points = np.unique(np.concatenate([ns_min, ns_max[np.isfinite(ns_max)]]))
    lo_t, lo_load = 0.0, load(0.0)
    if points.size and not ok(float(points[-1])):
        # bisect for the first infeasible breakpoint
        lo, hi = -1, points.size - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(float(points[mid])):
                lo = mid
            else:
                hi = mid
        if lo >= 0:
            lo_t, lo_load = float(points[lo]), load(float(points[lo]))
        hi_t = float(points[hi])
        return _segment_level(lo_t, lo_load, hi_t, load(hi_t))
    # feasible through every finite breakpoint: only unbounded users still grow
    if points.size:
        lo_t, lo_load = float(points[-1]), load(float(points[-1]))
    unbounded = np.isinf(ns_max)
    slope = (demands[unbounded] / norm_pt[unbounded, None]).sum(axis=0) if unbounded.any() else np.zeros(demands.shape[1])
    live = slope > COEFF_TOL
    if not live.any():
        return math.inf  # everyone caps out; no resource ever binds
    room = (1.0 - lo_load[live]) / slope[live]
    return lo_t + max(float(room.min()), 0.0)


def _segment_level(a: float, load_a: np.ndarray, b: float, load_b: np.ndarray) -> float:
    """Exact crossing of the first constraint inside the segment [a, b]."""
    best = b
    for j in range(load_a.size):
        if load_b[j] > 1.0 + EVENT_TOL and load_b[j] > load_a[j] + COEFF_TOL:
            t = a + (1.0 - load_a[j]) * (b - a) / (load_b[j] - load_a[j])
            best = min(best, t)
    return max(best, a)
