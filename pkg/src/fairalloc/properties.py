"""Executable fairness checks: efficiency, sharing incentive, envy,
bottleneck coverage, lexicographic comparison, and a falsification probe
for coalition manipulation.

Checkers operate on a concrete (instance, allocation) pair and return a
:class:`PropertyReport` whose witness, present exactly when the property
fails, contains enough numbers to re-verify the violation by hand.  The
manipulation probe is different in kind: it samples misreport scenarios
against a mechanism and can only ever falsify, never prove.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import Allocation, InfeasibleError, Instance

PROPERTY_TOL = 1e-7

LESS, EQUAL, GREATER = -1, 0, 1


@dataclass(frozen=True)
class PropertyReport:
    name: str
    holds: bool
    witness: dict | None
    tolerance: float

    def to_json(self) -> dict:
        return {
            "property": self.name,
            "holds": self.holds,
            "witness": self.witness,
            "tolerance": self.tolerance,
        }


def _require_feasible(inst: Instance, alloc: Allocation) -> None:
    x = alloc.tasks
    if x.shape != (inst.n_users,):
        raise ValueError("allocation does not match the instance")
    if np.any(x < -1e-9) or np.any(x > inst.bounds + 1e-9):
        raise ValueError("allocation violates task bounds")
    if np.any(alloc.consumption > 1.0 + 1e-9):
        raise ValueError("allocation oversubscribes a resource")


def check_pe(inst: Instance, alloc: Allocation, tol: float = PROPERTY_TOL) -> PropertyReport:
    """No user below its bound can grow without displacing someone else.

    Holds iff every user with slack under its bound touches (demands) some
    saturated resource.
    """
    _require_feasible(inst, alloc)
    saturated = alloc.consumption >= 1.0 - tol
    below_bound = alloc.tasks < inst.bounds - tol
    blocked = (inst.demands[:, saturated] > 0).any(axis=1) if saturated.any() else np.zeros(inst.n_users, bool)
    growable = below_bound & ~blocked
    if not growable.any():
        return PropertyReport("pe", True, None, tol)
    i = int(np.argmax(growable))
    pos = inst.demands[i] > 0
    headroom = float(((1.0 - alloc.consumption[pos]) / inst.demands[i][pos]).min())
    return PropertyReport(
        "pe",
        False,
        {
            "user": i,
            "tasks": float(alloc.tasks[i]),
            "bound": float(inst.bounds[i]),
            "extra_tasks_available": headroom,
        },
        tol,
    )


def check_si(inst: Instance, alloc: Allocation, tol: float = PROPERTY_TOL) -> PropertyReport:
    """Every user is fully served or holds at least its entitlement somewhere.

    Holds iff for each user either tasks reach the bound or some resource j
    has demands[i, j] * x_i >= weights[i, j].
    """
    _require_feasible(inst, alloc)
    x = alloc.tasks
    at_bound = x >= inst.bounds - tol
    held = inst.demands * x[:, None]
    entitled = (held >= inst.weights - tol).any(axis=1)
    bad = ~(at_bound | entitled)
    if not bad.any():
        return PropertyReport("si", True, None, tol)
    i = int(np.argmax(bad))
    return PropertyReport(
        "si",
        False,
        {
            "user": i,
            "tasks": float(x[i]),
            "bound": float(inst.bounds[i]),
            "held_fractions": held[i].tolist(),
            "entitlements": inst.weights[i].tolist(),
        },
        tol,
    )


def check_ef(inst: Instance, alloc: Allocation, tol: float = PROPERTY_TOL) -> PropertyReport:
    """No user below its bound prefers another user's scaled bundle.

    User i envies k when k's weighted share strictly exceeds i's on every
    resource; the check passes iff no such pair exists with x_i below its
    bound.
    """
    _require_feasible(inst, alloc)
    ws_held = (inst.demands / inst.weights) * alloc.tasks[:, None]
    below_bound = alloc.tasks < inst.bounds - tol
    for i in np.where(below_bound)[0]:
        fine = (ws_held[int(i)][None, :] >= ws_held - tol).any(axis=1)
        if not fine.all():
            k = int(np.argmin(fine))
            return PropertyReport(
                "ef",
                False,
                {
                    "user": int(i),
                    "envies": k,
                    "own_weighted_shares": ws_held[int(i)].tolist(),
                    "their_weighted_shares": ws_held[k].tolist(),
                },
                tol,
            )
    return PropertyReport("ef", True, None, tol)


def check_bbf(inst: Instance, alloc: Allocation, tol: float = PROPERTY_TOL) -> PropertyReport:
    """Every user is fully served or gets its entitlement on a bottleneck.

    A bottleneck is a saturated resource; full service means reaching the
    task bound (finite bounds fold into demands as one unit of work).
    """
    _require_feasible(inst, alloc)
    x = alloc.tasks
    saturated = alloc.consumption >= 1.0 - tol
    served = x >= inst.bounds - tol
    if saturated.any():
        covered = (
            (inst.demands[:, saturated] * x[:, None]) >= (inst.weights[:, saturated] - tol)
        ).any(axis=1)
    else:
        covered = np.zeros(inst.n_users, bool)
    bad = ~(served | covered)
    if not bad.any():
        return PropertyReport("bbf", True, None, tol)
    i = int(np.argmax(bad))
    return PropertyReport(
        "bbf",
        False,
        {
            "user": i,
            "tasks": float(x[i]),
            "bound": float(inst.bounds[i]),
            "saturated_resources": np.where(saturated)[0].tolist(),
            "held_fractions": (inst.demands[i] * x[i]).tolist(),
            "entitlements": inst.weights[i].tolist(),
        },
        tol,
    )


def lexicographic_compare(ns_a, ns_b, tol: float = 1e-9) -> int:
    """Compare two share vectors sorted ascending; -1/0/+1 with tolerant ties."""
    a = np.sort(np.asarray(ns_a, dtype=float))
    b = np.sort(np.asarray(ns_b, dtype=float))
    if a.shape != b.shape:
        raise ValueError("share vectors must have equal length")
    for ai, bi in zip(a, b):
        if ai < bi - tol:
            return LESS
        if ai > bi + tol:
            return GREATER
    return EQUAL


# --- manipulation probe ------------------------------------------------------


@dataclass(frozen=True)
class ProbeConfig:
    """Misreport sampling plan for :func:`probe_gsp`.

    Coalitions of the given sizes are enumerated (or sampled down to
    ``max_coalitions``).  Each coalition tries: every grid multiplier applied
    to all its demands, to one resource column at a time, and to its bounds;
    plus ``n_random`` scenarios with independent log-uniform multipliers in
    [0.1, 10] per member and coordinate.  Everything is seeded.
    """

    coalition_sizes: tuple[int, ...] = (1, 2, 3)
    grid: tuple[float, ...] = (0.25, 0.5, 0.9, 1.1, 2.0, 4.0, 10.0)
    n_random: int = 50
    seed: int = 0
    max_coalitions: int | None = 200


def true_task_gain(inst: Instance, member: int, reported_demands_row, reported_tasks: float) -> float:
    """Tasks the member can truly run from the bundle a misreport earned it.

    The bundle is reported demand times reported task count per resource; the
    member's real tasks are limited by the scarcest resource it actually
    needs, and capped at its true bound (extra tasks beyond the bound are
    worthless).
    """
    bundle = np.asarray(reported_demands_row, dtype=float) * reported_tasks
    need = inst.demands[member]
    pos = need > 0
    true_tasks = float((bundle[pos] / need[pos]).min())
    return min(true_tasks, float(inst.bounds[member]))


def evaluate_misreport(inst: Instance, solver, coalition, demands_bar, bounds_bar=None, tol: float = PROPERTY_TOL):
    """Solve one falsified instance and report each member's true task change.

    Returns (profitable, gains) where gains maps member -> (before, after).
    Profitable means every member strictly gains.
    """
    base = solver(inst)
    return _evaluate_against_base(inst, solver, base, coalition, demands_bar, bounds_bar, tol)


def _evaluate_against_base(inst, solver, base, coalition, demands_bar, bounds_bar, tol):
    coalition = tuple(int(i) for i in coalition)
    new_demands = inst.demands.copy()
    for i in coalition:
        new_demands[i] = demands_bar[i]
    new_bounds = inst.bounds.copy() if bounds_bar is None else np.asarray(bounds_bar, dtype=float)
    lied = Instance(demands=new_demands, weights=inst.weights, bounds=new_bounds, p=inst.p)
    try:
        bar = solver(lied)
    except InfeasibleError:
        # the mechanism rejects the falsified instance, so the deviation
        # simply is not available to the coalition
        return False, {i: (min(float(base.tasks[i]), float(inst.bounds[i])),) * 2 for i in coalition}
    gains = {}
    profitable = True
    for i in coalition:
        before = min(float(base.tasks[i]), float(inst.bounds[i]))
        after = true_task_gain(inst, i, new_demands[i], float(bar.tasks[i]))
        gains[i] = (before, after)
        if not after > before + tol:
            profitable = False
    return profitable, gains


def probe_gsp(inst: Instance, solver, config: ProbeConfig | None = None, tol: float = PROPERTY_TOL) -> PropertyReport:
    """Search for a coalition misreport that strictly raises every member's
    true task count.  Holds means no sampled deviation was profitable; this
    falsifies manipulability, it does not prove immunity.
    """
    cfg = config or ProbeConfig()
    base = solver(inst)
    n = inst.n_users
    coalitions = _coalitions(n, cfg.coalition_sizes, cfg.max_coalitions, cfg.seed)
    checked = 0
    for c_idx, coalition in enumerate(coalitions):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(c_idx,)))
        for label, demands_bar, bounds_bar in _scenarios(inst, coalition, cfg, rng):
            checked += 1
            profitable, gains = _evaluate_against_base(
                inst, solver, base, coalition, demands_bar, bounds_bar, tol
            )
            if profitable:
                return PropertyReport(
                    "gsp-probe",
                    False,
                    {
                        "coalition": list(coalition),
                        "scenario": label,
                        "reported_demands": {i: demands_bar[i].tolist() for i in coalition},
                        "reported_bounds": None
                        if bounds_bar is None
                        else {i: float(bounds_bar[i]) for i in coalition},
                        "true_tasks": {i: list(gains[i]) for i in coalition},
                        "scenarios_checked": checked,
                    },
                    tol,
                )
    return PropertyReport("gsp-probe", True, None, tol)


def _coalitions(n, sizes, limit, seed):
    everyone = []
    for s in sizes:
        if s > n:
            continue
        everyone.extend(itertools.combinations(range(n), s))
    if limit is not None and len(everyone) > limit:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0xC0A1,)))
        picked = rng.choice(len(everyone), size=limit, replace=False)
        everyone = [everyone[int(k)] for k in np.sort(picked)]
    return everyone


def _scenarios(inst: Instance, coalition, cfg: ProbeConfig, rng):
    """Yield (label, full demand matrix rows for members, bounds or None)."""
    base_d = inst.demands
    for g in cfg.grid:
        bar = {i: np.minimum(base_d[i] * g, 1.0) for i in coalition}
        yield f"demands*{g}", bar, None
    for j in range(inst.n_resources):
        for g in cfg.grid:
            bar = {}
            ok = True
            for i in coalition:
                row = base_d[i].copy()
                row[j] = min(row[j] * g, 1.0)
                if not (row > 0).any():
                    ok = False
                    break
                bar[i] = row
            if ok:
                yield f"resource[{j}]*{g}", bar, None
    for g in cfg.grid:
        bounds_bar = inst.bounds.copy()
        for i in coalition:
            bounds_bar[i] = inst.bounds[i] * g
        yield f"bounds*{g}", {i: base_d[i].copy() for i in coalition}, bounds_bar
    for k in range(cfg.n_random):
        bar = {}
        for i in coalition:
            mult = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=inst.n_resources))
            bar[i] = np.minimum(base_d[i] * mult, 1.0)
        bounds_bar = inst.bounds.copy()
        for i in coalition:
            if math.isfinite(inst.bounds[i]):
                bounds_bar[i] = inst.bounds[i] * float(
                    np.exp(rng.uniform(math.log(0.1), math.log(10.0)))
                )
        yield f"random[{k}]", bar, bounds_bar
