"""Domain model for bounded multi-resource allocation on a single server.

An instance describes n users sharing m divisible resources.  Each task of
user i consumes a fixed fraction ``demands[i, j]`` of resource j, user i is
entitled to a ``weights[i, j]`` share of resource j (columns sum to one),
and at most ``bounds[i]`` tasks (possibly infinite) are useful to the user.
Tasks are divisible, so allocations are nonnegative real task counts.

Instances and allocations freeze their arrays after validation, so they
are safe to share across threads; solvers never mutate their inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

# Column sums of the weight matrix must match 1 this closely.
WEIGHT_SUM_TOL = 1e-6
# Feasibility slack honoured by allocation invariants and the solvers.
FEAS_TOL = 1e-9

SCHEMA_VERSION = 1


class InvalidInstanceError(ValueError):
    """An instance failed validation; ``violations`` lists every failure."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid instance: " + "; ".join(self.violations))


class InfeasibleError(ValueError):
    """The constraint system of a solver admits no feasible allocation."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before reaching its residual target."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class Instance:
    """One server: per-task demands, entitlement weights, task bounds, norm order.

    ``p`` selects how a user's per-task weighted-share vector is collapsed to
    a scalar: a finite order >= 1, or ``math.inf`` for the max (the dominant
    share).  Infinity is an exact case, never approximated by a large finite
    order.
    """

    demands: np.ndarray  # (n, m), fractions in [0, 1]
    weights: np.ndarray  # (n, m), fractions in (0, 1]; columns sum to 1
    bounds: np.ndarray   # (n,), positive task caps; np.inf means unbounded
    p: float

    @property
    def n_users(self) -> int:
        return self.demands.shape[0]

    @property
    def n_resources(self) -> int:
        return self.demands.shape[1]

    def with_p(self, p: float) -> "Instance":
        """Same instance under a different norm order."""
        if not _norm_ok(p):
            raise InvalidInstanceError([f"p must be >= 1 or infinity (got {p})"])
        return replace(self, p=float(p))


def equal_weights(n: int, m: int) -> np.ndarray:
    """Weight matrix giving every user a 1/n entitlement to every resource."""
    if n < 1 or m < 1:
        raise ValueError(f"need at least one user and one resource (got n={n}, m={m})")
    return np.full((n, m), 1.0 / n)


def make_instance(
    demands,
    weights=None,
    bounds=None,
    p: float = math.inf,
    renormalize_weights: bool = False,
) -> Instance:
    """Build and validate an :class:`Instance`.

    ``weights=None`` means equal entitlements (1/n everywhere); ``bounds=None``
    means every user is unbounded.  With ``renormalize_weights`` a weight
    matrix whose columns do not sum to one is rescaled column-wise instead of
    rejected; the default rejects so data errors stay visible.
    """
    demands = np.array(demands, dtype=float)
    if demands.ndim != 2 or demands.size == 0:
        raise InvalidInstanceError(["demands must be a non-empty 2-D matrix"])
    n, m = demands.shape
    if weights is None:
        weights = equal_weights(n, m)
    else:
        weights = np.array(weights, dtype=float)
    if renormalize_weights and weights.shape == (n, m):
        sums = weights.sum(axis=0)
        if np.all(sums > 0):
            weights = weights / sums
    if bounds is None:
        bounds = np.full(n, math.inf)
    else:
        bounds = np.array(bounds, dtype=float)
    inst = Instance(demands=demands, weights=weights, bounds=bounds, p=float(p))
    result = validate(inst)
    if not result.ok:
        raise InvalidInstanceError(result.violations)
    for arr in (inst.demands, inst.weights, inst.bounds):
        arr.setflags(write=False)
    return inst


def _norm_ok(p) -> bool:
    try:
        p = float(p)
    except (TypeError, ValueError):
        return False
    return not math.isnan(p) and p >= 1.0


def validate(inst: Instance) -> ValidationResult:
    """Check every instance invariant; returns violations instead of raising."""
    bad: list[str] = []
    d, w, b = inst.demands, inst.weights, inst.bounds
    if d.ndim != 2 or d.size == 0:
        return ValidationResult(False, ("demands must be a non-empty 2-D matrix",))
    n, m = d.shape
    if w.shape != (n, m):
        bad.append(f"weights shape {w.shape} does not match demands shape {(n, m)}")
    if b.shape != (n,):
        bad.append(f"bounds shape {b.shape} does not match user count {n}")
    if not np.all(np.isfinite(d)):
        bad.append("demands must be finite")
    else:
        if np.any(d < 0):
            bad.append("negative demand entries")
        if np.any(d > 1 + 1e-12):
            bad.append("demand entries exceed 1 (a task may not need more than a whole resource)")
        zero_rows = np.where(~(d > 0).any(axis=1))[0]
        for i in zero_rows:
            bad.append(f"user {i} has an all-zero demand row")
    if w.shape == (n, m):
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            bad.append("weights must be finite and strictly positive")
        elif np.any(w > 1 + 1e-12):
            bad.append("weight entries exceed 1")
        else:
            sums = w.sum(axis=0)
            off = np.where(np.abs(sums - 1.0) > WEIGHT_SUM_TOL)[0]
            for j in off:
                bad.append(f"weights not normalized: column {j} sums to {sums[j]:.8g}")
    if b.shape == (n,):
        if np.any(np.isnan(b)) or np.any(b <= 0):
            bad.append("bounds must be positive (np.inf allowed)")
    if not _norm_ok(inst.p):
        bad.append(f"p must be >= 1 or infinity (got {inst.p})")
    return ValidationResult(not bad, tuple(bad))


def require_valid(inst: Instance) -> None:
    result = validate(inst)
    if not result.ok:
        raise InvalidInstanceError(result.violations)


@dataclass(frozen=True, eq=False)
class Allocation:
    """A feasible assignment of task counts, with derived per-user shares."""

    tasks: np.ndarray              # x_i >= 0
    consumption: np.ndarray        # c_j = sum_i demands[i, j] * x_i
    normalized_shares: np.ndarray  # ||ws_i||_p * x_i

    @property
    def welfare(self) -> float:
        return float(self.tasks.sum())

    @property
    def utilization(self) -> float:
        return float(self.consumption.min())


def make_allocation(inst: Instance, tasks) -> Allocation:
    """Derive consumption and normalized shares for ``tasks`` and check feasibility.

    Raises ``ValueError`` when a task count is negative, exceeds its bound by
    more than ``FEAS_TOL``, or oversubscribes a resource by more than
    ``FEAS_TOL``.
    """
    from .norms import weighted_shares  # local import: norms depends on model types

    x = np.array(tasks, dtype=float)
    if x.shape != (inst.n_users,):
        raise ValueError(f"task vector shape {x.shape} does not match user count {inst.n_users}")
    if np.any(x < -FEAS_TOL):
        raise ValueError("negative task count")
    x = np.maximum(x, 0.0)
    over = x - inst.bounds
    if np.any(over > FEAS_TOL):
        i = int(np.argmax(over))
        raise ValueError(f"user {i} exceeds its task bound: {x[i]:.12g} > {inst.bounds[i]:.12g}")
    consumption = x @ inst.demands
    if np.any(consumption > 1.0 + FEAS_TOL):
        j = int(np.argmax(consumption))
        raise ValueError(f"resource {j} oversubscribed: {consumption[j]:.12g} > 1")
    ns = weighted_shares(inst).norm_per_task * x
    for arr in (x, consumption, ns):
        arr.setflags(write=False)
    return Allocation(tasks=x, consumption=consumption, normalized_shares=ns)


# --- JSON interchange -------------------------------------------------------
#
# Instance files:
#   {"schema": 1, "users": n, "resources": m, "demands": [[...]],
#    "weights": [[...]],           # optional -> equal weights
#    "bounds": [... or "inf"],     # optional -> all unbounded
#    "p": number or "inf"}         # optional -> "inf"
# Allocation files:
#   {"schema": 1, "mechanism": str, "p": number or "inf", "tasks": [...],
#    "normalized_shares": [...], "consumption": [...],
#    "welfare": number, "utilization": number}


def _num_from_json(v) -> float:
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity", "+inf"):
            return math.inf
        raise ValueError(f"expected a number or 'inf', got {v!r}")
    return float(v)


def _num_to_json(v: float):
    return "inf" if math.isinf(v) else v


def instance_from_json(data: dict, p_override: float | None = None) -> Instance:
    """Build an instance from the JSON schema above (parsed dict)."""
    if not isinstance(data, dict):
        raise InvalidInstanceError(["instance file must hold a JSON object"])
    if "schema" in data and data["schema"] != SCHEMA_VERSION:
        raise InvalidInstanceError([f"unsupported schema version {data['schema']}"])
    if "demands" not in data:
        raise InvalidInstanceError(["missing 'demands'"])
    demands = np.array(data["demands"], dtype=float)
    if demands.ndim != 2:
        raise InvalidInstanceError(["'demands' must be a matrix"])
    n, m = demands.shape
    if "users" in data and int(data["users"]) != n:
        raise InvalidInstanceError([f"'users' = {data['users']} but demands has {n} rows"])
    if "resources" in data and int(data["resources"]) != m:
        raise InvalidInstanceError([f"'resources' = {data['resources']} but demands has {m} columns"])
    weights = data.get("weights")
    bounds = data.get("bounds")
    if bounds is not None:
        bounds = [_num_from_json(v) for v in bounds]
    if p_override is not None:
        p = p_override
    else:
        p = _num_from_json(data.get("p", "inf"))
    return make_instance(demands, weights=weights, bounds=bounds, p=p)


def instance_to_json(inst: Instance) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "users": inst.n_users,
        "resources": inst.n_resources,
        "demands": inst.demands.tolist(),
        "weights": inst.weights.tolist(),
        "bounds": [_num_to_json(v) for v in inst.bounds],
        "p": _num_to_json(inst.p),
    }


def allocation_to_json(inst: Instance, alloc: Allocation, mechanism: str | None = None) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "mechanism": mechanism,
        "p": _num_to_json(inst.p),
        "tasks": alloc.tasks.tolist(),
        "normalized_shares": alloc.normalized_shares.tolist(),
        "consumption": alloc.consumption.tolist(),
        "welfare": alloc.welfare,
        "utilization": alloc.utilization,
    }


def load_instance(path, p_override: float | None = None) -> Instance:
    with open(path) as fh:
        data = json.load(fh)
    return instance_from_json(data, p_override=p_override)


def save_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_json(inst), fh, indent=2)
        fh.write("\n")
