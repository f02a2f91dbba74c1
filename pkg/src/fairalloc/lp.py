"""Dense linear programming: a two-phase simplex with Bland's rule, the
welfare and utilization oracles built on it, and a log-utility baseline
solver.

Every optimum the oracles return carries an optimality certificate whose
conditions (primal feasibility, dual feasibility, complementary slackness,
duality gap) are re-evaluated from the raw problem data, independent of the
tableau arithmetic that produced the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    Allocation,
    ConvergenceError,
    InfeasibleError,
    Instance,
    make_allocation,
    require_valid,
)
from .norms import weighted_shares

PIVOT_TOL = 1e-9
PRIMAL_TOL = 1e-8
GAP_TOL = 1e-6

CEEI_MAX_USERS = 200


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """maximize objective @ x  s.t.  A x <= b,  lower <= x <= upper."""

    objective: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        d = self.objective.shape[0]
        if self.A.shape != (self.b.shape[0], d):
            raise ValueError("inconsistent LP dimensions")
        if self.lower.shape != (d,) or self.upper.shape != (d,):
            raise ValueError("bounds must match the variable count")
        if not np.all(np.isfinite(self.lower)):
            raise ValueError("lower bounds must be finite")
        if np.any(self.lower > self.upper + 1e-12):
            raise ValueError("lower bound exceeds upper bound")


def make_lp(objective, A, b, lower=None, upper=None) -> LinearProgram:
    objective = np.asarray(objective, dtype=float)
    d = objective.shape[0]
    A = np.asarray(A, dtype=float).reshape(-1, d)
    b = np.asarray(b, dtype=float)
    lower = np.zeros(d) if lower is None else np.asarray(lower, dtype=float)
    upper = np.full(d, math.inf) if upper is None else np.asarray(upper, dtype=float)
    return LinearProgram(objective, A, b, lower, upper)


@dataclass(frozen=True)
class OptimalityCertificate:
    primal_residual: float
    dual_residual: float
    slackness_residual: float
    duality_gap: float
    ok: bool


@dataclass(frozen=True, eq=False)
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    value: float | None = None
    duals: np.ndarray | None = None
    certificate: OptimalityCertificate | None = None


def simplex_solve(lp: LinearProgram, max_pivots: int | None = None) -> SimplexResult:
    """Solve a dense LP; deterministic Bland pivoting, so no cycling."""
    c = lp.objective
    d = c.shape[0]
    up_rows = np.where(np.isfinite(lp.upper))[0]
    A_all = np.vstack([lp.A] + [np.eye(d)[up_rows]]) if up_rows.size else lp.A.copy()
    b_all = np.concatenate([lp.b, lp.upper[up_rows]]) if up_rows.size else lp.b.copy()
    k = A_all.shape[0]
    b_shift = b_all - A_all @ lp.lower

    flip = np.where(b_shift < 0, -1.0, 1.0)
    art_rows = np.where(b_shift < 0)[0]
    n_art = art_rows.size
    total = d + k + n_art

    T = np.zeros((k + 1, total + 1))
    T[:k, :d] = A_all * flip[:, None]
    T[:k, d : d + k] = np.diag(flip)
    for a, r in enumerate(art_rows):
        T[r, d + k + a] = 1.0
    T[:k, -1] = b_shift * flip

    basis = [d + i for i in range(k)]
    for a, r in enumerate(art_rows):
        basis[r] = d + k + a

    if max_pivots is None:
        max_pivots = 200 * (k + d) + 1000

    art_cols = set(range(d + k, total))
    if n_art:
        c1 = np.zeros(total)
        c1[d + k :] = -1.0
        _set_objective_row(T, basis, c1)
        status = _pivot_loop(T, basis, allowed=total, max_pivots=max_pivots)
        if status != "optimal":
            raise RuntimeError("phase-one simplex did not terminate at an optimum")
        infeas = sum(T[r, -1] for r in range(k) if basis[r] in art_cols)
        if infeas > 1e-8:
            return SimplexResult(status="infeasible")
        _drive_out_artificials(T, basis, d + k)

    c2 = np.zeros(total)
    c2[:d] = c
    _set_objective_row(T, basis, c2)
    status = _pivot_loop(T, basis, allowed=d + k, max_pivots=max_pivots)
    if status == "unbounded":
        return SimplexResult(status="unbounded")
    if n_art and any(
        basis[r] in art_cols and T[r, -1] > 1e-9 for r in range(k)
    ):
        raise RuntimeError("a redundant-row artificial re-entered the solution")

    y = np.zeros(total)
    for r in range(k):
        y[basis[r]] = T[r, -1]
    x = y[:d] + lp.lower
    value = float(c @ x)
    # row flips cancel in the dual read-out: the physical slack column is
    # flip * e_i and the original multiplier is flip * (flipped-system dual)
    duals = -T[-1, d : d + k]
    cert = certify_optimum(lp, x, duals)
    return SimplexResult(status="optimal", x=x, value=value, duals=duals, certificate=cert)


def _set_objective_row(T, basis, cvec):
    z = cvec.astype(float).copy()
    rhs = 0.0
    for r, bv in enumerate(basis):
        if cvec[bv] != 0.0:
            z -= cvec[bv] * T[r, :-1]
            rhs -= cvec[bv] * T[r, -1]
    T[-1, :-1] = z
    T[-1, -1] = rhs


def _pivot_loop(T, basis, allowed: int, max_pivots: int) -> str:
    k = T.shape[0] - 1
    for _ in range(max_pivots):
        z = T[-1, :allowed]
        cand = np.where(z > PIVOT_TOL)[0]
        if cand.size == 0:
            return "optimal"
        enter = int(cand[0])  # Bland: smallest improving index
        col = T[:k, enter]
        pos = col > PIVOT_TOL
        if not pos.any():
            return "unbounded"
        rows = np.where(pos)[0]
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        near = rows[ratios <= best + 1e-12]
        leave = int(near[np.argmin([basis[r] for r in near])])  # Bland tie-break
        _pivot(T, leave, enter)
        basis[leave] = enter
    raise RuntimeError("pivot limit exceeded")


def _pivot(T, r, c):
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    T[:, c] = 0.0
    T[r, c] = 1.0


def _drive_out_artificials(T, basis, real_cols: int):
    k = T.shape[0] - 1
    for r in range(k):
        if basis[r] >= real_cols:
            row = np.abs(T[r, :real_cols])
            j = int(np.argmax(row))
            if row[j] > PIVOT_TOL:
                _pivot(T, r, j)
                basis[r] = j
            # else: redundant row; artificial stays basic at zero


def certify_optimum(lp: LinearProgram, x: np.ndarray, duals: np.ndarray) -> OptimalityCertificate:
    """Re-check optimality of (x, duals) from the raw LP data."""
    c, lower = lp.objective, lp.lower
    up_rows = np.where(np.isfinite(lp.upper))[0]
    d = c.shape[0]
    A_all = np.vstack([lp.A] + [np.eye(d)[up_rows]]) if up_rows.size else lp.A
    b_all = np.concatenate([lp.b, lp.upper[up_rows]]) if up_rows.size else lp.b

    slack = b_all - A_all @ x
    primal = max(0.0, float(-slack.min(initial=0.0)), float((lower - x).max(initial=0.0)))
    reduced = c - A_all.T @ duals
    dual = max(0.0, float(-duals.min(initial=0.0)), float(reduced.max(initial=0.0)))
    y = x - lower
    cs = max(
        float(np.abs(duals * slack).max(initial=0.0)),
        float(np.abs(y * reduced).max(initial=0.0)),
    )
    gap = abs(float(c @ y) - float(duals @ (b_all - A_all @ lower)))
    ok = primal <= PRIMAL_TOL and dual <= 1e-7 and cs <= 1e-6 and gap <= GAP_TOL
    return OptimalityCertificate(primal, dual, cs, gap, ok)


# --- allocation oracles ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OracleResult:
    allocation: Allocation
    value: float
    certificate: OptimalityCertificate


def _si_floors(inst: Instance) -> np.ndarray:
    prof = weighted_shares(inst)
    n = inst.n_users
    r_dom = inst.demands[np.arange(n), prof.dominant_resource]
    return 1.0 / (n * r_dom)


def _check_si_precondition(inst: Instance):
    if not np.allclose(inst.weights, 1.0 / inst.n_users, atol=1e-9):
        raise ValueError("entitlement-floor oracles require equal weights 1/n")


def _solve_alloc_lp(inst: Instance, lp: LinearProgram, extract) -> OracleResult:
    res = simplex_solve(lp)
    if res.status == "infeasible":
        raise InfeasibleError("oracle constraints admit no allocation")
    if res.status != "optimal":
        raise RuntimeError(f"oracle LP ended {res.status}")
    x, value = extract(res.x), float(res.value)
    x = np.minimum(np.maximum(x, 0.0), inst.bounds)
    load = x @ inst.demands
    top = float(load.max(initial=0.0))
    if top > 1.0:
        x = x / top
    return OracleResult(make_allocation(inst, x), value, res.certificate)


def welfare_lp(inst: Instance, require_si: bool = False) -> OracleResult:
    """Most total tasks any feasible allocation can reach.

    With ``require_si`` the allocation must also give every user at least a
    1/n share of its dominant resource (equal weights only); that restriction
    can make the program infeasible, which raises :class:`InfeasibleError`.
    """
    require_valid(inst)
    n = inst.n_users
    lower = None
    if require_si:
        _check_si_precondition(inst)
        lower = _si_floors(inst)
        if np.any(lower > inst.bounds + 1e-12):
            raise InfeasibleError("a share floor exceeds its task bound")
    lp = make_lp(
        objective=np.ones(n),
        A=inst.demands.T,
        b=np.ones(inst.n_resources),
        lower=lower,
        upper=inst.bounds,
    )
    return _solve_alloc_lp(inst, lp, extract=lambda z: z)


def utilization_lp(inst: Instance, require_si: bool = False) -> OracleResult:
    """Largest achievable minimum resource consumption.

    Variables are the task vector plus the common consumption floor; the
    floor is maximized subject to capacity, bounds, and optionally the 1/n
    share floors.
    """
    require_valid(inst)
    n, m = inst.n_users, inst.n_resources
    lower = np.zeros(n + 1)
    if require_si:
        _check_si_precondition(inst)
        lower[:n] = _si_floors(inst)
        if np.any(lower[:n] > inst.bounds + 1e-12):
            raise InfeasibleError("a share floor exceeds its task bound")
    obj = np.zeros(n + 1)
    obj[n] = 1.0
    cap_rows = np.hstack([inst.demands.T, np.zeros((m, 1))])
    floor_rows = np.hstack([-inst.demands.T, np.ones((m, 1))])
    lp = make_lp(
        objective=obj,
        A=np.vstack([cap_rows, floor_rows]),
        b=np.concatenate([np.ones(m), np.zeros(m)]),
        lower=lower,
        upper=np.concatenate([inst.bounds, [math.inf]]),
    )
    return _solve_alloc_lp(inst, lp, extract=lambda z: z[:-1])


# --- log-utility baseline ----------------------------------------------------


def solve_ceei(inst: Instance, tol: float = 1e-8, max_iter: int = 200000) -> Allocation:
    """Maximize the sum of log task counts subject to capacity and bounds.

    Dual solve: each resource carries a price, each user buys
    min(bound, 1 / price-of-its-bundle) tasks, and prices follow an
    accelerated projected gradient on the dual function.  Once the coarse
    prices identify which resources saturate, a Newton step on that active
    set finishes the solve; the result only counts when the scaled KKT
    residual (primal feasibility plus complementary slackness; stationarity
    holds by construction) is at most ``tol``.  Raises
    :class:`ConvergenceError` with the residual when the iteration cap is
    hit first.
    """
    require_valid(inst)
    if not tol > 0:
        raise ValueError("tol must be positive")
    n, m = inst.n_users, inst.n_resources
    if n > CEEI_MAX_USERS:
        raise ValueError(f"log-utility baseline is desk-scale only (n <= {CEEI_MAX_USERS})")
    r = inst.demands
    bounds = inst.bounds

    if np.all(np.isfinite(bounds)) and float((bounds @ r).max()) <= 1.0 + 1e-12:
        return make_allocation(inst, bounds)  # caps bind everywhere; prices are free

    def tasks_of(lam: np.ndarray) -> np.ndarray:
        price = r @ lam
        with np.errstate(divide="ignore"):
            raw = np.where(price > 0, 1.0 / np.where(price > 0, price, 1.0), math.inf)
        return np.minimum(bounds, raw)

    def dual_value(lam: np.ndarray) -> tuple[float, np.ndarray]:
        x = tasks_of(lam)
        if not np.all(np.isfinite(x)) or np.any(x <= 0):
            return math.inf, x
        return float(np.log(x).sum() - (r @ lam) @ x + lam.sum()), x  # minimize this

    def residual(lam: np.ndarray, x: np.ndarray) -> float:
        load = x @ r
        primal = float(np.maximum(load - 1.0, 0.0).max(initial=0.0))
        scale = 1.0 + float(lam.max(initial=0.0))
        slackness = float((lam * np.abs(1.0 - load)).max(initial=0.0)) / scale
        return max(primal, slackness)

    def finish(x: np.ndarray) -> Allocation:
        x = np.minimum(x, bounds)
        load = x @ r
        top = float(load.max(initial=0.0))
        if top > 1.0:
            x = x / top
        return make_allocation(inst, x)

    lam = np.full(m, n / m)
    vel = lam.copy()
    t_k = 1.0
    lip = 1.0
    f_lam, x_lam = dual_value(lam)
    res = math.inf
    for it in range(max_iter):
        res = residual(lam, x_lam)
        if res <= tol:
            return finish(x_lam)
        if it % 25 == 0 and (res <= 1e-2 or it % 500 == 0):
            polished = _ceei_active_set_newton(r, bounds, lam)
            if polished is not None:
                lam_p, x_p = polished
                if residual(lam_p, x_p) <= min(tol, 1e-10):
                    return finish(x_p)
        f_v, x_v = dual_value(vel)
        if math.isinf(f_v):
            vel = lam.copy()
            t_k = 1.0
            f_v, x_v = dual_value(vel)
        grad = 1.0 - (x_v @ r)  # gradient of the minimized dual
        for _ in range(200):
            nxt = np.maximum(vel - grad / lip, 0.0)
            f_n, x_n = dual_value(nxt)
            step = nxt - vel
            if f_n <= f_v + grad @ step + 0.5 * lip * float(step @ step) + 1e-15:
                break
            lip *= 2.0
        else:
            raise ConvergenceError("backtracking failed to find a stable step", residual=res)
        if f_n > f_lam + 1e-12 * (1.0 + abs(f_lam)):  # momentum lost ground: restart
            vel = lam.copy()
            t_k = 1.0
            continue
        if f_n <= f_lam:
            lam, f_lam, x_lam = nxt, f_n, x_n
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_k * t_k))
        vel = np.maximum(nxt + ((t_k - 1.0) / t_next) * (nxt - lam), 0.0)
        t_k = t_next
        lip = max(lip * 0.5, 1e-6)
    raise ConvergenceError(f"log-utility solve stopped after {max_iter} iterations", residual=res)


def _ceei_active_set_newton(r, bounds, lam0, sweeps: int = 6):
    """Solve the saturated-set price equations exactly, given coarse prices.

    Guesses the saturated set from the coarse prices, then runs damped
    Newton on load(saturated) = 1 with prices off the set pinned at zero,
    dropping resources whose price collapses to zero.  Returns
    (prices, tasks) or None when the guess does not pan out; the caller
    re-verifies everything.
    """
    lam = np.asarray(lam0, dtype=float)
    scale = 1.0 + float(lam.max(initial=0.0))
    active = lam > 1e-6 * scale

    def tasks_or_none(lam_vec):
        price = r @ lam_vec
        with np.errstate(divide="ignore"):
            raw = np.where(price > 0, 1.0 / np.where(price > 0, price, 1.0), math.inf)
        x = np.minimum(bounds, raw)
        if not np.all(np.isfinite(x)):
            return None, None
        return x, price

    for _ in range(sweeps):
        if not active.any():
            return None
        lam_try = np.where(active, np.maximum(lam, 1e-12 * scale), 0.0)
        converged = False
        for _ in range(60):
            x, price = tasks_or_none(lam_try)
            if x is None:
                return None
            gap = (x @ r)[active] - 1.0
            worst = float(np.abs(gap).max(initial=0.0))
            if worst <= 1e-13:
                converged = True
                break
            reactive = (price > 0) & (1.0 / np.maximum(price, 1e-300) < bounds)
            if not reactive.any():
                return None
            ra = r[reactive][:, active]
            pa = price[reactive]
            jac = -(ra / pa[:, None] ** 2).T @ ra
            try:
                delta = np.linalg.solve(jac, -gap)
            except np.linalg.LinAlgError:
                return None
            moved = False
            shrink = 1.0
            for _ in range(40):
                cand = lam_try.copy()
                cand[active] = np.maximum(lam_try[active] + shrink * delta, 0.0)
                x_c, _ = tasks_or_none(cand)
                if x_c is not None:
                    cand_worst = float(np.abs((x_c @ r)[active] - 1.0).max(initial=0.0))
                    if cand_worst < worst:
                        lam_try = cand
                        moved = True
                        break
                shrink *= 0.5
            if not moved:
                return None
        if not converged:
            return None
        dropped = active & (lam_try <= 1e-14 * scale)
        if dropped.any():
            active = active & ~dropped
            lam = lam_try
            continue
        x, _ = tasks_or_none(lam_try)
        return lam_try, x
    return None
