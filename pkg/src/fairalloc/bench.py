"""Random-instance generation and mechanism-quality measurement.

Instances follow a fixed protocol: demands uniform on (0, 1) with all-zero
rows resampled, equal weights 1/n, and each task bound uniform between
1/(n * dominant demand) and 1/(dominant demand) so every user genuinely has
to share.  The quality of a mechanism on an instance is its objective value
(welfare or utilization) divided by the LP-oracle optimum, a number in
(0, 1].

Reproducibility: instance trial t of a run seeded s is drawn from the
child stream SeedSequence(s, spawn_key=(t,)), with a fixed draw order
(demand matrix row-major, then resamples of rejected rows in row order,
then bounds).  Instances therefore depend only on (s, t, n, m), never on
the norm order being swept, and means are accumulated in trial order.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .filling import solve_modified_lmmns, solve_waterfilling
from .lmmns import solve_lmmns_general
from .lp import OracleResult, solve_ceei, utilization_lp, welfare_lp
from .model import Allocation, InfeasibleError, Instance, equal_weights, make_instance

CSV_HEADER = ("mechanism", "objective", "oracle", "n", "m", "p", "seed", "trial", "ratio")

MECHANISMS: dict[str, Callable[[Instance], Allocation]] = {
    "lmmns": solve_lmmns_general,
    "lmmds": lambda inst: solve_lmmns_general(inst.with_p(math.inf)),
    "modified": solve_modified_lmmns,
    "waterfill": solve_waterfilling,
    "ceei": solve_ceei,
}


@dataclass(frozen=True)
class GenConfig:
    n_users: int
    n_resources: int
    p: float = math.inf
    seed: int = 0
    trials: int = 50

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n_users < 1 or self.n_resources < 1:
            raise ValueError("need at least one user and one resource")


@dataclass(frozen=True)
class QualityRecord:
    mechanism: str
    objective: str
    oracle: str
    n: int
    m: int
    p: float
    seed: int
    trial: int
    ratio: float


def gen_instance(cfg: GenConfig, trial: int) -> Instance:
    """Deterministic random instance for (cfg.seed, trial)."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(trial,)))
    n, m = cfg.n_users, cfg.n_resources
    demands = rng.uniform(0.0, 1.0, size=(n, m))
    dead = np.where(~(demands >= 1e-9).any(axis=1))[0]
    while dead.size:
        demands[dead] = rng.uniform(0.0, 1.0, size=(dead.size, m))
        dead = dead[~(demands[dead] >= 1e-9).any(axis=1)]
    dominant = demands.argmax(axis=1)
    r_dom = demands[np.arange(n), dominant]
    bounds = rng.uniform(1.0 / (n * r_dom), 1.0 / r_dom)
    return make_instance(demands, weights=equal_weights(n, m), bounds=bounds, p=cfg.p)


def _objective_value(alloc: Allocation, objective: str) -> float:
    if objective == "welfare":
        return alloc.welfare
    if objective == "utilization":
        return alloc.utilization
    raise ValueError(f"unknown objective {objective!r}")


def _oracle(inst: Instance, objective: str, variant: str) -> OracleResult:
    require_si = {"plain": False, "si": True}[variant]
    if objective == "welfare":
        return welfare_lp(inst, require_si=require_si)
    return utilization_lp(inst, require_si=require_si)


def run_quality_sweep(
    cfg: GenConfig,
    mechanism: str,
    objective: str,
    oracle_variant: str = "plain",
    p_sweep: Sequence[float] | None = None,
) -> tuple[list[QualityRecord], int]:
    """Quality records over cfg.trials instances and each swept norm order.

    The oracle is solved once per trial (it does not depend on the norm);
    infeasible oracle trials are skipped and counted in the second return
    value.  Records arrive ordered by (trial, p).
    """
    solver = MECHANISMS[mechanism]
    sweep = [cfg.p] if p_sweep is None else list(p_sweep)
    records: list[QualityRecord] = []
    excluded = 0
    for trial in range(cfg.trials):
        inst = gen_instance(cfg, trial)
        try:
            oracle = _oracle(inst, objective, oracle_variant)
        except InfeasibleError:
            excluded += 1
            continue
        if oracle.value <= 0:
            excluded += 1
            continue
        for p in sweep:
            alloc = solver(inst.with_p(float(p)))
            ratio = _objective_value(alloc, objective) / oracle.value
            records.append(
                QualityRecord(
                    mechanism=mechanism,
                    objective=objective,
                    oracle=oracle_variant,
                    n=cfg.n_users,
                    m=cfg.n_resources,
                    p=float(p),
                    seed=cfg.seed,
                    trial=trial,
                    ratio=ratio,
                )
            )
    return records, excluded


def mean_quality(records: Sequence[QualityRecord]) -> dict[float, float]:
    """Mean ratio per norm order, accumulated in record (trial) order."""
    sums: dict[float, float] = {}
    counts: dict[float, int] = {}
    for rec in records:
        sums[rec.p] = sums.get(rec.p, 0.0) + rec.ratio
        counts[rec.p] = counts.get(rec.p, 0) + 1
    return {p: sums[p] / counts[p] for p in sums}


def format_p(p: float) -> str:
    if math.isinf(p):
        return "inf"
    return f"{p:.10g}"


def write_csv(records: Sequence[QualityRecord], fh: io.TextIOBase) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(
            [r.mechanism, r.objective, r.oracle, r.n, r.m, format_p(r.p), r.seed, r.trial, f"{r.ratio:.12g}"]
        )


def records_to_csv(records: Sequence[QualityRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()
