"""Share arithmetic: weighted shares, p-norms, dominant shares, share caps."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Allocation, Instance


def p_norm(vector, p: float) -> float:
    """(sum v_j^p)^(1/p) for finite p >= 1; max_j v_j for p = inf.

    Entries must be nonnegative.  The infinite case is an exact max, and the
    finite case rescales by the largest entry so large orders do not overflow.
    """
    v = np.asarray(vector, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("p_norm needs a non-empty 1-D vector")
    if np.any(v < 0):
        raise ValueError("p_norm entries must be nonnegative")
    top = float(v.max())
    if math.isinf(p):
        return top
    if top == 0.0:
        return 0.0
    return top * float(((v / top) ** p).sum()) ** (1.0 / p)


def row_p_norms(matrix: np.ndarray, p: float) -> np.ndarray:
    """Row-wise :func:`p_norm` of a nonnegative matrix."""
    if math.isinf(p):
        return matrix.max(axis=1)
    top = matrix.max(axis=1)
    safe = np.where(top > 0, top, 1.0)
    scaled = matrix / safe[:, None]
    return np.where(top > 0, safe * (scaled**p).sum(axis=1) ** (1.0 / p), 0.0)


@dataclass(frozen=True, eq=False)
class ShareProfile:
    """Per-user share data derived from one instance.

    ``weighted[i, j]`` is demand over entitlement for one task,
    ``norm_per_task[i]`` collapses that row under the instance norm,
    ``dominant_resource[i]`` is the argmax of the row (lowest index on ties),
    and ``ns_max[i]`` is the largest normalized share the task bound allows.
    """

    weighted: np.ndarray
    norm_per_task: np.ndarray
    dominant_resource: np.ndarray
    ns_max: np.ndarray


def weighted_shares(inst: Instance) -> ShareProfile:
    """Compute the full :class:`ShareProfile` of a valid instance."""
    ws = inst.demands / inst.weights
    norm_pt = row_p_norms(ws, inst.p)
    dominant = ws.argmax(axis=1)
    ns_max = norm_pt * inst.bounds
    for arr in (ws, norm_pt, dominant, ns_max):
        arr.setflags(write=False)
    return ShareProfile(
        weighted=ws, norm_per_task=norm_pt, dominant_resource=dominant, ns_max=ns_max
    )


def dominant_share(inst: Instance, alloc: Allocation, user: int) -> float:
    """x_i times the user's largest weighted share (the share DRF equalizes)."""
    if not 0 <= user < inst.n_users:
        raise IndexError(f"user index {user} out of range")
    ws = inst.demands[user] / inst.weights[user]
    return float(alloc.tasks[user] * ws.max())


def raw_shares(inst: Instance, alloc: Allocation) -> np.ndarray:
    """Capacity fractions actually consumed: entry (i, j) is x_i * demands[i, j]."""
    return alloc.tasks[:, None] * inst.demands


def max_raw_share(inst: Instance, alloc: Allocation, user: int) -> float:
    """Largest capacity fraction the user holds on any resource."""
    if not 0 <= user < inst.n_users:
        raise IndexError(f"user index {user} out of range")
    return float((alloc.tasks[user] * inst.demands[user]).max())
