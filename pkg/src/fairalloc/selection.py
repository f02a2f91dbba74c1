"""Worst-case linear-time selection (deterministic median of medians)."""

from __future__ import annotations

import numpy as np


def median_select(values, k: int) -> float:
    """Return the k-th smallest value (1-based rank) of a non-empty sequence.

    Deterministic median-of-medians pivoting with groups of five, so the
    worst case stays linear.  Duplicates and infinities are fine.
    """
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("median_select needs a non-empty sequence")
    if not 1 <= k <= arr.size:
        raise ValueError(f"rank {k} out of range for {arr.size} values")
    while True:
        if arr.size <= 5:
            return float(np.sort(arr)[k - 1])
        pivot = _median_of_medians(arr)
        below = arr < pivot
        n_below = int(below.sum())
        if k <= n_below:
            arr = arr[below]
            continue
        above = arr > pivot
        n_equal = arr.size - n_below - int(above.sum())
        if k <= n_below + n_equal:
            return float(pivot)
        k -= n_below + n_equal
        arr = arr[above]


def _median_of_medians(arr: np.ndarray) -> float:
    full = (arr.size // 5) * 5
    groups = np.sort(arr[:full].reshape(-1, 5), axis=1)
    medians = groups[:, 2]
    if arr.size > full:
        tail = np.sort(arr[full:])
        medians = np.append(medians, tail[(tail.size - 1) // 2])
    if medians.size == 1:
        return float(medians[0])
    return median_select(medians, (medians.size + 1) // 2)
