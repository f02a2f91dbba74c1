import math

import numpy as np
import pytest

import fairalloc as fa
from fairalloc.bench import GenConfig, gen_instance


def protocol_instance(n, m, seed, p=math.inf, trial=0):
    """One instance drawn by the benchmark protocol."""
    return gen_instance(GenConfig(n_users=n, n_resources=m, p=p, seed=seed, trials=trial + 1), trial)


def sprinkle_zeros(inst, seed, density=0.35):
    """Copy of an instance with a share of demand entries zeroed (rows stay nonzero)."""
    rng = np.random.default_rng(seed)
    d = inst.demands.copy()
    mask = rng.random(d.shape) < density
    d[mask] = 0.0
    for i in range(d.shape[0]):
        if not (d[i] > 0).any():
            d[i, int(rng.integers(0, d.shape[1]))] = float(rng.uniform(0.1, 1.0))
    return fa.make_instance(d, weights=inst.weights, bounds=inst.bounds, p=inst.p)


def varied_instance(rng, zeros=False, general_weights=False, max_n=50, max_m=5):
    """Random instance with mixed bounds and norm orders for stress corpora."""
    n = int(rng.integers(2, max_n + 1))
    m = int(rng.integers(2, max_m + 1))
    d = rng.uniform(0.0, 1.0, size=(n, m))
    if zeros:
        mask = rng.random((n, m)) < 0.35
        d = np.where(mask, 0.0, d)
        for i in range(n):
            if not (d[i] > 0).any():
                d[i, int(rng.integers(0, m))] = float(rng.uniform(0.1, 1.0))
    if general_weights:
        w = rng.uniform(0.05, 1.0, size=(n, m))
        w = w / w.sum(axis=0)
    else:
        w = np.full((n, m), 1.0 / n)
    kind = int(rng.integers(0, 3))
    if kind == 0:
        b = np.full(n, math.inf)
    elif kind == 1:
        b = rng.uniform(0.1, 3.0, size=n)
    else:
        b = np.where(rng.random(n) < 0.3, math.inf, rng.uniform(0.1, 3.0, size=n))
    p = float(rng.choice([1.0, 1.5, 2.0, 3.0, 10.0, math.inf]))
    return fa.make_instance(d, weights=w, bounds=b, p=p)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
