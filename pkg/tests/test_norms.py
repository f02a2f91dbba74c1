import math

import numpy as np
import pytest

import fairalloc as fa
from fairalloc.norms import max_raw_share, raw_shares, row_p_norms

EX1 = dict(demands=[[1 / 18, 4 / 36], [3 / 18, 1 / 36]], weights=[[0.5, 0.5]] * 2)


def test_weighted_shares_example_values():
    inst = fa.make_instance(**EX1, bounds=[5, 3], p=math.inf)
    prof = fa.weighted_shares(inst)
    assert np.allclose(prof.weighted[0], [1 / 9, 2 / 9])
    assert prof.dominant_resource[0] == 1  # memory is the tight one per task
    assert np.allclose(prof.norm_per_task, [2 / 9, 1 / 3])
    assert np.allclose(prof.ns_max, [10 / 9, 1.0])


def test_equal_demands_tie_break_to_first_resource():
    inst = fa.make_instance([[0.2, 0.2], [0.2, 0.2]], p=math.inf)
    prof = fa.weighted_shares(inst)
    assert np.all(prof.dominant_resource == 0)
    assert np.allclose(prof.weighted, 0.4)


def test_share_table_row_under_both_norms():
    inst = fa.make_instance(
        [[0.1, 0.0], [0.0, 0.1], [0.1, 0.1]], bounds=[10, 5, 10], p=1
    )
    prof = fa.weighted_shares(inst)
    assert np.allclose(prof.weighted[2], [0.3, 0.3])
    assert math.isclose(fa.p_norm(prof.weighted[2], 1), 0.6)
    assert math.isclose(fa.p_norm(prof.weighted[2], math.inf), 0.3)


def test_p_norm_basics():
    assert fa.p_norm([3, 4], 2) == pytest.approx(5.0, abs=1e-12)
    assert fa.p_norm([0.3, 0.3], math.inf) == 0.3
    for m, p in [(2, 1), (3, 2), (5, 7)]:
        assert fa.p_norm(np.ones(m), p) == pytest.approx(m ** (1 / p), rel=1e-12)


def test_p_norm_rejects_bad_input():
    with pytest.raises(ValueError):
        fa.p_norm([], 2)
    with pytest.raises(ValueError):
        fa.p_norm([-1.0, 2.0], 2)


def test_p_norm_large_order_does_not_overflow():
    v = np.array([800.0, 700.0, 1.0])
    out = fa.p_norm(v, 40)
    assert np.isfinite(out)
    assert out >= 800.0
    assert out == pytest.approx(800.0 * ((v / 800.0) ** 40).sum() ** (1 / 40))


def test_p_norm_homogeneous_and_monotone(rng):
    for _ in range(200):
        m = int(rng.integers(1, 6))
        v = rng.uniform(0, 5, size=m)
        p = float(rng.choice([1.0, 1.7, 2.0, 4.0, 11.0, math.inf]))
        base = fa.p_norm(v, p)
        s = float(rng.uniform(0.1, 9))
        assert fa.p_norm(s * v, p) == pytest.approx(s * base, rel=1e-9, abs=1e-12)
        bump = v.copy()
        j = int(rng.integers(0, m))
        bump[j] += rng.uniform(0, 2)
        assert fa.p_norm(bump, p) >= base - 1e-12


def test_p_norm_sandwich_between_max_and_scaled_max(rng):
    for _ in range(200):
        m = int(rng.integers(1, 6))
        v = rng.uniform(0, 3, size=m)
        p = float(rng.choice([1.0, 2.0, 3.5, 20.0]))
        top = fa.p_norm(v, math.inf)
        val = fa.p_norm(v, p)
        assert top - 1e-12 <= val <= m ** (1 / p) * top + 1e-12


def test_row_p_norms_matches_scalar(rng):
    mat = rng.uniform(0, 4, size=(40, 4))
    for p in (1.0, 2.0, 7.0, math.inf):
        rows = row_p_norms(mat, p)
        for i in range(mat.shape[0]):
            assert rows[i] == pytest.approx(fa.p_norm(mat[i], p), rel=1e-12)


def test_dominant_share_equalized_when_unbounded():
    inst = fa.make_instance(**EX1, p=math.inf)
    alloc = fa.solve_lmmns(inst)
    ds = [fa.dominant_share(inst, alloc, i) for i in range(2)]
    assert ds[0] == pytest.approx(ds[1], abs=1e-9)
    assert max_raw_share(inst, alloc, 0) == pytest.approx(2 / 3, abs=1e-9)
    assert max_raw_share(inst, alloc, 1) == pytest.approx(2 / 3, abs=1e-9)


def test_dominant_share_zero_allocation_and_range_check():
    inst = fa.make_instance(**EX1, bounds=[5, 3], p=math.inf)
    alloc = fa.make_allocation(inst, [0.0, 0.0])
    assert fa.dominant_share(inst, alloc, 0) == 0.0
    with pytest.raises(IndexError):
        fa.dominant_share(inst, alloc, 2)


def test_bounded_example_raw_shares():
    inst = fa.make_instance(**EX1, bounds=[5, 3], p=math.inf)
    alloc = fa.solve_lmmns(inst)
    assert max_raw_share(inst, alloc, 0) == pytest.approx(5 / 9, abs=1e-9)
    assert max_raw_share(inst, alloc, 1) == pytest.approx(1 / 2, abs=1e-9)
    shares = raw_shares(inst, alloc)
    assert np.allclose(shares, alloc.tasks[:, None] * inst.demands)


def test_dominant_share_is_scaled_raw_share_under_equal_weights(rng):
    from conftest import protocol_instance

    inst = protocol_instance(n=7, m=3, seed=5)
    alloc = fa.solve_lmmns(inst)
    for i in range(inst.n_users):
        assert fa.dominant_share(inst, alloc, i) == pytest.approx(
            inst.n_users * max_raw_share(inst, alloc, i), rel=1e-12
        )


def test_ns_max_monotone_in_bounds():
    lo = fa.make_instance(**EX1, bounds=[2, 2], p=2)
    hi = fa.make_instance(**EX1, bounds=[3, 5], p=2)
    assert np.all(fa.weighted_shares(hi).ns_max >= fa.weighted_shares(lo).ns_max)
