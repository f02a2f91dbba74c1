import math

import numpy as np
import pytest

import fairalloc as fa
from conftest import protocol_instance, varied_instance
from fairalloc.lmmns import SOLVER_TOL, _alg1_threshold
from fairalloc.model import InfeasibleError

EX1 = dict(demands=[[1 / 18, 4 / 36], [3 / 18, 1 / 36]], weights=[[0.5, 0.5]] * 2)
TABLE1 = dict(demands=[[0.1, 0.0], [0.0, 0.1], [0.1, 0.1]], bounds=[10, 5, 10])
TABLE2 = dict(
    demands=[[0.45, 0.05], [0.25, 0.25], [0.2, 0.3], [0.1, 0.4]],
    bounds=[10, 10, 10, 10],
)


def test_bounded_example_caps_both_users():
    inst = fa.make_instance(**EX1, bounds=[5, 3], p=math.inf)
    alloc = fa.solve_lmmns(inst)
    assert np.allclose(alloc.tasks, [5.0, 3.0], atol=1e-9)
    # neither resource fills up
    assert np.all(alloc.consumption < 1 - 1e-6)


def test_share_table_max_norm_split():
    inst = fa.make_instance(**TABLE1, p=math.inf)
    alloc = fa.solve_lmmns_general(inst)
    assert alloc.welfare == pytest.approx(15.0, abs=1e-6)
    assert np.allclose(alloc.tasks, [5.0, 5.0, 5.0], atol=1e-6)
    assert np.all(alloc.consumption >= 1 - 1e-6)


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
def test_share_table_total_constant_across_norms(p):
    inst = fa.make_instance(**TABLE1, p=p)
    alloc = fa.solve_lmmns_general(inst)
    assert alloc.welfare == pytest.approx(15.0, abs=1e-6)
    oracle = fa.oracle_binary_search(inst, tol=1e-9)
    assert np.allclose(alloc.tasks, oracle.tasks, atol=1e-6)


def test_four_user_table_saturation_pattern():
    by_sum = fa.solve_lmmns(fa.make_instance(**TABLE2, p=1))
    assert np.all(by_sum.consumption >= 1 - 1e-9)
    by_max = fa.solve_lmmns(fa.make_instance(**TABLE2, p=math.inf))
    assert by_max.consumption[1] >= 1 - 1e-6
    assert by_max.consumption[0] == pytest.approx(0.9375, abs=1e-6)


def test_single_user_without_contention_caps_out():
    inst = fa.make_instance([[0.3, 0.2]], bounds=[2.5], p=2)
    alloc = fa.solve_lmmns(inst)
    assert alloc.tasks[0] == pytest.approx(2.5, abs=1e-12)


def test_single_user_fills_scarcest_resource():
    inst = fa.make_instance([[0.25, 0.5]], p=1)
    alloc = fa.solve_lmmns(inst)
    assert alloc.tasks[0] == pytest.approx(2.0, abs=1e-9)


@pytest.mark.parametrize("p", [1.0, 2.0, 10.0])
def test_near_duplicate_demands_limit_ratio(p):
    inst = fa.make_instance([[1.0, 1.0], [1.0, 1e-9]], bounds=[10, 10], p=p)
    alloc = fa.solve_lmmns(inst)
    assert alloc.tasks[0] / alloc.tasks[1] == pytest.approx(2 ** (-1 / p), abs=1e-4)
    assert alloc.tasks[0] == pytest.approx(1 / (2 ** (1 / p) + 1), abs=1e-4)


def test_zero_demands_rejected_by_single_round_solver():
    inst = fa.make_instance(**TABLE1, p=1)
    with pytest.raises(ValueError, match="solve_lmmns_general"):
        fa.solve_lmmns(inst)


def test_oracle_rejects_bad_tolerance():
    inst = fa.make_instance(**EX1, bounds=[5, 3])
    with pytest.raises(ValueError):
        fa.oracle_binary_search(inst, tol=0.0)


def test_oracle_on_bounded_example():
    inst = fa.make_instance(**EX1, bounds=[5, 3], p=math.inf)
    alloc = fa.oracle_binary_search(inst, tol=1e-9)
    assert np.allclose(alloc.tasks, [5.0, 3.0], atol=1e-6)


def test_level_structure_single_scalar(rng):
    # every solution is min(cap_i, common level) for one scalar level
    for trial in range(80):
        inst = protocol_instance(
            n=2 + trial % 13, m=2 + trial % 4, seed=300 + trial, p=float(rng.choice([1, 2, math.inf]))
        )
        alloc = fa.solve_lmmns(inst)
        prof = fa.weighted_shares(inst)
        ns = alloc.normalized_shares
        level = ns.max()
        assert np.all(ns <= np.minimum(prof.ns_max, level) + 1e-7)
        assert np.all(ns >= np.minimum(prof.ns_max, level) - 1e-7)


def test_uncapped_users_lead_the_share_order(rng):
    # anyone strictly below its cap holds a maximal normalized share
    for trial in range(80):
        inst = protocol_instance(n=3 + trial % 11, m=2 + trial % 3, seed=900 + trial)
        alloc = fa.solve_lmmns(inst)
        ns = alloc.normalized_shares
        uncapped = alloc.tasks < inst.bounds - 1e-9
        if uncapped.any():
            assert ns[uncapped].min() >= ns.max() - 1e-7


def test_partial_allocation_forces_a_saturated_resource(rng):
    for trial in range(80):
        inst = protocol_instance(n=3 + trial % 11, m=2 + trial % 3, seed=4200 + trial)
        alloc = fa.solve_lmmns(inst)
        if np.any(alloc.tasks < inst.bounds - 1e-9):
            assert alloc.consumption.max() >= 1 - 1e-9


def test_engine_state_partitions_users():
    inst = fa.make_instance(**TABLE2, p=1)
    prof = fa.weighted_shares(inst)
    trace = []
    _alg1_threshold(
        inst.demands,
        inst.bounds,
        prof.norm_per_task,
        prof.ns_max,
        np.arange(inst.n_users),
        np.ones(inst.n_resources),
        trace=trace,
    )
    everyone = set(range(inst.n_users))
    prev_mu = np.zeros(inst.n_resources)
    for undecided, dummy, capped, rc, mu in trace:
        assert set(undecided) | set(dummy) | set(capped) == everyone
        assert not (set(undecided) & set(dummy))
        assert not (set(dummy) & set(capped))
        assert np.all(rc >= -SOLVER_TOL) and np.all(rc <= 1 + SOLVER_TOL)
        assert np.all(mu >= prev_mu - 1e-15)
        prev_mu = mu


def test_closed_form_matches_near_duplicate_limit():
    inst = fa.make_instance([[1.0, 1.0], [1.0, 0.0]], bounds=[10, 10], p=1)
    level = fa.closed_form_ns(inst, dummy_set=[0, 1], capped_set=[])
    prof = fa.weighted_shares(inst)
    assert level / prof.norm_per_task[0] == pytest.approx(1 / 3, abs=1e-12)


def test_closed_form_zero_when_capped_consume_everything():
    inst = fa.make_instance([[0.5, 0.2], [0.5, 0.3]], bounds=[2, 1], p=1)
    assert fa.closed_form_ns(inst, dummy_set=[1], capped_set=[0]) == 0.0


def test_closed_form_share_table_final_round():
    inst = fa.make_instance(**TABLE1, p=math.inf)
    level = fa.closed_form_ns(inst, dummy_set=[0, 2], capped_set=[1])
    prof = fa.weighted_shares(inst)
    assert level / prof.norm_per_task[0] == pytest.approx(5.0, abs=1e-6)


def test_closed_form_error_paths():
    inst = fa.make_instance(**TABLE1, p=1)
    with pytest.raises(ValueError):
        fa.closed_form_ns(inst, dummy_set=[], capped_set=[0])
    with pytest.raises(ValueError):
        fa.closed_form_ns(inst, dummy_set=[0], capped_set=[0])
    # spent capacity on the dummy user's only resource pins its level to zero
    assert fa.closed_form_ns(inst, dummy_set=[1], capped_set=[], capacity=[1.0, 0.0]) == 0.0
    # a dummy set that touches no resource at all signals the caller to cap it;
    # such instances fail validation, so build the degenerate row directly
    degenerate = fa.Instance(
        demands=np.array([[0.1, 0.1], [0.0, 0.0]]),
        weights=np.full((2, 2), 0.5),
        bounds=np.array([1.0, 1.0]),
        p=1.0,
    )
    with pytest.raises(InfeasibleError):
        fa.closed_form_ns(
            degenerate,
            dummy_set=[1],
            capped_set=[],
            profile=fa.weighted_shares(fa.make_instance([[0.1, 0.1], [0.1, 0.1]], p=1)),
        )


def test_oracle_equivalence_small_corpus(rng):
    worst = 0.0
    for k in range(150):
        inst = varied_instance(rng, zeros=(k % 3 == 0), general_weights=(k % 5 == 0), max_n=30)
        a = fa.solve_lmmns_general(inst)
        b = fa.oracle_binary_search(inst, tol=1e-9)
        worst = max(worst, float(np.abs(a.tasks - b.tasks).max()))
    assert worst <= 1e-6


def test_general_solver_grows_users_past_stalled_resources():
    # three users pinned by the first resource; the fourth keeps filling the second
    inst = fa.make_instance(
        [[1.0, 1.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], bounds=[1.0] * 4, p=math.inf
    )
    alloc = fa.solve_lmmns_general(inst)
    assert np.allclose(alloc.tasks, [1 / 3, 1 / 3, 1 / 3, 2 / 3], atol=1e-9)
    assert alloc.utilization == pytest.approx(1.0, abs=1e-9)


def test_disjoint_users_fill_their_own_resources():
    inst = fa.make_instance([[1.0, 0.0], [0.0, 0.5]], bounds=[0.6, math.inf], p=math.inf)
    alloc = fa.solve_lmmns_general(inst)
    assert alloc.tasks[0] == pytest.approx(0.6, abs=1e-9)
    assert alloc.tasks[1] == pytest.approx(2.0, abs=1e-9)
