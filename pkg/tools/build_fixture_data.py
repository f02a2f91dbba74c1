#!/usr/bin/env python3
"""Regenerate the fixture corpus under src/fairalloc/fixtures/data/.

Every expected value below is written as a closed-form expression so the
numbers stay traceable to the scenario, never to any solver output.
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "fairalloc" / "fixtures" / "data"

FIXTURES = {}


def fixture(name, provenance, instance, assertions):
    FIXTURES[name] = (
        {"schema": 1, **instance},
        {"provenance": provenance, "assertions": assertions},
    )


# Two users on an 18 CPU / 36 GB server, per-task needs (1 CPU, 4 GB) and
# (3 CPU, 1 GB), equal entitlements.  With task caps 5 and 3 both users cap
# out and nothing saturates; the biggest capacity fractions held are then
# 5/18 CPU vs 20/36 GB for the first user and 9/18 CPU vs 3/36 GB for the
# second.
fixture(
    "example1",
    "bounded two-user server: 18 CPUs / 36 GB, per-task needs (1 CPU, 4 GB) vs (3 CPU, 1 GB), caps 5 and 3",
    {
        "demands": [[1 / 18, 4 / 36], [3 / 18, 1 / 36]],
        "weights": [[0.5, 0.5], [0.5, 0.5]],
        "bounds": [5, 3],
        "p": "inf",
    },
    [
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "x": [5.0, 3.0], "tol": 1e-9},
        {"kind": "solve", "mechanism": "waterfill", "p": "inf", "x": [5.0, 3.0], "tol": 1e-9},
        {
            "kind": "solve",
            "mechanism": "lmmns",
            "p": "inf",
            "max_raw_shares": [5 / 9, 1 / 2],
            "tol": 1e-9,
        },
        {"kind": "property", "x": [5.0, 3.0], "property": "pe", "holds": True},
        {"kind": "oracle_value", "objective": "welfare", "oracle": "plain", "value": 8.0, "tol": 1e-7},
    ],
)

# Same server without task caps: the classic equal-dominant-share outcome,
# both users ending at a 2/3 capacity share of their scarcest resource.
fixture(
    "example1_unbounded",
    "unbounded two-user server: 18 CPUs / 36 GB, per-task needs (1 CPU, 4 GB) vs (3 CPU, 1 GB)",
    {
        "demands": [[1 / 18, 4 / 36], [3 / 18, 1 / 36]],
        "weights": [[0.5, 0.5], [0.5, 0.5]],
        "bounds": ["inf", "inf"],
        "p": "inf",
    },
    [
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "x": [6.0, 4.0], "tol": 1e-9},
        {
            "kind": "solve",
            "mechanism": "lmmns",
            "p": "inf",
            "max_raw_shares": [2 / 3, 2 / 3],
            "tol": 1e-9,
        },
        {"kind": "ds_equal", "mechanism": "lmmns", "p": "inf", "tol": 1e-9},
    ],
)

# Three users, two resources, complementary zero demands; caps 10/5/10.
# Under any norm order the server ends up running 15 tasks in total.
fixture(
    "table1",
    "three users, two resources with complementary zero demands: rows (0.1, 0), (0, 0.1), (0.1, 0.1), caps (10, 5, 10)",
    {
        "demands": [[0.1, 0.0], [0.0, 0.1], [0.1, 0.1]],
        "weights": [[1 / 3, 1 / 3]] * 3,
        "bounds": [10, 5, 10],
        "p": "inf",
    },
    [
        {"kind": "solve", "mechanism": "lmmns", "p": 1, "total_tasks": 15.0, "tol": 1e-6},
        {"kind": "solve", "mechanism": "lmmns", "p": 2, "total_tasks": 15.0, "tol": 1e-6},
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "total_tasks": 15.0, "tol": 1e-6},
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "x": [5.0, 5.0, 5.0], "tol": 1e-6},
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "saturated": [0, 1], "tol": 1e-6},
    ],
)

# Four users, two resources, all demands positive; the norm order decides
# whether both resources fill (order 1) or resource 1 keeps slack (max norm).
fixture(
    "table2",
    "four users, two resources: rows (0.45, 0.05), (0.25, 0.25), (0.2, 0.3), (0.1, 0.4), caps 10",
    {
        "demands": [[0.45, 0.05], [0.25, 0.25], [0.2, 0.3], [0.1, 0.4]],
        "weights": [[0.25, 0.25]] * 4,
        "bounds": [10, 10, 10, 10],
        "p": 1,
    },
    [
        {"kind": "solve", "mechanism": "lmmns", "p": 1, "saturated": [0, 1], "tol": 1e-9},
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "saturated": [1], "tol": 1e-6},
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "unsaturated": [0], "slack_at_least": 0.01},
    ],
)

# Four users, two resources, one all-resource user vs three single-resource
# users, one task each.  With entitlement floors the order-1 solve stops at
# utilization 0.625 while the max-norm solve reaches 2/3.
fixture(
    "table3",
    "four users, two resources: rows (1, 1), (1, 0), (1, 0), (0, 1), caps 1, entitlement floors active",
    {
        "demands": [[1.0, 1.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        "weights": [[0.25, 0.25]] * 4,
        "bounds": [1, 1, 1, 1],
        "p": 1,
    },
    [
        {"kind": "solve", "mechanism": "modified", "p": 1, "utilization": 0.625, "tol": 1e-9},
        {
            "kind": "solve",
            "mechanism": "modified",
            "p": 1,
            "user_resource_fraction": {"user": 0, "value": 0.25},
            "tol": 1e-9,
        },
        {"kind": "solve", "mechanism": "modified", "p": "inf", "utilization": 2 / 3, "tol": 1e-9},
        {
            "kind": "solve",
            "mechanism": "modified",
            "p": "inf",
            "user_resource_fraction": {"user": 0, "value": 1 / 3},
            "tol": 1e-9,
        },
        {"kind": "oracle_value", "objective": "utilization", "oracle": "plain", "value": 1.0, "tol": 1e-7},
    ],
)

# Two users with near-identical column-1 demands (1, 1) vs (1, eps): under
# any finite norm order the first user ends below its entitlement on every
# resource, at a 1/(2^(1/p) + 1) capacity share; the max norm restores it.
fixture(
    "thm1_si_violation",
    "two users, two resources: demands (1, 1) vs (1, 1e-9), equal entitlements, generous caps",
    {
        "demands": [[1.0, 1.0], [1.0, 1e-9]],
        "weights": [[0.5, 0.5], [0.5, 0.5]],
        "bounds": [10, 10],
        "p": 2,
    },
    [
        *(
            {
                "kind": "si_witness",
                "p": p,
                "witness_user": 0,
                "held": 1.0 / (2.0 ** (1.0 / p) + 1.0),
                "entitlement": 0.5,
                "tol": 1e-4,
            }
            for p in (1, 2, 10)
        ),
        *(
            {
                "kind": "solve",
                "mechanism": "lmmns",
                "p": p,
                "task_ratio": {"user_a": 0, "user_b": 1, "value": 2.0 ** (-1.0 / p)},
                "tol": 1e-4,
            }
            for p in (1, 2, 10)
        ),
        {"kind": "solve_property", "mechanism": "lmmns", "p": "inf", "property": "si", "holds": True},
    ],
)

# One resource, four users, three heavy demanders (1/4) and one light
# (1/64 = 1/4^3).  Equal split leaves welfare 19; giving everything to the
# light user reaches 64.
fixture(
    "thm4_welfare",
    "single resource, four users: demands 1/4, 1/4, 1/4, 1/64, no caps",
    {
        "demands": [[0.25], [0.25], [0.25], [1 / 64]],
        "weights": [[0.25]] * 4,
        "bounds": ["inf"] * 4,
        "p": "inf",
    },
    [
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "x": [1.0, 1.0, 1.0, 16.0], "tol": 1e-6},
        {"kind": "oracle_value", "objective": "welfare", "oracle": "plain", "value": 64.0, "tol": 1e-6},
        {
            "kind": "oracle_ratio",
            "mechanism": "lmmns",
            "p": "inf",
            "objective": "welfare",
            "oracle": "plain",
            "value": 64.0 / 19.0,
            "tol": 1e-6,
        },
    ],
)

# Two resources, three users; the third trades six orders of magnitude less
# of resource 1.  The max-norm solve still hands it the lion's share of
# capacity; the entitlement-floor welfare optimum is 77.
_K5 = 3
_N5 = 3
_x5 = 1.0 / (1.0 - 1.0 / _N5 + 1.0 / _N5**_K5)
fixture(
    "thm5_ef_pe_si",
    "two resources, three users: rows (1/3, 1/27), (1/3, 1/27), (1/729, 1/81), no caps",
    {
        "demands": [
            [1 / 3, 1 / 27],
            [1 / 3, 1 / 27],
            [1 / 729, 1 / 81],
        ],
        "weights": [[1 / 3, 1 / 3]] * 3,
        "bounds": ["inf"] * 3,
        "p": "inf",
    },
    [
        {
            "kind": "solve",
            "mechanism": "lmmns",
            "p": "inf",
            "x": [_x5, _x5, _N5**_K5 * _x5],
            "tol": 1e-6,
        },
        {
            "kind": "oracle_value",
            "objective": "welfare",
            "oracle": "si",
            "value": float(_N5 ** (_K5 + 1) - _N5**2 + 2 * _N5 - 1),
            "tol": 1e-6,
        },
        {"kind": "solve_property", "mechanism": "lmmns", "p": "inf", "property": "ef", "holds": True},
        {"kind": "solve_property", "mechanism": "lmmns", "p": "inf", "property": "pe", "holds": True},
        {"kind": "solve_property", "mechanism": "lmmns", "p": "inf", "property": "si", "holds": True},
    ],
)

# Two resources, three users: (1/3, 1/3) vs two rows (1/3, 1/81).  The
# max-norm solve splits resource 1 evenly for utilization 1/3 + 2/81; the
# optimum saturates both resources through user 1 alone.
_K6 = 4
_N6 = 3
fixture(
    "thm6_utilization",
    "two resources, three users: rows (1/3, 1/3), (1/3, 1/81), (1/3, 1/81), no caps",
    {
        "demands": [[1 / 3, 1 / 3], [1 / 3, 1 / 81], [1 / 3, 1 / 81]],
        "weights": [[1 / 3, 1 / 3]] * 3,
        "bounds": ["inf"] * 3,
        "p": "inf",
    },
    [
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "x": [1.0, 1.0, 1.0], "tol": 1e-6},
        {
            "kind": "solve",
            "mechanism": "lmmns",
            "p": "inf",
            "utilization": 1.0 / _N6 + (_N6 - 1) / _N6**_K6,
            "tol": 1e-9,
        },
        {"kind": "oracle_value", "objective": "utilization", "oracle": "plain", "value": 1.0, "tol": 1e-6},
        {
            "kind": "oracle_ratio",
            "mechanism": "lmmns",
            "p": "inf",
            "objective": "utilization",
            "oracle": "plain",
            "value": 1.0 / (1.0 / _N6 + (_N6 - 1) / _N6**_K6),
            "tol": 1e-6,
        },
    ],
)

# Three resources, three users, demand scales spread over eight orders of
# magnitude; compares the max-norm solve with the entitlement-floor
# utilization optimum.
_K7 = 2
_N7 = 3
_x7 = 1.0 / (1.0 - 1.0 / _N7 + 1.0 / _N7**_K7)
_util7 = (_N7 - 1) / _N7 ** (4 * _K7) * _x7 + 1.0 / _N7**_K7 * _x7
_opt7 = (_N7 - 1) / _N7 ** (4 * _K7) + (_N7 ** (_K7 + 1) - _N7**2 + _N7) / _N7 ** (2 * _K7)
fixture(
    "thm7",
    "three resources, three users: rows (1/3, 1/9, 3^-8), (1/3, 1/9, 3^-8), (3^-4, 1/27, 3^-4), no caps",
    {
        "demands": [
            [1 / 3, 1 / 9, 3.0**-8],
            [1 / 3, 1 / 9, 3.0**-8],
            [3.0**-4, 1 / 27, 3.0**-4],
        ],
        "weights": [[1 / 3] * 3] * 3,
        "bounds": ["inf"] * 3,
        "p": "inf",
    },
    [
        {
            "kind": "solve",
            "mechanism": "lmmns",
            "p": "inf",
            "x": [_x7, _x7, _N7**_K7 * _x7],
            "tol": 1e-6,
        },
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "utilization": _util7, "tol": 1e-9},
        {"kind": "oracle_value", "objective": "utilization", "oracle": "si", "value": _opt7, "tol": 1e-6},
    ],
)

# Three users, two resources, unit task each fills both resources exactly;
# every user reaches its 1/3 entitlement on a full resource, yet the first
# user would rather hold the second user's bundle on both resources.
fixture(
    "thm10_bbf_ef",
    "three users, two resources: rows (1/3, 1/6), (1/2, 1/3), (1/6, 1/2), caps 2, checked at one task each",
    {
        "demands": [[1 / 3, 1 / 6], [1 / 2, 1 / 3], [1 / 6, 1 / 2]],
        "weights": [[1 / 3, 1 / 3]] * 3,
        "bounds": [2, 2, 2],
        "p": "inf",
    },
    [
        {"kind": "property", "x": [1.0, 1.0, 1.0], "property": "bbf", "holds": True},
        {
            "kind": "property",
            "x": [1.0, 1.0, 1.0],
            "property": "ef",
            "holds": False,
            "witness_user": 0,
            "witness_envies": 1,
        },
    ],
)

# Two users with mirrored demands (1/2, 1) and (1, 1/2); the log-utility
# point is (2/3, 2/3).  If the first user inflates its resource-1 demand to
# 2/3, the same mechanism hands it bundle (1/2, 3/4): 3/4 true tasks > 2/3.
fixture(
    "thm11_bbf_gsp",
    "two users, two resources: demands (1/2, 1) vs (1, 1/2), caps 1; misreport (2/3, 1) pays off",
    {
        "demands": [[0.5, 1.0], [1.0, 0.5]],
        "weights": [[0.5, 0.5]] * 2,
        "bounds": [1, 1],
        "p": "inf",
    },
    [
        {"kind": "solve", "mechanism": "ceei", "p": "inf", "x": [2 / 3, 2 / 3], "tol": 1e-6},
        {"kind": "property", "x": [2 / 3, 2 / 3], "property": "bbf", "holds": True},
        {
            "kind": "misreport",
            "solver": "ceei",
            "coalition": [0],
            "demands": {"0": [2 / 3, 1.0]},
            "reported_tasks": [0.75, 0.5],
            "true_tasks_after": 0.75,
            "profitable": True,
            "tol": 1e-5,
        },
    ],
)


def _figure4(m):
    n = m + 1
    demands = [[0.5] * m]
    for i in range(m):
        row = [0.0] * m
        row[i] = 0.5
        demands.append(row)
    return {
        "demands": demands,
        "weights": [[1.0 / n] * m] * n,
        "bounds": [2] * n,
        "p": 1,
    }


# One broad user demanding half of every resource against m single-resource
# users.  The max-norm solve hands the broad user half of everything; with
# order 1 plus entitlement floors it gets exactly a 1/(m+1) fraction.
for _m, _name in ((2, "sec7_figure4_m2"), (3, "sec7_figure4"), (4, "sec7_figure4_m4")):
    fixture(
        _name,
        f"{_m}+1 users on {_m} resources: one user demands 1/2 of everything, each other user 1/2 of one resource, caps 2",
        _figure4(_m),
        [
            {
                "kind": "solve",
                "mechanism": "lmmns",
                "p": "inf",
                "user_resource_fraction": {"user": 0, "value": 0.5},
                "tol": 1e-9,
            },
            {
                "kind": "solve",
                "mechanism": "modified",
                "p": 1,
                "user_resource_fraction": {"user": 0, "value": 1.0 / (_m + 1)},
                "tol": 1e-9,
            },
        ],
    )

# One broad unit-demand user against two cheap single-resource users
# (demand 1/8), caps 8.  The max-norm solve yields welfare 8.5; order 1 with
# floors reaches 11 by shrinking the broad user to a 1/3 fraction.
fixture(
    "thm14_welfare_counterexamples",
    "three users, two resources: rows (1, 1), (1/8, 0), (0, 1/8), caps 8",
    {
        "demands": [[1.0, 1.0], [1 / 8, 0.0], [0.0, 1 / 8]],
        "weights": [[1 / 3, 1 / 3]] * 3,
        "bounds": [8, 8, 8],
        "p": 1,
    },
    [
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "total_tasks": 8.5, "tol": 1e-9},
        {
            "kind": "solve",
            "mechanism": "lmmns",
            "p": "inf",
            "user_resource_fraction": {"user": 0, "value": 0.5},
            "tol": 1e-9,
        },
        {"kind": "solve", "mechanism": "modified", "p": 1, "total_tasks": 11.0, "tol": 1e-9},
        {
            "kind": "solve",
            "mechanism": "modified",
            "p": 1,
            "user_resource_fraction": {"user": 0, "value": 1 / 3},
            "tol": 1e-9,
        },
    ],
)

# The mirror image: one expensive broad user (unit demands) against two
# cheap single-resource users; here the floors cost welfare (4 vs 5).
fixture(
    "thm14_finite_p_suboptimal",
    "three users, two resources: rows (1/8, 1/8), (1, 0), (0, 1), caps 8",
    {
        "demands": [[1 / 8, 1 / 8], [1.0, 0.0], [0.0, 1.0]],
        "weights": [[1 / 3, 1 / 3]] * 3,
        "bounds": [8, 8, 8],
        "p": 1,
    },
    [
        {"kind": "solve", "mechanism": "lmmns", "p": "inf", "total_tasks": 5.0, "tol": 1e-9},
        {
            "kind": "solve",
            "mechanism": "lmmns",
            "p": "inf",
            "user_resource_fraction": {"user": 0, "value": 0.5},
            "tol": 1e-9,
        },
        {"kind": "solve", "mechanism": "modified", "p": 1, "total_tasks": 4.0, "tol": 1e-9},
        {
            "kind": "solve",
            "mechanism": "modified",
            "p": 1,
            "user_resource_fraction": {"user": 0, "value": 1 / 3},
            "tol": 1e-9,
        },
    ],
)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (instance, expected) in sorted(FIXTURES.items()):
        with open(OUT / f"{name}.instance.json", "w") as fh:
            json.dump(instance, fh, indent=2)
            fh.write("\n")
        with open(OUT / f"{name}.expected.json", "w") as fh:
            json.dump(expected, fh, indent=2)
            fh.write("\n")
    print(f"wrote {len(FIXTURES)} fixtures to {OUT}")


if __name__ == "__main__":
    main()
