"""Curated instance corpus with expected outcomes.

Each fixture pairs an instance JSON with an expected JSON side file.  The
expected file carries a provenance note describing the scenario and a list
of assertions (solver outputs, property outcomes, oracle values, misreport
effects) that the test suite replays; every number in them is derivable
from the instance by hand.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..model import Instance, instance_from_json

_DATA = Path(__file__).parent / "data"


@dataclass(frozen=True)
class Fixture:
    name: str
    instance: Instance
    expected: dict
    provenance: str


def fixture_names() -> list[str]:
    return sorted(p.name[: -len(".instance.json")] for p in _DATA.glob("*.instance.json"))


def load_fixture(name: str) -> Fixture:
    inst_path = _DATA / f"{name}.instance.json"
    if not inst_path.exists():
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    with open(inst_path) as fh:
        instance = instance_from_json(json.load(fh))
    with open(_DATA / f"{name}.expected.json") as fh:
        expected = json.load(fh)
    return Fixture(
        name=name,
        instance=instance,
        expected=expected,
        provenance=expected.get("provenance", ""),
    )
