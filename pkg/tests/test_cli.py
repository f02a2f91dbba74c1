import json
import math

import numpy as np
import pytest

import fairalloc as fa
from fairalloc.cli import main
from fairalloc.model import instance_to_json

EX1 = dict(demands=[[1 / 18, 4 / 36], [3 / 18, 1 / 36]], weights=[[0.5, 0.5]] * 2)


def write_instance(tmp_path, name="inst.json", **kwargs):
    inst = fa.make_instance(**kwargs)
    path = tmp_path / name
    path.write_text(json.dumps(instance_to_json(inst)))
    return path


def test_solve_bounded_example(tmp_path, capsys):
    path = write_instance(tmp_path, **EX1, bounds=[5, 3], p=math.inf)
    out = tmp_path / "alloc.json"
    code = main(["solve", str(path), "--mechanism", "lmmns", "--p", "inf", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["schema"] == 1
    assert data["mechanism"] == "lmmns"
    assert np.allclose(data["tasks"], [5.0, 3.0])
    assert data["p"] == "inf"


def test_solve_share_table_total(tmp_path, capsys):
    path = write_instance(tmp_path, demands=[[0.1, 0.0], [0.0, 0.1], [0.1, 0.1]], bounds=[10, 5, 10])
    code = main(["solve", str(path), "--mechanism", "lmmns", "--p", "1"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert sum(data["tasks"]) == pytest.approx(15.0, abs=1e-6)


def test_solve_every_mechanism_runs(tmp_path, capsys):
    path = write_instance(tmp_path, **EX1, bounds=[5, 3], p=2)
    for mech in ("lmmns", "modified", "waterfill", "ceei", "welfare-lp", "util-lp"):
        assert main(["solve", str(path), "--mechanism", mech]) == 0
        capsys.readouterr()


def test_malformed_json_exits_two(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"demands": [[0.1, 0.2],')
    assert main(["solve", str(path)]) == 2
    err = capsys.readouterr().err
    assert "line" in err and "column" in err


def test_invalid_instance_exits_two(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"demands": [[0.0, 0.0], [0.1, 0.2]]}))
    assert main(["solve", str(path)]) == 2


def test_infeasible_floors_exit_three(tmp_path, capsys):
    path = write_instance(tmp_path, demands=[[0.05, 0.01], [0.5, 0.5]], bounds=[2, 2], p=1)
    assert main(["solve", str(path), "--mechanism", "modified"]) == 3


def test_convergence_failure_exit_four(tmp_path, capsys, monkeypatch):
    from fairalloc import cli
    from fairalloc.model import ConvergenceError

    def explode(inst):
        raise ConvergenceError("stalled", residual=0.5)

    monkeypatch.setitem(cli.bench.MECHANISMS, "lmmns", explode)
    path = write_instance(tmp_path, **EX1, bounds=[5, 3], p=2)
    assert main(["solve", str(path), "--mechanism", "lmmns"]) == 4


def test_check_reports_property_outcomes(tmp_path, capsys):
    inst_path = write_instance(
        tmp_path,
        demands=[[1 / 3, 1 / 6], [1 / 2, 1 / 3], [1 / 6, 1 / 2]],
        bounds=[2, 2, 2],
        p=math.inf,
    )
    alloc_path = tmp_path / "alloc.json"
    alloc_path.write_text(json.dumps({"tasks": [1.0, 1.0, 1.0]}))
    code = main(["check", str(inst_path), str(alloc_path), "--properties", "bbf,ef"])
    assert code == 1
    reports = json.loads(capsys.readouterr().out)
    assert reports[0]["property"] == "bbf" and reports[0]["holds"] is True
    assert reports[1]["property"] == "ef" and reports[1]["holds"] is False


def test_check_passes_on_max_norm_solution(tmp_path, capsys):
    inst_path = write_instance(tmp_path, **EX1, bounds=[5, 3], p=math.inf)
    alloc_path = tmp_path / "alloc.json"
    main(["solve", str(inst_path), "--out", str(alloc_path)])
    code = main(["check", str(inst_path), str(alloc_path), "--properties", "pe,si,ef"])
    assert code == 0


def test_check_dimension_mismatch_exits_two(tmp_path, capsys):
    inst_path = write_instance(tmp_path, **EX1, bounds=[5, 3])
    alloc_path = tmp_path / "alloc.json"
    alloc_path.write_text(json.dumps({"tasks": [1.0, 1.0, 1.0]}))
    assert main(["check", str(inst_path), str(alloc_path)]) == 2
    assert main(["check", str(inst_path), str(inst_path)]) == 2


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["gen", "--n", "6", "--m", "2", "--seed", "9", "--trial", "1"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert data["users"] == 6 and data["resources"] == 2


def test_bench_writes_deterministic_csv(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = [
        "bench", "--n", "8", "--m", "2", "--p-sweep", "1,2", "--seed", "7",
        "--trials", "2", "--objective", "welfare", "--oracle", "plain",
    ]
    assert main(argv + ["--csv", str(a)]) == 0
    out = capsys.readouterr().out
    assert "p=1 mean_quality=" in out and "p=2 mean_quality=" in out
    assert main(argv + ["--csv", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == "mechanism,objective,oracle,n,m,p,seed,trial,ratio"


def test_bench_sweep_range_syntax(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert main([
        "bench", "--n", "6", "--m", "2", "--p-sweep", "1:3", "--seed", "1",
        "--trials", "1", "--csv", str(out),
    ]) == 0
    capsys.readouterr()
    assert len(out.read_text().strip().splitlines()) == 1 + 3


def test_compare_lists_each_mechanism(tmp_path, capsys):
    path = write_instance(tmp_path, **EX1, bounds=[5, 3], p=2)
    code = main(["compare", str(path), "--mechanisms", "lmmns,waterfill,ceei"])
    assert code == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["mechanism"] for r in rows] == ["lmmns", "waterfill", "ceei"]
    for row in rows:
        assert set(row) >= {"welfare", "utilization", "min_normalized_share", "tasks"}


def test_solve_output_matches_golden_schema(tmp_path):
    path = write_instance(tmp_path, **EX1, bounds=[5, 3], p=math.inf)
    out = tmp_path / "alloc.json"
    main(["solve", str(path), "--mechanism", "lmmns", "--out", str(out)])
    import pathlib

    golden = pathlib.Path(__file__).parent / "golden" / "example1_solve.json"
    assert out.read_text() == golden.read_text()
