import json

import pytest

from sosarch import oracle
from sosarch.cli import main
from sosarch.objectives import FitnessWeights
from sosarch.scenario import bundled_path


def test_run_tiny3_matches_oracle(tmp_path, tiny3, capsys):
    out = tmp_path / "out"
    code = main(["run", "--scenario", "tiny3", "--pop", "20", "--gens", "150", "--seed", "1",
                 "--weights", "0.333,0.333,0.334", "--out-dir", str(out)])
    assert code == 0
    for name in ("best.json", "curve.csv", "population.csv", "run.log.jsonl"):
        assert (out / name).exists()
    best = json.loads((out / "best.json").read_text())
    expect = oracle.enumerate_optimum(tiny3, FitnessWeights(0.333, 0.333, 0.334)).optimum_fitness
    assert best["global_best"]["fitness"] == expect
    assert best["global_best"]["chromosome"] == "101010"
    assert "101010" in capsys.readouterr().out


def test_missing_scenario_is_a_usage_error(capsys):
    assert main(["run"]) == 2
    assert "usage" in capsys.readouterr().err


def test_restarts_are_byte_identical(tmp_path):
    args = ["run", "--scenario", "tiny3", "--restarts", "3", "--seed", "7", "--pop", "8"]
    assert main(args + ["--out-dir", str(tmp_path / "a")]) == 0
    assert main(args + ["--out-dir", str(tmp_path / "b")]) == 0
    for name in ("best.json", "curve.csv", "population.csv", "run.log.jsonl"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_validate(tmp_path, capsys):
    assert main(["validate", "--scenario", "ew22"]) == 0
    assert "253-bit" in capsys.readouterr().out
    doc = json.loads(bundled_path("tiny3").read_text())
    doc["capabilities"][1]["system_candidates"] = {}
    (tmp_path / "bad.json").write_text(json.dumps(doc))
    assert main(["validate", "--scenario", str(tmp_path / "bad.json")]) == 2
    assert "capability B: no candidate systems" in capsys.readouterr().err
    (tmp_path / "broken.json").write_text("{")
    assert main(["validate", "--scenario", str(tmp_path / "broken.json")]) == 2


def test_bad_weights_exit_2(tmp_path, capsys):
    assert main(["run", "--scenario", "tiny3", "--weights", "0.9,0.9,0.9", "--out-dir", str(tmp_path)]) == 2
    assert main(["run", "--scenario", "tiny3", "--weight-intervals", "0.5:0.6,0.5:0.6,0.5:0.6",
                 "--out-dir", str(tmp_path)]) == 2
    assert main(["run", "--scenario", "tiny3", "--stagnation", "5", "--out-dir", str(tmp_path)]) == 2


def test_oracle_command(capsys):
    assert main(["oracle", "--scenario", "tiny3"]) == 0
    out = capsys.readouterr().out
    assert "optimum_fitness: 0.7666666666666666" in out
    assert "feasible_count: 1" in out and "- 101010" in out
    assert main(["oracle", "--scenario", "ew22"]) == 3


def test_report_command(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "--scenario", "tiny3", "--pop", "6", "--gens", "5", "--out-dir", str(out)]) == 0
    capsys.readouterr()
    assert main(["report", "--out-dir", str(out)]) == 0
    assert "scenario tiny3" in capsys.readouterr().out
    assert main(["report", "--out-dir", str(tmp_path / "nothing")]) == 3


def test_seed_file_and_intervals(tmp_path):
    out = tmp_path / "o"
    code = main(["run", "--scenario", "ew22", "--seeds", "ew22_seeds.txt", "--pop", "20", "--gens", "3",
                 "--weight-intervals", "0.2:0.5,0.2:0.5,0.2:0.5", "--seed", "4", "--out-dir", str(out)])
    assert code == 0
    best = json.loads((out / "best.json").read_text())
    w = best["weights"]
    assert abs(w["w_p"] + w["w_f"] + w["w_d"] - 1) <= 1e-9
    assert all(0.2 <= v <= 0.5 for v in w.values())


@pytest.mark.parametrize("agg", ["max", "min"])
def test_perf_aggregate_flag(tmp_path, agg):
    assert main(["run", "--scenario", "tiny3", "--pop", "6", "--gens", "2", "--perf-aggregate", agg,
                 "--out-dir", str(tmp_path)]) == 0
    best = json.loads((tmp_path / "best.json").read_text())
    assert best["perf_aggregate"] == agg
    assert best["global_best"]["objectives"]["p_sos"] == (0.9 if agg == "max" else 0.8)


def test_table_flag(tmp_path):
    doc = json.loads(bundled_path("tiny3").read_text())
    for c in doc["capabilities"]:
        c["system_candidates"], c["interface_candidates"] = {}, {}
    (tmp_path / "s.json").write_text(json.dumps(doc))
    (tmp_path / "t.csv").write_text("capability_id,kind,target_id,cost,duration,performance\n"
                                    "A,system,1,5,2,0.8\nA,system,2,3,3,0.6\nB,system,3,4,1,0.9\n"
                                    "B,interface,1,1,1,0.9\n")
    assert main(["validate", "--scenario", str(tmp_path / "s.json"), "--table", str(tmp_path / "t.csv")]) == 0
    assert main(["oracle", "--scenario", str(tmp_path / "s.json"), "--table", str(tmp_path / "t.csv")]) == 0
