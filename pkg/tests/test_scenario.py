import copy
import json

import numpy as np
import pytest

from sosarch.errors import ParseError, ValidationError
from sosarch.scenario import (Attributes, bundled_path, load_scenario, random_scenario, save_scenario,
                              scenario_from_dict, scenario_to_dict, validate_scenario)

from conftest import make_scenario


@pytest.fixture
def tiny3_doc():
    return json.loads(bundled_path("tiny3").read_text())


def write(tmp_path, doc, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def test_tiny3_loads(tiny3):
    assert (tiny3.n_sys, tiny3.n_if, tiny3.n_cap) == (3, 1, 2)
    assert tiny3.expected_duration == 5
    a, b = tiny3.capabilities
    assert a.system_candidates[2] == Attributes(3, 3, 0.6)
    assert b.interface_candidates == {1: Attributes(1, 1, 0.9)}
    assert tiny3.interfaces[0].endpoints == (1, 3)


def test_empty_system_candidates_rejected(tmp_path, tiny3_doc):
    tiny3_doc["capabilities"][1]["system_candidates"] = {}
    with pytest.raises(ValidationError) as exc:
        load_scenario(write(tmp_path, tiny3_doc))
    assert "capability B: no candidate systems" in exc.value.violations


def test_ew22_shape(ew22):
    assert ew22.n_sys == 22
    assert ew22.layout.total_bits == 253
    assert ew22.n_cap == 5
    assert "SYNTHETIC" in ew22.meta["description"]


def test_validate_tiny3_is_clean(tiny3):
    assert validate_scenario(tiny3) == []


def test_unreachable_floor():
    s = make_scenario(2, [("A", 10, 5, 0.9, {1: (1, 1, 0.8), 2: (2, 1, 0.7)}, {})])
    assert validate_scenario(s) == ["capability A: performance floor unreachable"]


def test_interface_with_equal_endpoints():
    s = make_scenario(3, [("A", 10, 5, 0.1, {1: (1, 1, 0.8)}, {})], interfaces=[(3, 3)])
    assert validate_scenario(s) == ["interface 1: endpoints must differ, j < j'"]


def test_other_invariants_are_named():
    s = make_scenario(3, [("A", 10, 5, 0.1, {1: (1, 1, 0.8), 4: (1, 1, 0.8)}, {3: (1, 1, 1)}),
                          ("A", -1, 5, 0.1, {1: (1, 1, float("nan"))}, {})],
                      interfaces=[(1, 2), (1, 2)], t_exp=0)
    problems = validate_scenario(s)
    assert "scenario: expected_duration must be finite and > 0" in problems
    assert "interface 2: duplicate endpoint pair of interface 1" in problems
    assert "capability A: unknown system 4" in problems
    assert "capability A: unknown interface 3" in problems
    assert "capability A: duplicate id" in problems
    assert "capability A: budget must be finite and >= 0" in problems
    assert "capability A: system 1 performance must be finite and >= 0" in problems


def test_no_single_candidate_meets_all_limits():
    # cheap one too slow, fast one too expensive
    s = make_scenario(2, [("A", 3, 2, 0.5, {1: (1, 5, 0.9), 2: (9, 1, 0.9)}, {})])
    assert validate_scenario(s) == ["capability A: no candidate system meets budget, deadline and floor together"]


def test_jointly_infeasible_scenario():
    # A alone needs S1 or S2 within budget 4, B forces S1, C forces S2, and
    # sharing is free but S1 and S2 together blow A's budget
    s = make_scenario(2, [("A", 4, 5, 0.1, {1: (3, 1, 0.5), 2: (3, 1, 0.5)}, {}),
                          ("B", 9, 5, 0.1, {1: (1, 1, 0.5)}, {}),
                          ("C", 9, 5, 0.1, {2: (1, 1, 0.5)}, {})])
    assert validate_scenario(s) == ["scenario: no architecture satisfies all capabilities jointly"]


def test_validate_is_pure(tiny3):
    before = copy.deepcopy(scenario_to_dict(tiny3))
    assert validate_scenario(tiny3) == validate_scenario(tiny3)
    assert scenario_to_dict(tiny3) == before


def test_malformed_documents(tmp_path, tiny3_doc):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_scenario(bad)
    with pytest.raises(ParseError):
        load_scenario(tmp_path / "missing.json")
    del tiny3_doc["systems"]
    with pytest.raises(ParseError):
        load_scenario(write(tmp_path, tiny3_doc))


def test_validation_error_message_joins_violations():
    err = ValidationError(["a: x", "b: y"])
    assert str(err) == "a: x; b: y"
    assert err.violations == ["a: x", "b: y"]


@pytest.mark.parametrize("seed", range(8))
def test_json_round_trip(tmp_path, seed):
    s = random_scenario(np.random.default_rng(seed), 2 + seed % 5, 1 + seed % 3)
    save_scenario(s, tmp_path / "s.json")
    assert load_scenario(tmp_path / "s.json") == s


@pytest.mark.parametrize("seed", range(8))
def test_table_round_trip(tmp_path, seed):
    s = random_scenario(np.random.default_rng(100 + seed), 2 + seed % 5, 1 + seed % 3)
    save_scenario(s, tmp_path / "s.json", table=tmp_path / "cands.csv")
    doc = json.loads((tmp_path / "s.json").read_text())
    assert "system_candidates" not in doc["capabilities"][0]
    assert load_scenario(tmp_path / "s.json") == s


def test_round_trip_keeps_extra_keys(tmp_path, ew22):
    save_scenario(ew22, tmp_path / "e.json")
    back = load_scenario(tmp_path / "e.json")
    assert back == ew22
    assert back.meta == ew22.meta


def test_table_merged_from_separate_file(tmp_path, tiny3, tiny3_doc):
    for c in tiny3_doc["capabilities"]:
        c["system_candidates"], c["interface_candidates"] = {}, {}
    rows = ["capability_id,kind,target_id,cost,duration,performance",
            "A,system,1,5,2,0.8", "A,system,2,3,3,0.6", "B,system,3,4,1,0.9", "B,interface,1,1,1,0.9"]
    (tmp_path / "t.csv").write_text("\n".join(rows) + "\n")
    assert load_scenario(write(tmp_path, tiny3_doc), table=tmp_path / "t.csv") == tiny3


def test_table_conflicts_and_unknown_rows(tmp_path, tiny3_doc):
    path = write(tmp_path, tiny3_doc)
    (tmp_path / "t.csv").write_text("capability_id,kind,target_id,cost,duration,performance\nA,system,1,6,2,0.8\n")
    with pytest.raises(ValidationError):
        load_scenario(path, table=tmp_path / "t.csv")
    (tmp_path / "t.csv").write_text("capability_id,kind,target_id,cost,duration,performance\nZ,system,1,6,2,0.8\n")
    with pytest.raises(ValidationError):
        load_scenario(path, table=tmp_path / "t.csv")
    (tmp_path / "t.csv").write_text("capability_id,kind,target_id,cost,duration,performance\nA,link,1,6,2,0.8\n")
    with pytest.raises(ParseError):
        load_scenario(path, table=tmp_path / "t.csv")


def test_random_scenarios_validate():
    rng = np.random.default_rng(3)
    for _ in range(20):
        assert validate_scenario(random_scenario(rng, int(rng.integers(2, 7)), int(rng.integers(1, 5)))) == []


def test_scenario_from_dict_does_not_validate(tiny3_doc):
    tiny3_doc["capabilities"][0]["performance_floor"] = 5
    s = scenario_from_dict(tiny3_doc)
    assert validate_scenario(s) == ["capability A: performance floor unreachable"]
