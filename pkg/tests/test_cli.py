import csv
import io
import json

import pytest

from evidential import MassFunction, make_frame
from evidential.cli import main
from evidential.formats import (
    mass_from_json,
    mass_to_json,
    metadist_from_json,
    refining_from_json,
    scenario_from_json,
)

OE_EXT = {"frame": ["1", "2", "3", "4", "5", "6"], "masses": {"1+3+5": 0.5, "2+4+6": 0.5}}
LS_EXT = {"frame": ["1", "2", "3", "4", "5", "6"], "masses": {"4+5+6": 0.5, "1+2+3": 0.5}}


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def mass_files(tmp_path):
    oe = tmp_path / "oe.json"
    ls = tmp_path / "ls.json"
    oe.write_text(json.dumps(OE_EXT))
    ls.write_text(json.dumps(LS_EXT))
    return str(oe), str(ls)


def test_combine_sensor_extensions(capsys, mass_files):
    code, out, _ = run(capsys, "combine", "--m1", mass_files[0], "--m2", mass_files[1])
    assert code == 0
    data = json.loads(out)
    assert data["masses"] == {"2": 0.25, "1+3": 0.25, "5": 0.25, "4+6": 0.25}
    assert data["conflict"] == 0
    # output re-parses as a mass function
    assert len(mass_from_json(data)) == 4


def test_combine_table_and_csv(capsys, mass_files):
    code, out, _ = run(capsys, "combine", "--m1", mass_files[0], "--m2", mass_files[1], "--format", "table")
    assert code == 0 and "0.2500" in out and "conflict: 0.0000" in out
    code, out, _ = run(capsys, "combine", "--m1", mass_files[0], "--m2", mass_files[1], "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["subset", "mass"] and ["1+3", "0.25"] in rows and rows[-1] == ["conflict", "0"]


def test_combine_inline_json(capsys):
    m = json.dumps({"frame": ["a", "b"], "masses": {"a": 0.5, "a+b": 0.5}})
    code, out, _ = run(capsys, "combine", "--m1", m, "--m2", m)
    assert code == 0
    assert json.loads(out)["masses"] == {"a": 0.75, "a+b": 0.25}


@pytest.mark.parametrize("bad, message", [
    ({"frame": ["a", "b"], "masses": {"": 0.1, "a+b": 0.9}}, "m(∅) must be 0"),
    ({"frame": ["a", "b"], "masses": {"a": 0.3}}, "sum to 1"),
    ({"frame": ["a", "a"], "masses": {"a": 1.0}}, "duplicate"),
    ({"frame": ["a", "b"], "masses": {"c": 1.0}}, "not an outcome"),
    ({"frame": ["a", "b"]}, "missing key"),
    ({"frame": ["a", "b"], "masses": {"a": "half"}}, "not a number"),
    ([1, 2], "expected a JSON object"),
])
def test_invalid_mass_exit_1(capsys, bad, message):
    code, out, err = run(capsys, "combine", "--m1", json.dumps(bad), "--m2", json.dumps(OE_EXT))
    assert code == 1
    assert out == ""
    assert message in err


def test_total_conflict_exit_1(capsys):
    a = json.dumps({"frame": ["a", "b"], "masses": {"a": 1}})
    b = json.dumps({"frame": ["a", "b"], "masses": {"b": 1}})
    code, _, err = run(capsys, "combine", "--m1", a, "--m2", b)
    assert code == 1 and "total conflict" in err


def test_malformed_json_exit_1(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "bel-table", "--m", str(path))
    assert code == 1 and "not valid JSON" in err


def test_usage_errors_exit_2(capsys, tmp_path):
    assert run(capsys, "combine", "--m1", "x.json")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys)[0] == 2
    code, _, err = run(capsys, "bel-table", "--m", str(tmp_path / "missing.json"))
    assert code == 2 and "cannot read" in err
    assert run(capsys, "update", "--prior", "peaked")[0] == 2


def test_extend(capsys):
    m = json.dumps({"frame": ["odd", "even"], "masses": {"odd": 0.4, "even": 0.4, "odd+even": 0.2}})
    refining = json.dumps({"odd": ["1", "3", "5"], "even": ["2", "4", "6"]})
    code, out, _ = run(capsys, "extend", "--m", m, "--refining", refining)
    assert code == 0
    data = json.loads(out)
    assert data["frame"] == ["1", "2", "3", "4", "5", "6"]
    assert data["masses"] == {"1+3+5": 0.4, "2+4+6": 0.4, "1+2+3+4+5+6": 0.2}


def test_extend_invalid_refining(capsys):
    m = json.dumps({"frame": ["odd", "even"], "masses": {"odd": 1}})
    refining = json.dumps({"odd": ["1", "3"], "even": ["2", "4", "6"]})
    code, _, err = run(capsys, "extend", "--m", m, "--refining", refining, "--fine", "1,2,3,4,5,6")
    assert code == 1 and "do not cover" in err


def test_bel_table(capsys):
    code, out, _ = run(capsys, "bel-table", "--m", json.dumps(OE_EXT))
    table = {row["subset"]: row for row in json.loads(out)["table"]}
    assert code == 0 and len(table) == 64
    assert table["1+3+5"]["bel"] == 0.5 and table["1+3+5"]["pl"] == 0.5
    assert table["1"]["pl"] == 0.5 and table["1"]["bel"] == 0


def test_grid_and_filter(capsys):
    code, out, _ = run(capsys, "grid", "--n", "6", "--d", "6")
    assert code == 0 and json.loads(out)["count"] == 462
    code, out, _ = run(capsys, "filter", "--n", "6", "--d", "6", "--constraints", "paper", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 31
    code, out, _ = run(capsys, "filter", "--n", "6", "--d", "6", "--constraints", "paper")
    assert json.loads(out)["count"] == 30


def test_filter_custom_constraints(capsys):
    cons = json.dumps([{"subset": ["1"], "target": "1/2"}, {"subset": ["2"], "target": 0.5}])
    code, out, _ = run(capsys, "filter", "--n", "3", "--d", "2", "--constraints", cons)
    assert code == 0 and json.loads(out)["points"] == [[1, 1, 0]]
    bad = json.dumps([{"subset": ["1"], "target": "1/4"}])
    code, _, err = run(capsys, "filter", "--n", "3", "--d", "2", "--constraints", bad)
    assert code == 1 and "multiple of 1/2" in err


def test_sensor_preset_needs_die_frame(capsys):
    code, _, err = run(capsys, "filter", "--n", "4", "--d", "4", "--constraints", "paper")
    assert code == 1


def test_update_round_trip(capsys):
    ev = json.dumps([{"event": ["heads"], "successes": 1, "trials": 1}])
    code, out, _ = run(capsys, "update", "--labels", "heads,tails", "--d", "2", "--evidence", ev)
    assert code == 0
    data = json.loads(out)
    assert data["weights"] == [0, 0.333333333333, 0.666666666667]
    md = metadist_from_json(data)
    assert md.weights.tolist() == pytest.approx([0, 1 / 3, 2 / 3], abs=1e-11)


def test_update_impossible_evidence_exit_1(capsys):
    ev = json.dumps({"event": ["1", "2", "3", "4", "5", "6"], "successes": 0, "trials": 3})
    code, _, err = run(capsys, "update", "--n", "6", "--d", "3", "--evidence", ev)
    assert code == 1 and "impossible" in err


def test_update_formats(capsys):
    ev = json.dumps({"evidence": [{"event": ["1", "3", "5"], "successes": 500, "trials": 1000}]})
    code, out, _ = run(capsys, "update", "--d", "6", "--evidence", ev, "--prior", "peaked",
                       "--center", "1,1,1,1,1,1", "--concentration", "3", "--format", "table")
    assert code == 0 and "support size" in out
    code, out, _ = run(capsys, "update", "--d", "2", "--n", "2", "--format", "csv")
    assert out.splitlines()[0] == "k_1,k_2,weight"


def test_die_experiment_byte_identical(capsys):
    args = ("die-experiment", "--epsilon", "0", "--mode", "exact_half", "--format", "json")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    data = json.loads(out1)
    assert data["ds"]["combined"]["masses"] == {"2": 0.25, "1+3": 0.25, "5": 0.25, "4+6": 0.25}
    assert data["metaprob"]["constrained_count"] == 30
    assert data["metaprob"]["constrained_partition_p1_p3"] == {"1/2": 16, "1/3": 9, "1/6": 4, "0": 1}
    assert data["symmetry"] == {"ds_symmetric": True, "metaprob_symmetric": True, "metaprob_max_weight_difference": 0}
    # nested mass functions re-parse through the mass schema
    for key in ("bpa_odd_even", "extended_large_small", "combined"):
        mass_from_json(data["ds"][key])
    scenario = scenario_from_json({k: data["scenario"][k] for k in ("N", "d", "epsilon", "mode", "seed")})
    assert scenario.N == 10_000


def test_die_experiment_scenario_file_and_outputs(capsys, tmp_path):
    scenario = tmp_path / "s.json"
    scenario.write_text(json.dumps({"N": 1000, "d": 6, "epsilon": 0.1, "mode": "exact_half", "seed": 0}))
    out_path = tmp_path / "report.json"
    support = tmp_path / "support.csv"
    code, out, _ = run(capsys, "die-experiment", "--scenario", str(scenario), "--out", str(out_path),
                       "--support-csv", str(support))
    assert code == 0 and out == ""
    data = json.loads(out_path.read_text())
    assert data["scenario"]["N"] == 1000
    assert data["ds"]["combined"]["masses"]["1+2+3+4+5+6"] == pytest.approx(0.01)
    rows = list(csv.reader(io.StringIO(support.read_text())))
    assert rows[0] == ["k_1", "k_2", "k_3", "k_4", "k_5", "k_6", "weight"] and len(rows) == 31


def test_die_experiment_table_and_bad_scenario(capsys):
    code, out, _ = run(capsys, "die-experiment", "--N", "100", "--format", "table")
    assert code == 0 and "constrained points:  30" in out
    code, _, err = run(capsys, "die-experiment", "--N", "101")
    assert code == 1 and "even N" in err
    code, _, err = run(capsys, "die-experiment", "--scenario", json.dumps({"N": 10, "sides": 8}))
    assert code == 1 and "unknown keys" in err


def test_mass_json_round_trip_bit_exact():
    frame = make_frame(["a", "b", "c"])
    m = MassFunction.from_labels(frame, {"a": 0.125, ("a", "b"): 0.375, ("a", "b", "c"): 0.5})
    text = json.dumps(mass_to_json(m))
    assert mass_from_json(json.loads(text)) == m
    assert json.dumps(mass_to_json(mass_from_json(json.loads(text)))) == text


def test_refining_json_forms():
    plain = refining_from_json({"odd": ["1", "3", "5"], "even": ["2", "4", "6"]})
    assert plain.fine.labels == ("1", "2", "3", "4", "5", "6")
    full = refining_from_json({"coarse": ["even", "odd"], "fine": ["6", "5", "4", "3", "2", "1"],
                               "images": {"odd": ["1", "3", "5"], "even": ["2", "4", "6"]}})
    assert full.coarse.labels == ("even", "odd")
    assert full.image("odd").labels == ("5", "3", "1")
