import json
import math
import os

import pytest

from meandim.cli import main, parse_caps, parse_system, validate

CARPET_FULL = {"system": "carpet", "a": 3, "b": 2,
               "omega": {"rank": 1, "alphabet": {"a": 3, "b": 2},
                         "rule": {"type": "full"}, "name": "full-3x2"},
               "weights": {"rho": "1/4"}}
MCMULLEN = {"system": "carpet", "a": 4, "b": 2,
            "omega": {"rank": 1, "alphabet": {"a": 4, "b": 2},
                      "rule": {"type": "cellwise",
                               "allowed": [[0, 0], [1, 0], [0, 1]]},
                      "name": "mcmullen"}}
GOLDEN = {"system": "subshift", "rank": 1, "alphabet": {"k": 2},
          "rule": {"type": "nearest_neighbor", "axis_forbidden": {"0": [[1, 1]]}},
          "name": "golden-mean"}
SELFSIM = {"system": "selfsimilar", "c": "1/2", "values": [0, 1],
           "omega": GOLDEN}
HOMOG = {"system": "homogeneous", "base": 2,
         "digits": {"rank": 2, "alphabet": {"k": 2}, "rule": {"type": "full"}}}
KSPACE = {"system": "kspace", "rank": 1, "kind": "kset"}


def write_spec(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_carpet_dims_full_shift(tmp_path, capsys):
    spec = write_spec(tmp_path, CARPET_FULL)
    code, report = run(capsys, ["carpet-dims", "--spec", spec,
                                "--m-max", "1", "--l-max", "2"])
    assert code == 0
    res = report["results"]
    assert abs(res["mdim_M"]["value"] - 2.0) <= 1e-9
    assert abs(res["mdim_H"]["value"] - 2.0) <= 1e-9
    assert report["status"] == "ok"


def test_carpet_dims_mcmullen(tmp_path, capsys):
    spec = write_spec(tmp_path, MCMULLEN)
    code, report = run(capsys, ["carpet-dims", "--spec", spec,
                                "--m-max", "1", "--l-max", "3"])
    assert code == 0
    res = report["results"]
    assert abs(res["mdim_H"]["value"] - math.log2(1 + math.sqrt(2))) <= 1e-9
    assert all(s["ok"] for s in res["sandwich"])


def test_entropy_golden(tmp_path, capsys):
    spec = write_spec(tmp_path, GOLDEN)
    code, report = run(capsys, ["entropy", "--spec", spec, "--m-max", "16",
                                "--folner", "boxes"])
    assert code == 0
    assert abs(report["results"]["per_site"]["value"] - 0.4909) < 2e-3
    assert report["results"]["certified_upper"]["provenance"] == "certified-bound"


def test_entropy_weighted_flag(tmp_path, capsys):
    spec = write_spec(tmp_path, {**MCMULLEN["omega"], "system": "subshift"})
    code, report = run(capsys, ["entropy", "--spec", spec, "--m-max", "2",
                                "--w", "0.5"])
    assert code == 0
    assert abs(report["results"]["per_site"]["value"]
               - math.log(1 + math.sqrt(2))) < 1e-9


def test_selfsimilar_commands(tmp_path, capsys):
    spec = write_spec(tmp_path, SELFSIM)
    code, report = run(capsys, ["selfsimilar-bound", "--spec", spec])
    assert code == 0
    assert report["results"]["bound"]["value"] == pytest.approx(
        report["results"]["entropy"]["value"] / math.log(2))
    code, report = run(capsys, ["selfsimilar-probe", "--spec", spec,
                                "--window-sizes", "512"])
    assert code == 0
    assert report["results"]["slopes"]["512"]["value"] <= \
        report["results"]["bound"] + 0.05


def test_homog_commands(tmp_path, capsys):
    spec = write_spec(tmp_path, HOMOG)
    code, report = run(capsys, ["homog-entropy", "--spec", spec,
                                "--m-max", "2", "--depths", "2", "4"])
    assert code == 0
    assert abs(report["results"]["prediction"]["value"] - 1.0) <= 1e-9
    code, report = run(capsys, ["homog-probe", "--spec", spec,
                                "--eps-grid", "1/8", "--folner", "boxes"])
    assert code == 0
    assert report["results"]["implication"]["value"] is True


def test_homog_probe_cap_abort_is_loud(tmp_path, capsys):
    # ball(1) windows push the exact pairwise cloud past the cap
    spec = write_spec(tmp_path, HOMOG)
    code, report = run(capsys, ["homog-probe", "--spec", spec,
                                "--eps-grid", "1/8", "--folner", "balls"])
    assert code == 1
    assert "cap_abort" in report["results"]


def test_kg_commands(tmp_path, capsys):
    spec = write_spec(tmp_path, KSPACE)
    code, report = run(capsys, ["kg-experiment", "--spec", spec,
                                "--m-max", "1", "--eps-grid",
                                "1/10,1/100,1/1000"])
    assert code == 0
    rows = report["results"]["rows"]
    assert all(r["bracket_ok"] for r in rows)
    code, report = run(capsys, ["kg-mass-demo", "--spec", spec,
                                "--seed", "4"])
    assert code == 0
    assert report["results"]["monotone"] is True


def test_validate_rejects_bad_specs(tmp_path, capsys):
    bad = write_spec(tmp_path, {"system": "carpet", "a": 2, "b": 3,
                                "omega": {"rank": 1,
                                          "alphabet": {"a": 2, "b": 3},
                                          "rule": {"type": "full"}}})
    code, report = run(capsys, ["validate", "--spec", bad])
    assert code == 2
    assert any("a >= b >= 2" in d for d in report["diagnostics"])
    bad_c = write_spec(tmp_path, {**SELFSIM, "c": "1"}, "c1.json")
    code, report = run(capsys, ["validate", "--spec", bad_c])
    assert code == 2
    assert any("0 < c < 1" in d for d in report["diagnostics"])


def test_validate_accepts_good_spec(tmp_path, capsys):
    spec = write_spec(tmp_path, MCMULLEN)
    code, report = run(capsys, ["validate", "--spec", spec])
    assert code == 0
    assert report["diagnostics"] == []


def test_malformed_json_exits_two_without_output(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{broken")
    out_dir = tmp_path / "out"
    code = main(["entropy", "--spec", str(path), "--out", str(out_dir)])
    captured = capsys.readouterr()
    assert code == 2
    assert captured.out == ""
    assert not out_dir.exists()


def test_command_spec_mismatch(tmp_path, capsys):
    spec = write_spec(tmp_path, GOLDEN)
    code = main(["carpet-dims", "--spec", spec])
    capsys.readouterr()
    assert code == 2


def test_determinism_modulo_timing(tmp_path, capsys):
    spec = write_spec(tmp_path, MCMULLEN)
    argv = ["carpet-dims", "--spec", spec, "--m-max", "1", "--l-max", "2",
            "--seed", "9"]
    _, first = run(capsys, argv)
    _, second = run(capsys, argv)
    first.pop("timing")
    second.pop("timing")
    assert json.dumps(first, sort_keys=True) == json.dumps(second,
                                                           sort_keys=True)


def test_out_directory_written_atomically(tmp_path, capsys):
    spec = write_spec(tmp_path, GOLDEN)
    out_dir = tmp_path / "results"
    code, _ = run(capsys, ["entropy", "--spec", spec, "--m-max", "4",
                           "--folner", "boxes", "--out", str(out_dir)])
    assert code == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert report["status"] == "ok"
    csv_text = (out_dir / "series.csv").read_text()
    assert csv_text.startswith("m,window_size")
    assert not [p for p in os.listdir(out_dir) if p.startswith(".meandim-")]


def test_parse_caps():
    caps = parse_caps("cells=500,patterns=1000")
    assert caps["cells"] == 500 and caps["patterns"] == 1000
    with pytest.raises(Exception):
        parse_caps("cells=-3")


def test_parse_system_unknown():
    with pytest.raises(Exception):
        parse_system({"system": "mystery"})
    assert validate({"system": "mystery"})


def test_thread_budget_env(monkeypatch):
    from meandim._parallel import pmap, thread_budget
    monkeypatch.setenv("MEANDIM_THREADS", "3")
    assert thread_budget() == 3
    assert pmap(lambda x: x * x, range(6)) == [0, 1, 4, 9, 16, 25]
    monkeypatch.setenv("MEANDIM_THREADS", "bogus")
    assert thread_budget() == 1


def test_out_directory_series_jsonl_for_row_reports(tmp_path, capsys):
    spec = write_spec(tmp_path, KSPACE)
    out_dir = tmp_path / "kg"
    code, _ = run(capsys, ["kg-experiment", "--spec", spec, "--m-max", "1",
                           "--eps-grid", "1/10,1/100", "--out", str(out_dir)])
    assert code == 0
    lines = (out_dir / "series.jsonl").read_text().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0])["bracket_ok"] is True
    header = (out_dir / "summary.csv").read_text().splitlines()[0]
    assert "eps" in header and "lower" in header


def test_eps_grid_validation(tmp_path, capsys):
    spec = write_spec(tmp_path, KSPACE)
    code = main(["kg-experiment", "--spec", spec, "--eps-grid", "1/100,1/10"])
    capsys.readouterr()
    assert code == 2
    code = main(["kg-experiment", "--spec", spec, "--eps-grid", "2,1/10"])
    capsys.readouterr()
    assert code == 2
