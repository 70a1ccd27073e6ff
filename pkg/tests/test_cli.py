import csv
import json

import pytest

from treealpha import io
from treealpha.cli import main
from treealpha.geometry import horizontal_part
from treealpha.graph import intersection_graph


def gen(path, *extra):
    assert main(["generate", "--n", "16", "--seed", "1", "--out", str(path), *extra]) == 0
    return str(path)


def test_generate_is_deterministic(tmp_path):
    a = gen(tmp_path / "a.json", "--kind", "unit-disks")
    b = gen(tmp_path / "b.json", "--kind", "unit-disks")
    assert open(a).read() == open(b).read()
    assert len(json.load(open(a))["objects"]) == 16


def test_generate_grid_paths(tmp_path):
    path = gen(tmp_path / "p.json", "--kind", "grid-paths-e", "--l", "2", "--bends", "1")
    coll = io.instance_from_dict(io.read_json(path))
    assert all(hi - lo <= 2 for lo, hi in map(horizontal_part, coll.objects))


def test_decompose_and_verify(tmp_path):
    inst = gen(tmp_path / "i.json", "--kind", "unit-width-rects")
    out = tmp_path / "d.json"
    assert main(["decompose", inst, "--out", str(out)]) == 0
    doc = io.read_json(out)
    assert doc["provenance"]["verified_alpha"] <= 1
    assert main(["verify", str(out), "--instance", inst]) == 0


def test_tampered_decomposition_fails(tmp_path, capsys):
    inst = gen(tmp_path / "i.json", "--kind", "unit-disks")
    out = tmp_path / "d.json"
    assert main(["decompose", inst, "--out", str(out)]) == 0
    doc = io.read_json(out)
    g = intersection_graph(io.instance_from_dict(io.read_json(inst)))
    u, v = next(iter(g.edges()))
    for node in doc["td"]["nodes"]:
        if u in node["bag"] and v in node["bag"]:
            node["bag"].remove(u)
    io.write_json(out, doc)
    capsys.readouterr()
    assert main(["verify", str(out), "--instance", inst]) == 2
    assert "T2" in capsys.readouterr().err


def test_cover_then_verify(tmp_path):
    inst = gen(tmp_path / "i.json", "--kind", "disks")
    out = tmp_path / "c.json"
    assert main(["cover", inst, "--method", "fat", "--r", "2", "--out", str(out)]) == 0
    assert len(io.read_json(out)["elements"]) == 16
    assert main(["verify", str(out), "--instance", inst]) == 0


@pytest.mark.parametrize("problem", ["mwis", "dissociation", "induced-matching"])
def test_solve_then_verify(tmp_path, problem):
    inst = gen(tmp_path / "i.json", "--kind", "unit-disks")
    dp, brute = tmp_path / "dp.json", tmp_path / "bf.json"
    assert main(["solve", inst, "--problem", problem, "--weights", "random", "--out", str(dp)]) == 0
    assert main(["solve", inst, "--problem", problem, "--weights", "random", "--method", "brute",
                 "--out", str(brute)]) == 0
    assert io.read_json(dp)["value"] == io.read_json(brute)["value"]
    assert main(["verify", str(dp), "--instance", inst]) == 0


def test_ptas_then_verify(tmp_path):
    inst = gen(tmp_path / "i.json", "--kind", "disks")
    sol, rep = tmp_path / "s.json", tmp_path / "r.json"
    assert main(["ptas", inst, "--method", "fat-cover", "--r", "3", "--exact", "--out", str(sol),
                 "--report", str(rep)]) == 0
    assert main(["verify", str(sol), "--instance", inst]) == 0
    report = io.report_from_dict(io.read_json(rep))
    assert report.meets_guarantee()


@pytest.mark.parametrize("args", [["--method", "cover-packing", "--problem", "induced-matching"],
                                  ["--method", "distance", "--d", "4"],
                                  ["--method", "shifting", "--eps", "0.5"]])
def test_other_ptas_methods(tmp_path, args):
    inst = gen(tmp_path / "i.json", "--kind", "unit-disks")
    sol = tmp_path / "s.json"
    assert main(["ptas", inst, *args, "--exact", "--out", str(sol)]) == 0
    assert main(["verify", str(sol), "--instance", inst]) == 0


def test_exit_codes(tmp_path, monkeypatch):
    inst = gen(tmp_path / "i.json", "--kind", "unit-disks")
    assert main(["ptas", inst, "--method", "distance", "--d", "3"]) == 4
    assert main(["verify", str(tmp_path / "missing.json")]) == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["verify", str(bad)]) == 4
    monkeypatch.setenv("TREEALPHA_MAX_STATES", "2")
    assert main(["solve", inst]) == 3


def test_bench_ratio(tmp_path):
    out = tmp_path / "bench"
    assert main(["bench", "--suite", "ratio", "--max-n", "10", "--seeds", "1", "--out-dir", str(out),
                 "--jobs", "2"]) == 0
    rows = list(csv.DictReader(open(out / "bench_ratio.csv")))
    assert rows and all(r["ok"] == "True" for r in rows)
    again = tmp_path / "again"
    assert main(["bench", "--suite", "ratio", "--max-n", "10", "--seeds", "1", "--out-dir", str(again)]) == 0
    strip = lambda rs: [{k: v for k, v in r.items() if k != "time"} for r in rs]
    assert strip(rows) == strip(csv.DictReader(open(again / "bench_ratio.csv")))
