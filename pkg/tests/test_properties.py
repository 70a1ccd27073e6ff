import json
import xml.etree.ElementTree as ET

import pytest

import treealpha.decomposition as decomposition
from treealpha.properties import REGISTRY, main, make_instance, run_suite, select, shrink

MODULES = ("geometry", "graph", "decomposition", "layered", "fatcover", "packing", "ptas", "cli")


def test_registry_covers_every_module():
    seen = {pid.split(".")[0] for pid in REGISTRY}
    assert set(MODULES) <= seen
    assert all(case.invariant for case in REGISTRY.values())


def test_select():
    assert select("packing.*") and all(c.pid.startswith("packing.") for c in select("packing.*"))
    assert len(select(None)) == len(REGISTRY)


def test_full_suite_passes():
    report = run_suite()
    bad = [(f["pid"], f["seed"], f["message"]) for f in report.failures]
    assert report.passed, bad


def test_mutation_is_caught_and_shrunk(monkeypatch, tmp_path):
    monkeypatch.setattr(decomposition, "augment_bags", lambda td, extra: td)
    junit, dump = tmp_path / "junit.xml", tmp_path / "failures.json"
    report = run_suite("decomposition.sqrt_compress.valid*", seeds=range(3), junit=junit, failures_json=dump)
    assert not report.passed
    for failure in report.failures:
        assert failure["shrunk_size"] <= failure["original_size"]
    assert min(f["shrunk_size"] for f in report.failures) <= 3
    root = ET.parse(junit).getroot()
    assert int(root.get("failures")) == sum(not r.passed for r in report.results)
    assert len(root.findall("testcase/failure")) == len(report.failures)
    assert len(json.loads(dump.read_text())["failures"]) == len(report.failures)


def test_parallel_matches_sequential():
    seq = run_suite("packing.*", seeds=range(4))
    par = run_suite("packing.*", seeds=range(4), jobs=2)
    assert seq.summary() == par.summary()
    assert [(r.pid, r.runs, r.failures) for r in seq.results] == [(r.pid, r.runs, r.failures) for r in par.results]


def test_shrink_removes_irrelevant_objects():
    inst = make_instance({"kind": "unit-disks", "n": 20}, 0)

    def check(x, seed):
        return "too many" if len(x.objects) >= 5 else None

    small, message = shrink(check, inst, 0)
    assert len(small.objects) == 5 and message == "too many"


def test_unknown_filter():
    with pytest.raises(ValueError):
        run_suite("no-such-property")


def test_main_lists_and_runs(capsys, tmp_path):
    assert main(["--list", "--filter", "geometry.*"]) == 0
    assert "geometry." in capsys.readouterr().out
    assert main(["--filter", "geometry.*", "--seeds", "2", "--junit", str(tmp_path / "j.xml")]) == 0
    assert (tmp_path / "j.xml").exists()
