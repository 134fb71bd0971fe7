import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from cctlab.cli import main

BUNDLES = Path(__file__).resolve().parent.parent / "bundles"


@pytest.fixture
def bundles(tmp_path):
    d = tmp_path / "bundles"
    shutil.copytree(BUNDLES, d)
    return d


def run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(bundles, capsys, cache_dir):
    code, out, _ = run(["validate", bundles / "p2.json", bundles / "k.json", bundles / "p2_const_k.json"], capsys)
    assert code == 0
    assert out.count(" ok") == 3


def test_validate_reports_kinds_and_checks(bundles, capsys, cache_dir):
    code, out, _ = run(["validate", "--json", bundles / "p2_dual_to_k.json", bundles / "p2_dual_to_k.regular.json"],
                       capsys)
    assert code == 0
    rep = json.loads(out)
    assert [w["kind"] for w in rep["witnesses"]] == ["diagram", "module"]
    assert all(w["checked"] for w in rep["witnesses"])


def test_validate_nonassociative(bundles, capsys, cache_dir):
    code, out, _ = run(["validate", bundles / "nonassociative.json"], capsys)
    assert code == 1
    assert "basis triple (1, 1, 1)" in out


def test_validate_missing_file(tmp_path, capsys, cache_dir):
    out_dir = tmp_path / "reports"
    code, out, err = run(["validate", "--out", out_dir, tmp_path / "nope.json"], capsys)
    assert code == 2
    assert "nope.json" in err and out == ""
    assert not out_dir.exists()


def test_validate_parse_error_location(tmp_path, capsys, cache_dir):
    p = tmp_path / "bad.json"
    p.write_text('{\n "objects": ["a",\n}\n')
    code, _, err = run(["validate", p], capsys)
    assert code == 2
    assert "bad.json:3:1" in err


def test_validate_missing_field(tmp_path, capsys, cache_dir):
    p = tmp_path / "alg.json"
    p.write_text(json.dumps({"dim": 1, "mul": []}))
    code, _, err = run(["validate", p], capsys)
    assert code == 2 and "unit" in err


def test_subdivide_p2(bundles, tmp_path, capsys, cache_dir):
    code, out, _ = run(["subdivide", bundles / "p2.json", "--out", tmp_path], capsys)
    assert code == 0
    C = json.loads((tmp_path / "p2.sub.json").read_text())
    assert len(C["objects"]) == 3
    code, out, _ = run(["validate", tmp_path / "p2.sub.json"], capsys)
    assert code == 0


def test_subdivide_twice_parallel_pair(bundles, tmp_path, capsys, cache_dir):
    code, out, _ = run(["subdivide", "--twice", "--json", bundles / "parallel_pair.json", "--out", tmp_path],
                       capsys)
    assert code == 0
    rep = json.loads(out)
    first, second = rep["witnesses"]
    assert (first["objects"], first["classify"]) == (4, "poset")
    assert second["classify"] == "poset"
    assert (tmp_path / "parallel_pair.sub2.json").exists()


def test_subdivide_discrete(bundles, tmp_path, capsys, cache_dir):
    code, _, _ = run(["subdivide", bundles / "discrete2.json", "--out", tmp_path], capsys)
    assert code == 0
    C = json.loads((tmp_path / "discrete2.sub.json").read_text())
    assert len(C["objects"]) == 2 and C["morphisms"] == []


def test_subdivide_general_rejected(tmp_path, capsys, cache_dir):
    p = tmp_path / "c2.json"
    p.write_text(json.dumps({"objects": ["*"], "morphisms": [{"name": "e", "dom": "*", "cod": "*"}],
                             "compose": [{"g": "e", "f": "e", "result": "id_*"}]}))
    code, _, err = run(["subdivide", p], capsys)
    assert code == 2 and "general" in err


def _hh(bundles, capsys, *args):
    code, out, err = run(["hh", "--json", *args], capsys)
    assert code == 0, err
    table = json.loads(out)
    assert [r["n"] for r in table["rows"]] == list(range(len(table["rows"])))
    return [r["dim"] for r in table["rows"]]


def test_hh_examples(bundles, capsys, cache_dir):
    assert _hh(bundles, capsys, bundles / "p2_const_k.json", "--max-degree", 2) == [1, 0, 0]
    assert _hh(bundles, capsys, bundles / "point_dual.json", "--max-degree", 2) == [2, 1, 1]
    assert _hh(bundles, capsys, bundles / "discrete2_k.json", "--max-degree", 2) == [2, 0, 0]


def test_hh_with_bimodule_and_mod(bundles, capsys, cache_dir):
    dims = _hh(bundles, capsys, bundles / "p2_dual_to_k.json", bundles / "p2_dual_to_k.regular.json")
    assert dims == [1, 1, 1, 1]
    assert _hh(bundles, capsys, bundles / "p2_const_k.json", "--mod", 7, "--method", "bar") == [1, 0, 0, 0]


def test_hh_non_poset(bundles, capsys, cache_dir):
    code, _, err = run(["hh", bundles / "parallel_pair_const_k.json"], capsys)
    assert code == 2 and "subdivide" in err


def test_hh_budget(bundles, capsys, cache_dir):
    code, _, err = run(["hh", bundles / "point_dual.json", "--max-degree", 20, "--method", "bar"], capsys)
    assert code == 2 and "budget" in err


def test_hh_cache_byte_identical(bundles, tmp_path, capsys, cache_dir):
    args = ["hh", bundles / "p2_dual_to_k.json", "--out"]
    run(args + [tmp_path / "cold", "--no-cache"], capsys)
    run(args + [tmp_path / "warm1"], capsys)
    assert list(cache_dir.glob("*.json"))
    run(args + [tmp_path / "warm2"], capsys)
    cold = (tmp_path / "cold" / "hh.json").read_bytes()
    assert cold == (tmp_path / "warm1" / "hh.json").read_bytes() == (tmp_path / "warm2" / "hh.json").read_bytes()
    assert not list(cache_dir.glob("*.tmp"))


def test_hh_cache_sees_referenced_files(bundles, capsys, cache_dir):
    before = _hh(bundles, capsys, bundles / "p2_const_k.json", "--max-degree", 1)
    # swap the algebra at 0 for k[x]/x^2 through the referenced file only
    (bundles / "k_copy.json").write_text((bundles / "k.json").read_text())
    raw = json.loads((bundles / "p2_const_k.json").read_text())
    raw["algebras"]["0"] = "k_copy.json"
    (bundles / "p2_const_k.json").write_text(json.dumps(raw))
    assert _hh(bundles, capsys, bundles / "p2_const_k.json", "--max-degree", 1) == before
    (bundles / "k_copy.json").write_text((bundles / "dual_numbers.json").read_text())
    raw["homs"]["0<1"] = [["1"], ["0"]]
    (bundles / "p2_const_k.json").write_text(json.dumps(raw))
    assert _hh(bundles, capsys, bundles / "p2_const_k.json", "--max-degree", 1) == [1, 1]


def test_check_exit_and_determinism(tmp_path, capsys, cache_dir):
    code, out, _ = run(["check", "prop21", "--no-cache", "--out", tmp_path / "a"], capsys)
    assert code == 0 and "PASS" in out
    run(["check", "prop21", "--no-cache", "--out", tmp_path / "b"], capsys)
    run(["check", "prop21", "--out", tmp_path / "c"], capsys)
    run(["check", "prop21", "--out", tmp_path / "d"], capsys)
    files = [(tmp_path / x / "prop21.json").read_bytes() for x in "abcd"]
    assert len(set(files)) == 1
    assert "wall_time" not in json.loads(files[0])


def test_check_seed_changes_instance(tmp_path, capsys, cache_dir):
    run(["check", "prop32", "--seed", "1", "--samples", "5", "--out", tmp_path / "s1"], capsys)
    run(["check", "prop32", "--seed", "2", "--samples", "5", "--out", tmp_path / "s2"], capsys)
    a = json.loads((tmp_path / "s1" / "prop32.json").read_text())
    b = json.loads((tmp_path / "s2" / "prop32.json").read_text())
    assert a["instance"] != b["instance"] and a["outcome"] and b["outcome"]


def test_check_failure_exit_code(monkeypatch, capsys, cache_dir):
    import cctlab.checks as checks

    def broken(cfg, report):
        report.control("mutation", False)
    monkeypatch.setitem(checks.SUITES, "prop21", broken)
    code, out, _ = run(["check", "prop21", "--no-cache"], capsys)
    assert code == 1 and "FAIL" in out


def test_usage_errors(capsys, cache_dir):
    assert run(["check", "nonsense"], capsys)[0] == 2
    assert run([], capsys)[0] == 2
    assert run(["check", "prop21", "--mod", "4"], capsys)[0] == 2


def test_console_script(cache_dir):
    exe = shutil.which("cctlab")
    cmd = [exe] if exe else [sys.executable, "-m", "cctlab.cli"]
    r = subprocess.run(cmd + ["validate", str(BUNDLES / "p2.json")], capture_output=True, text=True)
    assert r.returncode == 0 and "ok" in r.stdout
