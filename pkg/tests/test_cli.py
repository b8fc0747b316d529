from __future__ import annotations

import json
import subprocess
import sys

import pytest

from splitauth.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, run
from splitauth.constructions import catalog, latin_square_td
from splitauth.designs import SourceDistribution, dump, from_document


@pytest.fixture
def fixtures(tmp_path):
    paths = {}
    for name in ["five_point", "array9", "sbibd9", "amd_z9", "amd_z10", "z25_base", "sbibd25", "skew2"]:
        paths[name] = str(tmp_path / f"{name}.json")
        dump(catalog(name), paths[name])
    return paths


def test_catalog_round_trip():
    code, doc = run(["catalog", "sbibd9"])
    assert code == EXIT_OK and from_document(doc) == catalog("sbibd9")
    code, doc = run(["catalog", "nope"])
    assert code == EXIT_USAGE and doc["error"] == "usage_error"


def test_develop_amd(fixtures):
    code, doc = run(["develop", fixtures["amd_z9"]])
    assert code == EXIT_OK and from_document(doc) == catalog("sbibd9")
    code, doc = run(["develop", fixtures["z25_base"]])
    assert code == EXIT_OK and from_document(doc).b == 25


def test_verify_bibd(fixtures):
    code, doc = run(["verify", fixtures["sbibd9"], "--bibd"])
    assert code == EXIT_OK and doc["lambda"] == 1 and doc["is_bibd"]
    code, doc = run(["verify", fixtures["array9"]])
    assert code == EXIT_FAIL and doc["witness"] == [0, 1] and doc["witness_count"] == 0


def test_verify_other_checks(fixtures, tmp_path):
    assert run(["verify", fixtures["sbibd25"], "--equitable"])[0] == EXIT_OK
    perm = json.dumps([(x + 1) % 9 for x in range(9)])
    assert run(["verify", fixtures["sbibd9"], "--automorphism", perm])[0] == EXIT_OK
    assert run(["verify", fixtures["sbibd9"], "--automorphism", "[0, 0]"])[0] == EXIT_USAGE
    code, doc = run(["verify", fixtures["sbibd9"], "--group-generated", "--group", "9"])
    assert code == EXIT_OK and doc["semiregular"]
    assert run(["verify", fixtures["sbibd9"], "--group-generated", "--group", "10"])[0] == EXIT_USAGE
    code, doc = run(["verify", "--necessary", "13", "2", "2"])
    assert code == EXIT_FAIL and not doc["holds"]
    td = tmp_path / "td.json"
    dump(latin_square_td(4), td)
    code, doc = run(["verify", str(td), "--gdd"])
    assert code == EXIT_OK and doc["type"] == "4^3"


def test_analyze(fixtures):
    code, doc = run(["analyze", fixtures["five_point"]])
    assert code == EXIT_OK and doc["value"] == "1/2"
    code, doc = run(["analyze", fixtures["five_point"], "--dist", fixtures["skew2"]])
    assert doc["value"] == "1/2"
    code, doc = run(["analyze", fixtures["five_point"], "--impersonation"])
    assert doc["value"] == "4/5"
    code, doc = run(["analyze", fixtures["sbibd9"], "--any-distribution"])
    assert doc["value"] == "1/2" and doc["witness"]["source"] == 0
    code, doc = run(["analyze", fixtures["sbibd9"], "--secrecy"])
    assert code == EXIT_OK and doc["universal"]
    code, doc = run(["analyze", fixtures["sbibd9"], "--messages"])
    assert set(doc["overall"]) == {"1/9"}
    code, doc = run(["analyze", fixtures["five_point"], "--brute-force"])
    assert code == EXIT_OK and doc["value"] == "1/2"
    code, doc = run(["analyze", fixtures["sbibd25"], "--brute-force"])
    assert code == EXIT_BUDGET and doc["error"] == "budget_exceeded"


def test_tightness_seeded(fixtures):
    a = run(["analyze", fixtures["sbibd9"], "--tightness", "--seed", "0x10"])
    b = run(["analyze", fixtures["sbibd9"], "--tightness", "--seed", "16"])
    assert a == b and a[0] == EXIT_OK and a[1]["all_derangements_equal"]


def test_bounds(fixtures):
    code, doc = run(["bounds", fixtures["sbibd9"]])
    assert {k: doc[k] for k in ("substitution", "impersonation", "blundo", "simmons", "new_bound")} == {
        "substitution": "1/4", "impersonation": "4/9", "blundo": "1/4", "simmons": "4/9", "new_bound": "1/4"}


def test_amd(fixtures):
    code, doc = run(["amd", fixtures["amd_z9"], "--weak"])
    assert doc["value"] == "1/4" and doc["witness"] == [1]
    assert run(["amd", fixtures["amd_z9"], "--strong"])[1]["value"] == "1/2"
    assert run(["amd", fixtures["amd_z9"], "--r-optimal"])[0] == EXIT_OK
    code, doc = run(["amd", fixtures["amd_z10"], "--r-optimal"])
    assert code == EXIT_FAIL and not doc["c_regular"]


def test_order_and_search(fixtures, tmp_path):
    code, doc = run(["order", fixtures["z25_base"], "--method", "development"])
    assert code == EXIT_OK and from_document(doc) == catalog("sbibd25")
    code, doc = run(["search", "--v", "25", "--m", "3", "--c", "2"])
    assert code == EXIT_OK and doc["blocks"] == [[[0, 1], [2, 4], [12, 20]]]
    assert run(["search", "--v", "13", "--m", "2", "--c", "2"])[0] == EXIT_USAGE
    assert run(["search", "--v", "25", "--m", "3", "--c", "2", "--budget", "3"])[0] == EXIT_BUDGET
    assert run(["search", "--v", "25", "--m", "4", "--c", "1"]) == (EXIT_FAIL, {
        "kind": "report", "command": "search", "found": False})


def test_construct_73(tmp_path):
    plan = {"kind": "plan", "steps": [{"op": "td", "n": 12}, {"op": "order"},
                                      {"op": "splitting-inflate", "c": 2},
                                      {"op": "fill", "filler": {"catalog": "sbibd25"}}]}
    path = tmp_path / "plan.json"
    path.write_text(json.dumps(plan))
    code, doc = run(["construct", str(path)])
    assert code == EXIT_OK and doc["v"] == 73
    out = tmp_path / "d73.json"
    out.write_text(json.dumps(doc))
    code, rep = run(["verify", str(out)])
    assert code == EXIT_OK and rep["lambda"] == 1


def test_construct_bad_plan(tmp_path):
    path = tmp_path / "plan.json"
    path.write_text(json.dumps({"kind": "plan", "steps": [{"op": "teleport"}]}))
    code, doc = run(["construct", str(path)])
    assert code == EXIT_USAGE and doc["path"] == "$.steps[0].op"


def test_schema_error_exit(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "splitting_system", "v": 3, "blocks": [[[0], "x"]]}))
    code, doc = run(["verify", str(bad)])
    assert code == EXIT_USAGE and doc["error"] == "schema_error" and doc["path"] == "$.blocks[0][1]"


def test_wrong_document_kind(fixtures):
    code, doc = run(["amd", fixtures["sbibd9"]])
    assert code == EXIT_USAGE and "amd_code" in doc["message"]


def test_bad_arguments():
    assert run(["analyze"])[0] == EXIT_USAGE
    assert run(["frobnicate"])[0] == EXIT_USAGE


def test_main_prints_json(fixtures, capsys):
    assert main(["analyze", fixtures["sbibd9"]]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["value"] == "1/4"


def test_console_entry_point(fixtures):
    proc = subprocess.run([sys.executable, "-m", "splitauth.cli", "bounds", fixtures["five_point"]],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["blundo"] == "1/2"


def test_dist_document(fixtures, tmp_path):
    path = tmp_path / "d.json"
    dump(SourceDistribution(("1/2", "1/2")), path)
    assert run(["bounds", fixtures["sbibd9"], "--dist", str(path)])[1]["substitution"] == "1/4"
