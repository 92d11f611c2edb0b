import csv
import io
import json
import math
from pathlib import Path

import jsonschema
import pytest

from coh1 import geometry as geo
from coh1.cli import SolveReport, dumps17, main, parse_range, run_to_string

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "solve_report.schema.json").read_text())


def solve_json(*argv):
    code, out = run_to_string(["solve", *argv, "--format", "json"])
    assert code == 0
    return json.loads(out)


def test_quadric_example():
    d = solve_json("--geometry", "quadric", "--n", "3")
    jsonschema.validate(d, SCHEMA)
    got = {round(r["x_value"], 10): r["classification"] for r in d["roots"]}
    assert got == {round(1 / 3, 10): "Minimal", 0.5: "ProperBiharmonic"}


def test_r_harmonic_sphere_example():
    d = solve_json("--geometry", "sphere", "--n", "4", "--order", "3")
    (root,) = d["roots"]
    assert math.sin(root["t_root"]) ** 2 == pytest.approx(1 / 3, abs=1e-12)


def test_deformed_su3_example():
    d = solve_json("--geometry", "su3", "--cheeger-s", "1")
    inside = [r for r in d["roots"] if 0 < r["t_root"] < math.pi / 6]
    assert len(inside) == 1 and inside[0]["classification"] == "ProperBiharmonic"


def test_json_round_trip_is_exact():
    d = solve_json("--geometry", "hpn", "--n", "3")
    rep = SolveReport.from_dict(d)
    assert SolveReport.from_dict(json.loads(dumps17(rep.to_dict()))) == rep
    assert [r["t_root"] for r in d["roots"]] == sorted(r["t_root"] for r in d["roots"])


def test_output_is_deterministic():
    a = solve_json("--geometry", "cpn", "--n", "3", "--p", "1")
    b = solve_json("--geometry", "cpn", "--n", "3", "--p", "1")
    a.pop("elapsed_ms"), b.pop("elapsed_ms")
    assert a == b


def test_seventeen_digits():
    assert dumps17(0.1) == "0.10000000000000001"
    assert dumps17({"a": [1, True, None]}) == '{\n  "a": [\n    1,\n    true,\n    null\n  ]\n}'


def test_sweep_cheeger_csv_counts():
    code, out = run_to_string(["sweep", "--geometry", "s2xs2_su2", "--cheeger", "0:1:0.5", "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    proper = lambda s: [r for r in rows if float(r["cheeger_s"]) == s and r["classification"] == "ProperBiharmonic"]
    assert not proper(0.0) and proper(1.0)


def test_sweep_orders_json(monkeypatch):
    monkeypatch.setenv("COH1_THREADS", "2")
    code, out = run_to_string(["sweep", "--geometry", "sphere", "--n", "3", "--orders", "2,3,4,5,6",
                               "--format", "json"])
    assert code == 0
    reports = json.loads(out)
    for rep in reports:
        jsonschema.validate(rep, SCHEMA)
        r = rep["order_r"]
        assert rep["roots"][0]["t_root"] == pytest.approx(math.asin(1 / math.sqrt(r)), abs=1e-10)


def test_sweep_range_parsing():
    assert parse_range("0:2:0.25") == pytest.approx([0.25 * i for i in range(9)])


@pytest.mark.parametrize("argv", [
    ["solve", "--geometry", "nowhere"],
    ["solve", "--geometry", "clifford", "--n", "4"],
    ["solve", "--geometry", "sphere", "--n", "2", "--cheeger-s", "-1"],
    ["solve", "--geometry", "sphere", "--n", "2", "--order", "1"],
    ["sweep", "--geometry", "sphere", "--n", "2", "--cheeger", "1:0:0.1"],
    ["sweep", "--geometry", "sphere", "--n", "2", "--orders", ""],
    ["stability", "--warped-leaf", "2"],
    ["krmap", "degree", "--j", "1", "--codim0", "odd", "--codim1", "odd", "--weyl-order", "5"],
    ["verify", "--filter", "no-such-check"],
    [],
])
def test_usage_errors_exit_2(argv):
    assert main(argv, io.StringIO()) == 2


def test_bad_thread_cap(monkeypatch):
    monkeypatch.setenv("COH1_THREADS", "zero")
    assert main(["sweep", "--geometry", "sphere", "--n", "2", "--orders", "2,3"], io.StringIO()) == 2


def test_catalog_listing_and_description():
    code, out = run_to_string(["catalog"])
    assert code == 0 and "clifford(n, k)" in out
    code, out = run_to_string(["catalog", "--geometry", "clifford", "--n", "4", "--k", "1"])
    fam = geo.PtFamily.from_dict(json.loads(out))
    assert fam.dimension == 4 and [b["profile"]["kind"] for b in json.loads(out)["blocks"]] == ["CosSq", "SinSq"]


def test_stability_command():
    code, out = run_to_string(["stability", "--geometry", "quadric", "--n", "4"])
    orbit = json.loads(out)["orbits"][0]
    assert code == 0 and orbit["criterion"] == pytest.approx(-64, abs=1e-9) and orbit["unstable"]
    code, out = run_to_string(["stability", "--warped-leaf", "2", "--t", "0.5"])
    assert json.loads(out)["nullity"] == 4


def test_krmap_shoot_then_verify(tmp_path):
    path = tmp_path / "r.csv"
    assert main(["krmap", "shoot", "--geometry", "sphere", "--n", "3", "--out", str(path)], io.StringIO()) == 0
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == ["t", "r", "rdot", "F"]
    assert max(abs(float(r["r"]) - float(r["t"])) for r in rows) < 1e-4
    out = tmp_path / "fg.csv"
    assert main(["krmap", "verify", "--geometry", "sphere", "--n", "3", "--table", str(path),
                 "--out", str(out)], io.StringIO()) == 0
    assert len(list(csv.DictReader(out.open()))) == 50


def test_krmap_degree():
    code, out = run_to_string(["krmap", "degree", "--j", "1", "--codim0", "even", "--codim1", "odd",
                               "--weyl-order", "6"])
    assert code == 0 and json.loads(out) == {"k": 4, "degree": -1}


def test_foliation_commands(tmp_path):
    code, out = run_to_string(["foliation", "torus", "--a", "0.5", "--samples", "500"])
    d = json.loads(out)
    assert code == 0 and d["c1_periodic"] and d["partition"]
    path = tmp_path / "dw.csv"
    assert main(["foliation", "doubly", "--n", "2", "--m", "3", "--out", str(path)], io.StringIO()) == 0
    assert max(abs(float(r["residual"])) for r in csv.DictReader(path.open())) < 1e-12


def test_verify_filter_runs_only_matching_checks():
    code, out = run_to_string(["verify", "--filter", "hpn"])
    assert code == 0
    assert "3/3 checks passed" in out


def test_verify_names_corrupted_check(monkeypatch):
    monkeypatch.setattr(geo, "cpn_eta_sq", lambda n, p: 1.5)
    code, out = run_to_string(["verify", "--filter", "cpn"])
    assert code == 1
    assert "[FAIL]  3  CP^n tubes match closed-form quadratic" in out
