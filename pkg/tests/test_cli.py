from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from teachdim.cli import main
from teachdim.engines import td_of_sigma
from teachdim.hypotheses import load_hc
from teachdim.preference import check_family, is_collusion_free, load_pref

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def d(name):
    return os.path.join(DATA, name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out) if out.strip() else None, err


def _values(report):
    return {r["measure"]: r["value"] for r in report["results"]}


def test_compute_all_warmuth(capsys):
    code, rep, _ = run_json(capsys, "compute", "all", d("warmuth.hc"))
    assert code == 0
    vals = _values(rep)
    assert (vals["vcd"], vals["wc_td"], vals["rtd"], vals["nctd"]) == (2, 3, 3, 2)


def test_compute_small(capsys):
    assert _values(run_json(capsys, "compute", "vcd", d("powerset3.hc"))[1])["vcd"] == 3
    assert _values(run_json(capsys, "compute", "nctd", d("singleton.hc"))[1])["nctd"] == 0


def test_compute_tdsigma(capsys):
    code, rep, _ = run_json(capsys, "compute", "tdsigma", "--class", d("warmuth.hc"), "--pref", d("warmuth_lvs.pref"),
                            "--h0", "h1")
    assert code == 0 and _values(rep)["td_sigma"] == 1
    code, rep, _ = run_json(capsys, "compute", "tdsigma", "--class", "warmuth", "--pref", "warmuth:const", "--h0", "all")
    assert code == 0
    text = json.dumps(rep)
    assert "3" in text


def test_json_is_deterministic(capsys):
    a = run(capsys, "compute", "all", d("warmuth.hc"), "--format", "json")[1]
    b = run(capsys, "compute", "all", d("warmuth.hc"), "--format", "json")[1]
    assert a == b


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--class", d("warmuth.hc"), "--pref", d("warmuth_lvs.pref"),
                       "--h0", "h1", "--target", "h3", "--sequence", "x3")
    assert code == 0 and out.splitlines()[0].startswith("t=1 z=(x3,1)")
    code, _, _ = run(capsys, "simulate", "--class", d("warmuth.hc"), "--pref", d("warmuth_const.pref"),
                     "--h0", "h1", "--target", "h1")
    assert code == 0
    code, rep, _ = run_json(capsys, "simulate", "--class", d("warmuth.hc"), "--pref", d("warmuth_local.pref"),
                            "--h0", "h1", "--target", "h3", "--sequence", "x3:1,x4:1")
    assert code == 0 and rep["trajectory"]["steps_used"] == 2
    code, _, _ = run(capsys, "simulate", "--class", d("warmuth.hc"), "--pref", d("warmuth_local.pref"),
                     "--h0", "h1", "--target", "h3", "--sequence", "x3:1")
    assert code == 1


def test_verify(capsys):
    assert run(capsys, "verify", "collusion-free", "--class", d("warmuth.hc"), "--pref", d("warmuth_const.pref"))[0] == 0
    code, rep, _ = run_json(capsys, "verify", "collusion-free", "--class", d("adversarial.hc"),
                            "--pref", d("adversarial_lvs.pref"), "--h0", "c")
    v = rep["verdicts"][0]
    assert code == 1 and v["holds"] is False and v["counterexample"]["S"] == [[0, 0]]
    assert run(capsys, "verify", "non-clashing", "--class", "warmuth", "--mapping", "warmuth-gvs")[0] == 0
    assert run(capsys, "verify", "family", "--class", "warmuth", "--pref", d("warmuth_lvs.pref"),
               "--family", "gvs")[0] == 1


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.hc"
    bad.write_text("hc 1\n3 2\n01\n")
    code, _, err = run(capsys, "compute", "vcd", str(bad))
    assert code == 2 and "error [" in err
    assert run(capsys, "compute", "vcd", str(tmp_path / "missing.hc"))[0] == 2
    code, _, err = run(capsys, "compute", "tdsigma", "--class", d("powerset3.hc"), "--pref", d("warmuth_gvs.pref"))
    assert code == 2 and "hash-mismatch" in err
    assert run(capsys, "simulate", "--class", "warmuth", "--pref", "warmuth:const", "--target", "h1",
               "--sequence", "x3:1")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["compute", "nope"])
    assert e.value.code == 2


def test_resource_error(capsys):
    code, _, err = run(capsys, "compute", "nctd", d("powerset4.hc"), "--budget-nodes", "2")
    assert code == 3 and "node-budget" in err


def test_double_too_large(capsys):
    code, _, err = run(capsys, "construct", "double", d("powerset7_local.pref"))
    assert code == 3 and "class-too-large" in err


def test_env_budget(capsys, monkeypatch):
    monkeypatch.setenv("TEACHDIM_BUDGET_NODES", "2")
    assert run(capsys, "compute", "nctd", d("powerset4.hc"))[0] == 3


def test_reproduce(capsys):
    for target in ("table2", "family-sizes", "lower-bounds"):
        assert run(capsys, "reproduce", target)[0] == 0
    code, rep, _ = run_json(capsys, "reproduce", "family-sizes", "--m", "5")
    assert code == 0 and rep["value"] == 541
    code, rep, _ = run_json(capsys, "reproduce", "lower-bounds", "--d", "7")
    assert rep["value"] == 1


def test_family_size(capsys):
    assert run(capsys, "family-size", "4")[1].strip() == "75"


def test_construct_certificates_reproduce(capsys, tmp_path):
    out = tmp_path / "p7"
    code, rep, _ = run_json(capsys, "construct", "powerset7-local", "--out", str(out))
    assert code == 0
    cert = json.loads((out / "powerset7_local.cert.json").read_text())
    assert cert["verified_td"] == 3 and all(cert["property_checks"].values())
    cls = load_hc(str(out / "powerset7_local.hc"))
    sigma = load_pref(str(out / "powerset7_local.pref"), cls)
    assert cls.digest() == cert["class_hash"]
    assert td_of_sigma(cls, sigma, cert["h0"]).value == cert["verified_td"]
    assert check_family(sigma, "wsls").holds and is_collusion_free(sigma, cls, 0).holds

    code, rep, _ = run_json(capsys, "construct", "double", "--out", str(tmp_path / "d2"))
    assert code == 0 and rep["certificate"]["bound_holds"]
    s2 = str(tmp_path / "d2" / "powerset2_doubled.pref")
    code, rep, _ = run_json(capsys, "construct", "double", "--in", s2, "--out", str(tmp_path / "d4"))
    assert code == 0 and rep["certificate"]["verified_td"] <= 2 * rep["certificate"]["inputs"]["input_td"]
    code, rep, _ = run_json(capsys, "construct", "union", s2, s2, "--out", str(tmp_path / "u"))
    assert code == 0 and rep["certificate"]["subadditive"]
    ucls = load_hc(str(tmp_path / "u" / "union.hc"))
    usig = load_pref(str(tmp_path / "u" / "union.pref"), ucls)
    assert td_of_sigma(ucls, usig, 0).value == rep["certificate"]["verified_td"]


def test_construct_other(capsys):
    code, rep, _ = run_json(capsys, "construct", "order-global", "--class", "chain", "--order", "0,1,2,3")
    assert code == 0 and rep["certificate"]["verified_td"] >= 1
    code, rep, _ = run_json(capsys, "construct", "search-gap")
    assert code == 0 and rep["nctd"] == 1 and rep["rtd"] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "teachdim", "family-size", "3"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "13"
