from __future__ import annotations

import json

from frobcong.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_search_m5(capsys):
    code, out = run(capsys, "search", "--m", "5")
    assert code == 0
    d = json.loads(out.out)
    assert d["total_eps"] == 256
    assert [(s["ell"], s["eps"]) for s in d["survivor_summary"]] == [(7, "-+--0+"), (11, "+++---")]
    assert d["config"]["m"] == 5 and d["config"]["command"] == "search"


def test_search_bad_m(capsys):
    code, _ = run(capsys, "search", "--m", "6")
    assert code == 2


def test_expand(capsys, tmp_path):
    code, out = run(capsys, "expand", "--m", "1", "--nmax", "10", "--format", "text")
    assert code == 0 and out.out.strip() == "1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42"
    code, out = run(capsys, "expand", "--m", "5", "--nmax", "10", "--cache-dir", str(tmp_path))
    assert code == 0 and json.loads(out.out)["cphi"][:2] == [1, 25]
    assert (tmp_path / "cphi_m5_v1.txt").read_text().startswith("cphi m=5 nmax=10 version=1")


def test_expand_env_cache_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CPHI_CACHE_DIR", str(tmp_path))
    code, _ = run(capsys, "expand", "--m", "7", "--nmax", "5")
    assert code == 0 and (tmp_path / "cphi_m7_v1.txt").exists()


def test_expand_even_m(capsys):
    code, out = run(capsys, "expand", "--m", "4")
    assert code == 2 and "odd" in out.err


def test_verify_examples(capsys):
    code, out = run(capsys, "verify", "--m", "5", "--ell", "7", "--suite", "congruence", "--format", "text")
    assert code == 0 and out.out.startswith("PASS")
    code, out = run(capsys, "verify", "--m", "5", "--ell", "7", "--suite", "theta-cycle")
    assert code == 0
    assert json.loads(out.out)["checks"][0]["detail"]["alpha"] == "6"
    code, out = run(capsys, "verify", "--m", "5", "--ell", "13", "--suite", "congruence", "--format", "text")
    assert code == 1 and "FAIL" in out.out and "witness" in out.out


def test_verify_usage(capsys):
    code, _ = run(capsys, "verify", "--m", "5", "--ell", "9")
    assert code == 2
    code, _ = run(capsys, "verify", "--m", "11", "--ell", "7", "--suite", "sturm")
    assert code == 2


def test_basis(capsys):
    code, out = run(capsys, "basis", "--m", "11", "--k", "12", "--prec", "15")
    assert code == 0 and json.loads(out.out)["index_set"] == [1, 2, 3, 4, 5, 6, 7, 8, 9, 11]
    code, out = run(capsys, "basis", "--m", "5", "--k", "28", "--prec", "16", "--shift", "r-inf")
    rows = [e["coeffs"][:6] for e in json.loads(out.out)["elements"]]
    assert rows[0] == [1, -10, 35, -30, -105, 192]
    assert rows[3] == [0, 0, 0, 1, 8, 44]
    code, _ = run(capsys, "basis", "--m", "5", "--k", "6")
    assert code == 2


def test_formats_and_out(capsys, tmp_path):
    target = tmp_path / "r.csv"
    code, _ = run(capsys, "search", "--m", "7", "--format", "csv", "--out", str(target))
    assert code == 0
    lines = target.read_text().splitlines()
    assert lines[0] == "ell,eps,classification" and lines[1].startswith("11,")
    code, out = run(capsys, "search", "--m", "5", "--out", str(tmp_path / "missing" / "x.json"))
    assert code == 2
