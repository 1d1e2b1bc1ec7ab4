import json
import subprocess
import sys
from pathlib import Path

import pytest

from synchrolab import cli, verify

FIX = Path(verify.__file__).parent / "fixtures"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_cerny4(capsys):
    code, out, _ = run(capsys, "analyze", FIX / "cerny4.aut", "--witness", "--count")
    assert code == 0
    assert "length 9" in out
    assert "shortest words: 1" in out


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", FIX / "pfa5.aut", "--json", "--witness")
    doc = json.loads(out)
    assert code == 0
    assert doc["command"] == "analyze"
    assert doc["outputs"]["length"] == 21
    assert set(doc) >= {"inputs", "outputs", "elapsed_s", "version"}


def test_analyze_not_synchronizing(capsys):
    code, out, _ = run(capsys, "analyze", FIX / "permutation.aut")
    assert code == 3 and "not synchronizing" in out


def test_analyze_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.aut"
    bad.write_text("states 2\nsymbols 1\nsym a: 1 7\n")
    code, _, err = run(capsys, "analyze", bad)
    assert code == 2 and "line 3" in err
    code, _, _ = run(capsys, "analyze", tmp_path / "missing.aut")
    assert code == 2


def test_gen_predictions(capsys):
    code, out, _ = run(capsys, "gen", "cerny", "--n", 7)
    assert code == 0 and "predicted 36, measured 36" in out
    code, out, _ = run(capsys, "gen", "tn", "--n", 5)
    assert code == 0 and "predicted 19, measured 19" in out
    code, out, _ = run(capsys, "gen", "pn", "--n", 7)
    assert code == 0 and "predicted 39" in out


def test_gen_single_undef_has_one_hole(capsys, tmp_path):
    path = tmp_path / "su.aut"
    code, _, _ = run(capsys, "gen", "single-undef", "--m", 3, "--k", 2, "--out", path)
    assert code == 0
    body = [ln for ln in path.read_text().splitlines() if ":" in ln]
    assert sum(ln.split(":", 1)[1].split().count("-") for ln in body) == 1


def test_gen_missing_parameter(capsys):
    code, _, err = run(capsys, "gen", "pfa-hm", "--h", 2)
    assert code == 2 and "--m" in err


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", 5, "--symbols", 2, "--kind", "dfa")
    assert code == 0 and out.strip() == "1-16"
    code, out, _ = run(capsys, "enumerate", "--n", 4, "--min-n", 3, "--kind", "all", "--csv")
    assert out.splitlines() == ["n,k,dfa,proper-pfa", "3,2,1-4,1-3", "4,2,1-9,1-7"]


def test_enumerate_budget(capsys):
    code, _, _ = run(capsys, "enumerate", "--n", 5, "--budget", 10)
    assert code == 4


def test_search_budget_and_resume(capsys, tmp_path):
    ck = tmp_path / "ck.json"
    code, _, err = run(capsys, "search", "--n", 4, "--budget", 20, "--checkpoint", ck)
    assert code == 4 and str(ck) in err
    code, out, _ = run(capsys, "search", "--n", 4, "--checkpoint", ck, "--resume")
    assert code == 0 and "found 12 automata with length >= 9" in out


def test_search_pfa_postprocess(capsys):
    code, out, _ = run(capsys, "search", "--n", 4, "--kind", "pfa", "--target", 10, "--postprocess")
    assert code == 0 and "fewest symbols after postprocessing: 3" in out


def test_bounds_json(capsys):
    code, out, _ = run(capsys, "bounds", FIX / "cerny4.aut")
    doc = json.loads(out)
    assert code == 0
    assert {"L", "Lprime", "Lpp"} <= set(doc["outputs"])
    assert doc["outputs"]["Lprime"] <= doc["outputs"]["L"]


def test_rewrite(capsys):
    code, out, _ = run(capsys, "rewrite", "min-steps", "--h", 2, "--m", 2, "--k", 5)
    assert code == 0 and out.strip() == "4"
    code, out, _ = run(capsys, "rewrite", "weight", "--h", 2, "--m", 2, "--start", "CCAAB")
    assert out.strip() == "4"
    code, out, _ = run(capsys, "rewrite", "derive", "--h", 2, "--m", 2, "--k", 4)
    assert out.split() == ["CCAA", "CCBA", "CCAB"]
    code, _, _ = run(capsys, "rewrite", "weight", "--start", "CXA")
    assert code == 2


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "pn")
    assert code == 0 and "FAIL" not in out
    code, out, _ = run(capsys, "verify", "p-of-n", "--max-n", 4)
    assert code == 0


def test_verify_reports_failure(capsys, monkeypatch):
    monkeypatch.setitem(verify.PN_TABLE, 7, 40)
    code, out, _ = run(capsys, "verify", "pn", "--max-n", 8)
    assert code == 1 and "FAIL  pn: n=7" in out


def test_unknown_kind():
    with pytest.raises(SystemExit):
        cli.main(["enumerate", "--n", "3", "--kind", "nfa"])


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "synchrolab.cli", "analyze", str(FIX / "cerny4.aut")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "length 9" in proc.stdout
