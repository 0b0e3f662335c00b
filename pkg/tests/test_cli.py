import json
import subprocess
import sys

import pytest

from maxdyn.cli import run
from maxdyn.graph import generate, read_edge_list


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


def test_exact_path4_prints_8(capsys):
    code, out, _ = call(capsys, "exact", "--family", "path", "--n", "4", "--valuation", "2,2,1,1")
    assert code == 0 and body(out) == ["8"]


def test_exact_prints_fraction(capsys):
    code, out, _ = call(capsys, "exact", "--family", "complete", "--n", "5",
                        "--valuation", "2,2,1,1,1")
    assert code == 0 and body(out) == ["55/6"]


def test_period_complete3(capsys):
    code, out, _ = call(capsys, "period", "--family", "complete", "--n", "3")
    assert code == 0 and body(out) == ["1"]


def test_params_complete6(capsys):
    code, out, _ = call(capsys, "params", "--family", "complete", "--n", "6", "--format", "json")
    res = json.loads(out)["result"]
    assert res["phi_prime"]["float"] == 1 and res["orbit_b"] == 2
    code, out, _ = call(capsys, "params", "--family", "complete", "--n", "6")
    assert "phi: 1" in body(out) and "b: 2" in body(out)


def test_config_header_is_echoed(capsys):
    _, out, _ = call(capsys, "mc", "--family", "path", "--n", "4", "--trials", "50", "--seed", "9")
    head = dict(line[2:].split(": ", 1) for line in out.splitlines() if line.startswith("# "))
    assert json.loads(head["seed"]) == 9
    assert json.loads(head["trials"]) == 50
    assert json.loads(head["max_rounds"]) == 800
    assert json.loads(head["graph"]) == {"family": "path", "n": 4}
    assert json.loads(head["valuation"]) == [2, 2, 1, 1]


def test_json_output_is_byte_identical(capsys):
    argv = ["mc", "--family", "random-sc", "--n", "6", "--trials", "300", "--seed", "41",
            "--format", "json"]
    _, a, _ = call(capsys, *argv)
    _, b, _ = call(capsys, *argv)
    assert a == b
    _, c, _ = call(capsys, *argv[:-4], "--seed", "42", "--format", "json")
    assert c != a


def test_seed_env_fallback(capsys, monkeypatch):
    argv = ["simulate", "--family", "complete", "--n", "5", "--format", "json"]
    monkeypatch.setenv("MAXDYN_SEED", "1234")
    _, a, _ = call(capsys, *argv)
    assert json.loads(a)["config"]["seed"] == 1234
    monkeypatch.delenv("MAXDYN_SEED")
    _, b, _ = call(capsys, *argv, "--seed", "1234")
    assert a == b
    monkeypatch.setenv("MAXDYN_SEED", "nope")
    assert call(capsys, *argv)[0] == 2


def test_gen_round_trip(capsys, tmp_path):
    for fam, n in [("path", 5), ("dicycle", 4), ("complete", 4), ("random-sc", 7)]:
        path = tmp_path / f"{fam}.txt"
        code, _, _ = call(capsys, "gen", "--family", fam, "--n", str(n), "--seed", "3",
                          "--out", str(path))
        assert code == 0
        g = read_edge_list(path)
        if fam != "random-sc":
            assert g.edges == generate(fam, n).edges
        _, a, _ = call(capsys, "params", "--edges", str(path), "--format", "json")
        _, b, _ = call(capsys, "gen", "--edges", str(path))
        assert json.loads(a)["result"]["n"] == n
        assert read_edge_list_from_text(b, tmp_path).edges == g.edges


def read_edge_list_from_text(text, tmp_path):
    p = tmp_path / "echo.txt"
    p.write_text(text)
    return read_edge_list(p)


def test_valuation_sources(capsys, tmp_path):
    vfile = tmp_path / "f.txt"
    vfile.write_text("2 2 1 1\n")
    _, a, _ = call(capsys, "exact", "--family", "path", "--n", "4", "--valuation", str(vfile))
    assert body(a) == ["8"]
    _, b, _ = call(capsys, "exact", "--family", "path", "--n", "4", "--valuation", "constant:3")
    assert body(b) == ["0"]
    _, c, _ = call(capsys, "exact", "--family", "complete", "--n", "2", "--valuation", "worst")
    assert body(c) == ["1"]


def test_worst_and_schedule(capsys):
    _, out, _ = call(capsys, "worst", "--family", "path", "--n", "4", "--format", "json")
    res = json.loads(out)["result"]
    assert res["expected_rounds"] == {"num": 185, "den": 18, "float": 185 / 18}
    _, out, _ = call(capsys, "schedule", "--family", "path", "--n", "4",
                     "--valuation", "2,1,1,1", "--format", "json")
    res = json.loads(out)["result"]
    assert res["schedule"] == [1, 2, 3] and res["final_valuation"] == [2, 2, 2, 2]


def test_simulate_records(capsys):
    _, out, _ = call(capsys, "simulate", "--family", "path", "--n", "5", "--seed", "2",
                     "--format", "json")
    res = json.loads(out)["result"]
    assert res["converged_at"] == len(res["records"])
    assert res["records"][-1]["valuation"] == [2, 2, 2, 2, 2]
    _, out, _ = call(capsys, "simulate", "--family", "path", "--n", "5", "--seed", "2",
                     "--digest-only", "--format", "json")
    assert all("valuation" not in r for r in json.loads(out)["result"]["records"])


def test_csv_outputs(capsys):
    _, out, _ = call(capsys, "scaling", "--family", "complete", "--ns", "4,6", "--trials", "200",
                     "--format", "csv")
    rows = body(out)
    assert rows[0].split(",")[:2] == ["family", "n"]
    assert len(rows) == 3
    _, out, _ = call(capsys, "mc", "--family", "complete", "--n", "4", "--trials", "100",
                     "--format", "csv")
    assert body(out)[0].startswith("trials,mean")


def test_couple(capsys):
    code, out, _ = call(capsys, "couple", "--q", "0.1", "--p-seq", "0.3,0.5", "--trials", "5000",
                        "--format", "json")
    res = json.loads(out)["result"]
    assert code == 0 and res["dominance_violations"] == 0


@pytest.mark.parametrize("argv, code, flag", [
    (["exact", "--n", "4"], 2, "--family"),
    (["exact", "--family", "path"], 2, "--n"),
    (["mc", "--family", "path", "--n", "4", "--trials", "0"], 2, "--trials"),
    (["bogus"], 2, "COMMAND"),
    (["exact", "--family", "path", "--n", "4", "--format", "xml"], 2, "--format"),
    (["scaling", "--family", "dicycle"], 2, "--family"),
])
def test_usage_errors(capsys, argv, code, flag):
    got, _, err = call(capsys, *argv)
    assert got == code
    assert flag in err


def test_domain_errors(capsys, tmp_path):
    # a dipath is not strongly connected, so the schedule is undefined
    p = tmp_path / "dipath.txt"
    p.write_text("3 2\n0 1\n1 2\n")
    code, _, err = call(capsys, "schedule", "--edges", str(p), "--valuation", "1,2,3")
    assert code == 1 and "NotStronglyConnected" in err
    code, _, err = call(capsys, "exact", "--family", "path", "--n", "4", "--valuation", "1,2")
    assert code == 1
    code, _, err = call(capsys, "params", "--edges", str(tmp_path / "missing.txt"))
    assert code == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "maxdyn", "exact", "--family", "path", "--n", "4",
                           "--valuation", "2,2,1,1", "--format", "json"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["result"]["expected_rounds"]["num"] == 8
