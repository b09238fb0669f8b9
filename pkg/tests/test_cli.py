import csv
import json
import subprocess
import sys

import pytest

from netctl.cli import main
from netctl.models import CSV_HEADER, read_records_csv


def _rows(path):
    with open(path) as fh:
        return [r for r in csv.reader(line for line in fh if not line.startswith("#"))]


def test_gen(tmp_path):
    out = tmp_path / "g.json"
    assert main(["gen", "--model", "er", "--n", "100", "--k", "6", "--pb", "0.1", "--seed", "1",
                 "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["n"] == 100 and doc["meta"]["config"]["seed"] == 1


def test_gen_edge_format_round_trips(tmp_path):
    out = tmp_path / "g.txt"
    assert main(["gen", "--n", "30", "--k", "3", "--format", "edges", "-o", str(out)]) == 0
    assert main(["analyze", str(out), "-o", str(tmp_path / "a.json")]) == 0


def test_byte_identical_without_timestamp(tmp_path):
    out = tmp_path / "g.json"
    runs = []
    for _ in range(2):
        main(["gen", "--n", "50", "--seed", "3", "--no-timestamp", "-o", str(out)])
        runs.append(out.read_bytes())
    assert runs[0] == runs[1]


def test_analyze(tmp_path, capsys):
    g = tmp_path / "p.txt"
    g.write_text("0 1\n1 2\n2 3\n")
    assert main(["analyze", str(g)]) == 0
    res = json.loads(capsys.readouterr().out)["result"]
    assert res["drivers"] == [0] and res["dc"] == 4 and res["m"] == 1


def test_chain_table(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["chain", "--lmax", "8", "--tf", "1", "-o", str(out)]) == 0
    rows = _rows(out)
    header, body = rows[0], rows[1:]
    row8 = dict(zip(header, body[-1]))
    assert int(row8["l"]) == 8 and float(row8["c_w"]) > 1e12
    assert "# config:" in out.read_text()


def test_ensemble_low_controllability(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["ensemble", "--model", "er", "--n", "100", "--k", "6", "--pb", "0.5",
                 "--trials", "500", "--seed", "9", "--no-simulate", "-o", str(out)]) == 0
    text = out.read_text()
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    recs = read_records_csv(text)
    assert len(recs) == 500
    assert sum(r.controllable for r in recs) / 500 < 0.05


def test_ensemble_threads_identical(tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["ensemble", "--n", "40", "--k", "4", "--trials", "12", "--seed", "2", "--no-timestamp"]
    assert main(base + ["--threads", "1", "-o", str(a)]) == 0
    monkeypatch.setenv("NETCTL_THREADS", "3")
    assert main(base + ["-o", str(b)]) == 0
    strip = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("#")]
    assert strip(a) == strip(b)


def test_fit_from_csv(tmp_path, capsys):
    out = tmp_path / "t.csv"
    main(["ensemble", "--n", "40", "--k", "4", "--pb", "0.1", "--trials", "200", "--seed", "1",
          "--no-simulate", "-o", str(out)])
    capsys.readouterr()
    assert main(["fit", str(out), "--kind", "d_c"]) == 0
    res = json.loads(capsys.readouterr().out)["result"]
    assert res["model"] == "exponential" and "b" in res["params"]


def test_control_and_numeric_failure(tmp_path, capsys):
    g = tmp_path / "ok.txt"
    g.write_text("0 1\n1 2\n")
    assert main(["control", str(g)]) == 0
    res = json.loads(capsys.readouterr().out)["result"]
    assert res["controllable"] and res["converged"]
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n2 3\n3 2\n")
    assert main(["control", str(bad)]) == 2


def test_augment_row(tmp_path, capsys):
    g = tmp_path / "net.txt"
    g.write_text("0 1\n1 2\n2 3\n0 4\n")
    assert main(["augment", str(g)]) == 0
    row = json.loads(capsys.readouterr().out)["result"]
    assert row["name"] == "net" and row["Mstar"] == 0


def test_circuit(capsys):
    assert main(["circuit", "--l", "5", "--inject", "3"]) == 0
    res = json.loads(capsys.readouterr().out)["result"]
    assert res["L"] == 5 and res["injections"] == [3]


def test_figures_fig3(tmp_path):
    out = tmp_path / "figs"
    assert main(["figures", "fig3", "--trials", "30", "--k", "6", "-o", str(out)]) == 0
    assert (out / "fig3a.csv").exists() and (out / "fig3b.csv").exists()


def test_figures_figA7(tmp_path):
    out = tmp_path / "figs"
    assert main(["figures", "figA7", "--trials", "3", "--n", "30", "--k", "4", "-o", str(out)]) == 0
    assert _rows(out / "figA7.csv")[0] == ["seed", "d_c", "mid", "end", "random_mid", "random_end"]


@pytest.mark.parametrize("argv", [["gen", "--bogus"], ["nope"], [], ["gen", "--n", "1"],
                                  ["analyze", "/nonexistent/file"]])
def test_bad_usage_exit_one(argv, capsys):
    assert main(argv) == 1
    assert capsys.readouterr().err


def test_console_script_unknown_flag():
    proc = subprocess.run([sys.executable, "-m", "netctl.cli", "chain", "--frobnicate"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "usage" in proc.stderr


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit):
        main(["ensemble", "--help"])
    assert "default: 10000" in capsys.readouterr().out
