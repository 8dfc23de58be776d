import csv
import io
import json
import subprocess
import sys

import pytest

from spinconc.cli import main
from spinconc.report import RunConfig, build_report, dicke_table, render_csv, render_json, run_report, verify


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ground_json(capsys):
    code, out, _ = run(capsys, "ground", "--cluster", "chain:12")
    assert code == 0
    d = json.loads(out)
    assert d["cluster"]["name"] == "chain:12"
    assert d["energy"]["total"] == pytest.approx(-5.387390917, abs=1e-8)
    assert d["energy"]["degeneracy"] == 1


def test_pairs_json_and_csv_carry_the_same_numbers(capsys):
    _, js, _ = run(capsys, "pairs", "--cluster", "tri:10")
    _, cs, _ = run(capsys, "pairs", "--cluster", "tri:10", "--format", "csv")
    d = json.loads(js)
    summary, table = cs.split("\n\n")
    rows = list(csv.DictReader(io.StringIO(table)))
    assert len(rows) == len(d["pairs"]) == 45
    for row, p in zip(rows, d["pairs"]):
        assert (int(row["i"]), int(row["j"])) == (p["i"], p["j"])
        assert float(row["c"]) == p["c"]
        assert float(row["gamma"]) == p["gamma"]
        assert row["class"] == p["class"]
    fields = dict(line.split(",", 1) for line in summary.splitlines()[1:])
    assert float(fields["energy.total"]) == d["energy"]["total"]
    assert float(fields["avg_concurrence"]) == d["avg_concurrence"]


def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["pairs", "--cluster", "tictactoe:12", "--output", str(a)]) == 0
    assert main(["pairs", "--cluster", "tictactoe:12", "--output", str(b), "--threads", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_degenerate_report_has_mixture_members_and_extremal(solution):
    d = build_report(solution("davidstar:12")).to_dict()
    assert d["energy"]["degeneracy"] == 2
    assert d["pairs_basis"] == "ground-space average"
    assert len(d["ground_members"]) == 2
    assert {"theta", "bond_sum", "state", "orthogonal"} <= set(d["extremal"])
    # JSON round trip of the whole report
    assert json.loads(render_json(d)) == json.loads(render_json(json.loads(render_json(d))))
    assert "\nextremal_orthogonal," in render_csv(d)


def test_cluster_file_input(tmp_path, capsys):
    path = tmp_path / "tri.json"
    path.write_text('{"name": "triangle4", "num_sites": 4, "edges": [[0,1],[1,2],[2,3],[3,0]]}')
    code, out, _ = run(capsys, "ground", "--cluster", str(path))
    assert code == 0
    assert json.loads(out)["energy"]["total"] == pytest.approx(-2.0, abs=1e-10)


@pytest.mark.parametrize(
    "argv",
    [
        ["ground", "--cluster", "hexagon:7"],
        ["ground", "--cluster", "chain:6", "--m", "9"],
        ["pairs", "--cluster", "chain:6", "--k", "0"],
        ["estimate", "--energy", "0.5"],
        ["estimate", "--lattice", "honeycomb"],
        ["dicke", "--n", "1"],
    ],
)
def test_invalid_input_exit_code(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")
    assert out == ""


def test_missing_cluster_file_is_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "ground", "--cluster", str(tmp_path / "none.json"))
    assert code == 4 and "error" in err


def test_unwritable_output_is_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "dicke", "--n", "4", "--output", str(tmp_path / "no" / "dir" / "x.json"))
    assert code == 4 and "error" in err


def test_nonconvergence_exit_code(capsys, monkeypatch):
    import functools

    import spinconc.report as rp

    monkeypatch.setattr(rp, "lowest_eigenpairs", functools.partial(rp.lowest_eigenpairs, max_iter=3))
    code, _, err = run(capsys, "ground", "--cluster", "tri:10")
    assert code == 3 and "converge" in err


@pytest.mark.parametrize("n, expected", [(2, [0, 1, 0]), (4, [0, 0.5, 1 / 3, 0.5, 0])])
def test_dicke_table(n, expected):
    rows = dicke_table(n)
    assert [r["c_closed_form"] for r in rows] == pytest.approx(expected, abs=1e-12)
    assert [r["c_explicit"] for r in rows] == pytest.approx(expected, abs=1e-12)


def test_dicke_cli_n12(capsys):
    code, out, _ = run(capsys, "dicke", "--n", "12", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    c = {int(r["m"]): float(r["c_closed_form"]) for r in rows}
    assert c[1] > c[6] and c[0] == 0.0
    assert float(rows[1]["c_explicit"]) == pytest.approx(c[1], abs=1e-12)


def test_estimate_cli(capsys):
    code, out, _ = run(capsys, "estimate")
    d = json.loads(out)
    assert code == 0
    assert d["chain"] == pytest.approx(0.386294361, abs=1e-9)
    assert d["square"] == pytest.approx(0.16, abs=1e-12)
    assert d["triangular"] == d["kagome"] == d["hypercubic:8"] == 0.0
    code, out, _ = run(capsys, "estimate", "--energy", "0.66", "--ratio", "2", "--format", "csv")
    assert out.splitlines()[1].startswith("custom,0.16")


@pytest.mark.parametrize("name", ["chain:12", "davidstar:12", "complete:6"])
def test_verify_passes(name, capsys):
    code, out, _ = run(capsys, "verify", "--cluster", name)
    d = json.loads(out)
    failed = [c for c in d["checks"] if not c["passed"]]
    assert code == 0 and d["passed"], failed


def test_verify_reports_not_applicable_checks_for_degenerate_levels():
    checks = verify(RunConfig(cluster="davidstar:12"))
    details = " ".join(c.detail for c in checks)
    assert "not applicable" in details


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(cluster="chain:6", k=0)
    with pytest.raises(ValueError):
        RunConfig(cluster="chain:6", format="xml")
    with pytest.raises(ValueError):
        RunConfig(cluster="chain:6", threads=0)


def test_report_classes_summarise_pairs():
    rep = run_report(RunConfig(cluster="chain:8"))
    d = rep.to_dict()
    assert sum(c["count"] for c in d["classes"]) == len(d["pairs"]) == 28
    for cls in d["classes"]:
        members = [p for p in d["pairs"] if p["class"] == cls["id"]]
        assert all(p["c"] == pytest.approx(cls["c"], abs=1e-9) for p in members)


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "spinconc.cli", "estimate", "--lattice", "square"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout) == {"square": pytest.approx(0.16)}
