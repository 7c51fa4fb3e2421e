import csv
import io
import json
import subprocess
import sys

from rigidlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_field_reports(capsys):
    code, out, _ = run(capsys, "field", "--minpoly", "1,0,-2")
    assert code == 0 and "d: 2" in out and "r1: 2" in out and "r2: 0" in out
    code, out, _ = run(capsys, "field", "--minpoly", "1,8,32,80,132,144,96,32,1")
    assert code == 0 and "r1: 2" in out and "r2: 3" in out
    assert "root_1: -0.0346753641504136078648" in out


def test_field_errors(capsys):
    code, _, err = run(capsys, "field", "--minpoly", "1,0,0")
    assert code == 2 and "repeated root" in err
    code, _, _ = run(capsys, "field", "--minpoly", "1,x")
    assert code == 2


def test_slice_csv(capsys):
    code, out, _ = run(capsys, "slice", "--preset", "octic", "--S", "1,2", "--eps", "3.4", "--N", "4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 759 and all(abs(int(r["n_1"])) <= 1 for r in rows)
    code, out, _ = run(capsys, "slice", "--preset", "cubic-cartan", "--S", "", "--eps", "0.1", "--N", "2", "--angles")
    assert code == 0 and "0,0," in out
    assert run(capsys, "slice", "--eps", "-1", "--N", "2")[0] == 2
    assert run(capsys, "slice", "--S", "9", "--eps", "1", "--N", "2")[0] == 2
    assert run(capsys, "slice", "--eps", "1", "--N", "2", "--coset", "1,0")[0] == 2


def test_analyze_torsion(capsys, tmp_path):
    code, out, _ = run(
        capsys, "analyze", "--preset", "cubic-cartan", "--eps", "0.1", "--N", "4", "--point", "1/3,1/3,1/3",
        "--mc-samples", "200",
    )
    assert code == 0
    assert "classification: torsion (order 3)" in out and "orbit_bound: <= 27" in out and "exact: true" in out


def test_analyze_generic_and_outputs(capsys, tmp_path):
    args = ["analyze", "--preset", "cubic-cartan", "--eps", "0.1", "--N", "6", "--point", "random(5)",
            "--mc-samples", "200", "--out", str(tmp_path), "--svg", str(tmp_path / "a.svg")]
    assert run(capsys, *args)[0] == 0
    report = (tmp_path / "report.txt").read_text()
    assert "grid_fraction[delta=1/8]" in report and "generic-up-to" in report
    first = (tmp_path / "a.svg").read_bytes()
    assert run(capsys, *args)[0] == 0
    assert (tmp_path / "a.svg").read_bytes() == first
    assert (tmp_path / "report.txt").read_text() == report


def test_orbit_and_action_file(capsys, tmp_path):
    spec = {"min_poly": [1, 0, -2], "precision": 128, "generators": [["-1", "1"]]}
    path = tmp_path / "q2.json"
    path.write_text(json.dumps(spec))
    code, out, _ = run(capsys, "orbit", "--action", str(path), "--S", "", "--eps", "1", "--N", "1", "--point", "1/5,2/5")
    assert code == 0
    assert "1,0.6,0.8" in out.replace("000000000000000000000000000", "")
    assert run(capsys, "orbit", "--action", str(path), "--eps", "1", "--N", "1", "--point", "1/5")[0] == 2


def test_degraded_precision_exit(capsys):
    code, _, err = run(
        capsys, "orbit", "--preset", "cubic-cartan", "--precision", "64", "--eps", "100", "--N", "40",
        "--point", "random(1)",
    )
    assert code == 3 and "2^-32" in err


def test_counterexample_default(capsys):
    code, out, _ = run(capsys, "counterexample", "--mc-samples", "2000")
    assert code == 0
    assert out.count("PASS") == 8 and "FAIL" not in out


def test_counterexample_small_eps_and_zero_box(capsys):
    code, out, _ = run(capsys, "counterexample", "--eps0", "0.1", "--mc-samples", "1000")
    assert "a in [0]" in out
    code, out, _ = run(capsys, "counterexample", "--N", "0", "--mc-samples", "1000")
    assert "warning: N = 0" in out and "1 slice elements" in out


def test_dichotomy_command(capsys):
    code, out, _ = run(capsys, "dichotomy", "--preset", "cubic-cartan", "--schedule", "4,8")
    lines = out.strip().splitlines()
    assert len(lines) == 1 + 7
    assert all("| yes |" in l for l in lines[1:])
    assert code == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rigidlab.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "rigidlab" in proc.stdout


def test_dichotomy_octic_flags_assumption(capsys):
    code, out, _ = run(capsys, "dichotomy", "--preset", "octic", "--schedule", "2,4")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert rows and all("generic-up-to" in r and "assumption (2) violated" in r for r in rows)
