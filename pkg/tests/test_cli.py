import csv
import io
import json
import shutil
import subprocess

import pytest

from crsobolev import __version__, reports
from crsobolev.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, reports.parse(out)


def test_verify_commutator_default(capsys):
    code, rep = run_json(capsys, "verify-commutator")
    assert code == EXIT_OK and rep["passed"]
    assert rep["parameters"]["gamma"] == "1" and rep["parameters"]["w"] == "-1/2"
    assert rep["version"] == __version__ and rep["tool"] == "crsobolev"


def test_verify_commutator_asymmetric(capsys):
    code, rep = run_json(capsys, "verify-commutator", "--n", "2", "--gamma", "3/2", "--w", "1/4",
                         "--wprime", "-7/4", "--jmax", "2", "--kmax", "2")
    assert code == EXIT_OK
    assert rep["parameters"]["wprime"] == "-7/4"


def test_verify_commutator_classical(capsys):
    code, out, _ = run(capsys, "verify-commutator", "--classical", "--n", "3", "--gamma", "1")
    assert code == EXIT_OK and "result: PASS" in out
    code, rep = run_json(capsys, "verify-commutator", "--classical", "--n", "2", "--gamma", "1/2", "--hmax", "4")
    assert code == EXIT_OK
    assert any("inverse" in n for n in rep["notes"])


@pytest.mark.parametrize("argv", [
    ["verify-commutator", "--gamma", "1", "--w", "0", "--wprime", "-1"],       # lambda_0(w) vanishes
    ["verify-commutator", "--gamma", "1", "--w", "0", "--wprime", "0"],        # constraint
    ["verify-commutator", "--gamma", "one"],                                   # parse
    ["verify-commutator", "--gamma", "3/2", "--w", "-1/4", "--wprime", "-5/4"],  # w - w' not integral
    ["verify-commutator", "--gamma", "5"],                                     # out of range
    ["compute-theta", "--theta", "3/2"],
    ["verify-sharp", "--n", "2"],
    ["no-such-command"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert err


def test_decimal_gamma_is_exact(capsys):
    code, rep = run_json(capsys, "verify-commutator", "--gamma", "0.5", "--jmax", "1", "--kmax", "1")
    assert code == EXIT_OK and rep["parameters"]["gamma"] == "1/2"


def test_negative_ratio_with_space_or_equals(capsys):
    a = run_json(capsys, "verify-commutator", "--w", "-1/2", "--wprime", "-1/2", "--jmax", "1", "--kmax", "1")
    b = run_json(capsys, "verify-commutator", "--w=-1/2", "--wprime=-1/2", "--jmax", "1", "--kmax", "1")
    assert a == b


def test_help_exits_zero(capsys):
    assert main(["--help"]) == EXIT_OK


def test_verify_sharp_cr(capsys):
    code, rep = run_json(capsys, "verify-sharp", "--gamma", "1/2", "--maxdeg", "16")
    assert code == EXIT_OK
    rows = {r["function"]: r for r in rep["rows"]}
    assert rows["F=1"]["relative_error"] < 1e-10
    assert rows["extremal"]["relative_error"] < 1e-5
    assert rows["perturbed"]["margin"] > 0
    assert any("C_{n,2k}" in n for n in rep["notes"])


def test_verify_sharp_classical(capsys):
    code, rep = run_json(capsys, "verify-sharp", "--classical", "--n", "3", "--gamma", "1", "--maxdeg", "12")
    assert code == EXIT_OK and rep["parameters"]["mode"] == "classical"


def test_verify_sharp_fails_when_truncated(capsys):
    code, rep = run_json(capsys, "verify-sharp", "--gamma", "1/2", "--maxdeg", "3", "--radius", "0.7")
    assert code == EXIT_FAIL and not rep["passed"]


def test_verify_appendix(capsys):
    code, rep = run_json(capsys, "verify-appendix")
    assert code == EXIT_OK
    assert [(r["j"], r["k"]) for r in rep["rows"]] == [(0, 0), (0, 1), (1, 1), (1, 2)]


def test_verify_appendix_failure_on_tight_tolerance(capsys):
    code, _ = run_json(capsys, "verify-appendix", "--tol", "1e-16")
    assert code == EXIT_FAIL


def test_verify_positivity(capsys):
    code, rep = run_json(capsys, "verify-positivity")
    assert code == EXIT_OK
    cr = rep["rows"][0]
    assert cr["min_value"] == "0" and cr["argmin"] == "(0,0)"


def test_verify_zonal_flags_dimension_formula(capsys):
    code, rep = run_json(capsys, "verify-zonal")
    assert code == EXIT_OK
    assert any("(j+k+n)!" in n for n in rep["notes"])
    dims = [r for r in rep["rows"] if r["check"] == "dimension"]
    assert all(r["nullspace_rank"] == r["value"] for r in dims)
    assert max(r["value"] for r in rep["rows"] if r["check"] == "addition") < 1e-10


def test_compute_theta(capsys):
    code, rep = run_json(capsys, "compute-theta", "--restarts", "8")
    assert code == EXIT_OK
    row = rep["rows"][0]
    assert row["upper_bound"] <= 2 ** 0.25 + 1e-6
    assert row["antipodal_value"] == pytest.approx(2 ** 0.25)
    assert rep["search"]["value_is"] == "upper bound"


def test_compute_theta_single_atom_fails(capsys):
    code, rep = run_json(capsys, "compute-theta", "--m-points", "1", "--restarts", "3")
    assert code == EXIT_FAIL
    assert any("infeasible" in n for n in rep["notes"])


def test_config_file_and_env(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gamma": "1/2", "jmax": 1, "kmax": 1, "format": "json"}))
    code, out, _ = run(capsys, "verify-commutator", "--config", str(cfg))
    rep = reports.parse(out)
    assert code == EXIT_OK and rep["parameters"]["gamma"] == "1/2" and rep["parameters"]["jmax"] == 1
    monkeypatch.setenv("CRSOBOLEV_CONFIG", str(cfg))
    code, out, _ = run(capsys, "verify-commutator", "--jmax", "2")
    rep = reports.parse(out)
    assert rep["parameters"]["jmax"] == 2 and rep["parameters"]["kmax"] == 1


def test_bad_config_is_usage_error(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2]")
    assert run(capsys, "verify-commutator", "--config", str(cfg))[0] == EXIT_USAGE
    assert run(capsys, "verify-commutator", "--config", str(tmp_path / "missing.json"))[0] == EXIT_USAGE


def test_output_and_csv(capsys, tmp_path):
    out_path, csv_path = tmp_path / "rep.json", tmp_path / "rows.csv"
    code, out, _ = run(capsys, "verify-positivity", "--max-degree", "8", "--format", "json",
                       "--output", str(out_path), "--csv", str(csv_path))
    assert code == EXIT_OK and out == ""
    rep = reports.parse(out_path.read_text())
    rows = list(csv.DictReader(io.StringIO(csv_path.read_text())))
    assert [r["scan"] for r in rows] == ["cr", "classical"]
    assert len(rows) == len(rep["rows"])


def test_report_round_trip(capsys):
    _, rep = run_json(capsys, "verify-commutator", "--jmax", "1", "--kmax", "1")
    assert reports.parse(reports.serialize(rep)) == rep
    with pytest.raises(ValueError):
        reports.parse(json.dumps({"tool": "crsobolev"}))


def test_exit_codes_are_stable(capsys):
    first = run(capsys, "compute-theta", "--restarts", "3", "--format", "json")
    second = run(capsys, "compute-theta", "--restarts", "3", "--format", "json")
    strip = lambda text: {k: v for k, v in json.loads(text).items() if k != "search"}
    assert first[0] == second[0] and strip(first[1]) == strip(second[1])


@pytest.mark.skipif(shutil.which("crsobolev") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["crsobolev", "verify-positivity", "--max-degree", "5"], capture_output=True, text=True)
    assert proc.returncode == 0 and "result: PASS" in proc.stdout
