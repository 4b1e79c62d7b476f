import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from builders import consistent_vs_noisy, identical_methods
from ratercheck.cli import main
from ratercheck.dataset import read_csv
from ratercheck.report import SCHEMA_VERSION, AnalysisReport, analyze

DATA = Path(__file__).parent / "data"
GOLDEN_CSV = DATA / "golden_12.csv"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def _close(a, b, path="$"):
    """Structural equality with a 1e-12 tolerance on floats."""
    if isinstance(a, float) or isinstance(b, float):
        assert isinstance(a, (int, float)) and isinstance(b, (int, float)), path
        assert math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12), f"{path}: {a} != {b}"
    elif isinstance(a, dict):
        assert isinstance(b, dict) and a.keys() == b.keys(), path
        for k in a:
            _close(a[k], b[k], f"{path}.{k}")
    elif isinstance(a, list):
        assert isinstance(b, list) and len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            _close(x, y, f"{path}[{i}]")
    else:
        assert a == b, f"{path}: {a!r} != {b!r}"


def _p_values(obj):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k == "p_value" and v is not None:
                yield v
            else:
                yield from _p_values(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _p_values(v)


# --- report ------------------------------------------------------------------


def test_golden_snapshot():
    golden = json.loads((DATA / "golden_12.json").read_text())
    assert golden["schema_version"] == SCHEMA_VERSION
    current = json.loads(analyze(read_csv(GOLDEN_CSV)).to_json())
    _close(current, golden)


def test_golden_report_shape():
    rep = analyze(read_csv(GOLDEN_CSV))
    assert len(rep.verdicts) == 1 and len(rep.intermethod) == 1
    assert rep.digest["projects"] == 12


def test_report_round_trip():
    rep = analyze(read_csv(GOLDEN_CSV))
    again = AnalysisReport.from_dict(json.loads(rep.to_json()))
    assert again == rep
    assert again.to_json() == rep.to_json()


@pytest.mark.parametrize("ds", [consistent_vs_noisy(), identical_methods()])
def test_text_contains_every_p_value(ds):
    rep = analyze(ds)
    text = rep.render_text()
    for p in _p_values(rep.to_dict()):
        assert format(p, ".6g") in text
    assert "Inter-rater reliability" in text and "Inter-method reliability" in text


def test_text_mentions_branch_letter():
    text = analyze(consistent_vs_noisy()).render_text()
    assert "branch f" in text or "branch e" in text
    assert "A is more consistent" in text


# --- cli: analyze ------------------------------------------------------------------


def test_analyze_json_matches_golden(capsys):
    code, out, _ = run(["analyze", GOLDEN_CSV, "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    golden = json.loads((DATA / "golden_12.json").read_text())
    doc["config"]["format"] = golden["config"]["format"]
    _close(doc, golden)


def test_analyze_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("project,method,rater,value\np1,A,r1,100\np1,A,r2,oops\n")
    code, out, err = run(["analyze", bad], capsys)
    assert code == 2 and out == "" and "line 3" in err


def test_analyze_missing_file(tmp_path, capsys):
    code, out, err = run(["analyze", tmp_path / "nope.csv"], capsys)
    assert code == 2 and out == ""


def test_analyze_single_method(tmp_path, capsys):
    path = tmp_path / "one.csv"
    path.write_text("p1,A,r1,100\np1,A,r2,104\np2,A,r1,200\np2,A,r2,195\np3,A,r1,50\np3,A,r2,52\n")
    code, out, _ = run(["analyze", path, "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert list(doc["rater_influence"]) == ["A"]
    assert doc["verdicts"] == [] and doc["intermethod"] == []


def test_fail_on_inconsistent(tmp_path, capsys):
    path = tmp_path / "d.csv"
    path.write_text(consistent_vs_noisy().to_csv())
    assert run(["analyze", path], capsys)[0] == 0
    assert run(["analyze", path, "--fail-on-inconsistent"], capsys)[0] == 1
    path.write_text(identical_methods().to_csv())
    assert run(["analyze", path, "--fail-on-inconsistent"], capsys)[0] == 0


def test_config_file_and_overrides(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 0.01, "correlation": "spearman", "format": "json"}))
    code, out, _ = run(["analyze", GOLDEN_CSV, "--config", cfg], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["config"]["alpha"] == 0.01 and doc["config"]["correlation"] == "Spearman"
    code, out, _ = run(["analyze", GOLDEN_CSV, "--config", cfg, "--alpha", "0.1", "--lilliefors", "--strong-r", "0.9"], capsys)
    doc = json.loads(out)
    assert doc["config"]["alpha"] == 0.1 and doc["config"]["lilliefors"] and doc["config"]["strong_r"] == 0.9


@pytest.mark.parametrize("cfg", ['{"alpha": 2}', '{"colour": 1}', "[]", "{broken"])
def test_bad_config(tmp_path, capsys, cfg):
    path = tmp_path / "cfg.json"
    path.write_text(cfg)
    code, out, _ = run(["analyze", GOLDEN_CSV, "--config", path], capsys)
    assert code == 2 and out == ""


def test_bad_alpha_flag(capsys):
    assert run(["analyze", GOLDEN_CSV, "--alpha", "0"], capsys)[0] == 2


# --- cli: simulate -------------------------------------------------------------------


def test_emit_then_analyze(tmp_path, capsys):
    path = tmp_path / "sim.csv"
    code, out, _ = run(["simulate", "--seed", "3", "--n-projects", "15", "--emit-dataset", path], capsys)
    assert code == 0 and out == ""
    code, out, _ = run(["analyze", path, "--format", "json"], capsys)
    assert code == 0 and len(json.loads(out)["verdicts"]) == 1


def test_simulate_stdout_deterministic(capsys):
    a = run(["simulate", "--seed", "11"], capsys)[1]
    b = run(["simulate", "--seed", "11"], capsys)[1]
    assert a == b and a.startswith("project,method,rater,value")


def test_simulate_calibration_json(capsys):
    code, out, _ = run(["simulate", "--calibrate", "MeansIndepT", "--replications", "200"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert {"rejection_rate", "standard_error", "replications", "alpha", "test_id"} <= doc.keys()
    par = run(["simulate", "--calibrate", "MeansIndepT", "--replications", "200", "--jobs", "2"], capsys)[1]
    assert par == out


def test_simulate_power(capsys):
    code, out, _ = run(["simulate", "--calibrate", "WilcoxonLarge", "--power", "0,0.5", "--replications", "100"], capsys)
    rows = json.loads(out)
    assert code == 0 and [r["effect"] for r in rows] == [0.0, 0.5]


@pytest.mark.parametrize("argv", [
    ["simulate", "--calibrate", "Bogus"],
    ["simulate", "--power", "0,1"],
    ["simulate", "--n-projects", "0"],
    ["simulate", "--calibrate", "MeansIndepT", "--power", "1,x"],
])
def test_simulate_errors(capsys, argv):
    assert run(argv, capsys)[0] == 2


def test_simulate_spec_file(tmp_path, capsys):
    code, out, _ = run(["simulate", "--config", DATA / "golden_spec.json"], capsys)
    assert code == 0 and out == read_csv(GOLDEN_CSV).to_csv()
    bad = tmp_path / "spec.json"
    bad.write_text('{"methods": {"A": {"sigma": -1}}}')
    assert run(["simulate", "--config", bad], capsys)[0] == 2


# --- cli: dist -------------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["normal-quantile", "--p", "0.975"], "1.95996398454"),
        (["u-critical", "--na", "3", "--nb", "3", "--alpha", "0.05"], "none"),
        (["chi2-cdf", "--x", "1.38629436112", "--df", "2"], "0.5"),
        (["normal-cdf", "--x", "0"], "0.5"),
        (["t-cdf", "--x", "1", "--df", "1"], "0.75"),
        (["u-pmf", "--na", "2", "--nb", "2", "--k", "2"], "0.333333333333"),
        (["w-pmf", "--n", "2", "--k", "3"], "0.25"),
        (["w-critical", "--n", "6", "--alpha", "0.05"], "0"),
        (["u-critical", "--na", "8", "--nb", "8", "--alpha", "0.05"], "13"),
        (["f-cdf", "--x", "1", "--d1", "4", "--d2", "4"], "0.5"),
    ],
)
def test_dist(capsys, argv, expected):
    code, out, _ = run(["dist"] + argv, capsys)
    assert code == 0 and out.strip() == expected


def test_dist_quantiles_round_trip(capsys):
    q = float(run(["dist", "t-quantile", "--p", "0.975", "--df", "10"], capsys)[1])
    p = float(run(["dist", "t-cdf", "--x", repr(q), "--df", "10"], capsys)[1])
    assert p == pytest.approx(0.975, abs=1e-11)
    q = float(run(["dist", "f-quantile", "--p", "0.9", "--d1", "3", "--d2", "7"], capsys)[1])
    assert q > 1
    assert float(run(["dist", "chi2-quantile", "--p", "0.95", "--df", "1"], capsys)[1]) == pytest.approx(3.84145882069, rel=1e-11)


@pytest.mark.parametrize("argv", [
    ["normal-quantile", "--p", "1.5"],
    ["t-cdf", "--x", "1"],
    ["u-pmf", "--na", "30", "--nb", "30", "--k", "1"],
    ["chi2-cdf", "--x", "-1", "--df", "2"],
])
def test_dist_errors(capsys, argv):
    code, out, err = run(["dist"] + argv, capsys)
    assert code == 2 and out == "" and err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ratercheck", "dist", "normal-cdf", "--x", "0"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "0.5"
