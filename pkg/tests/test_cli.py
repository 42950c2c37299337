import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from lgtrans import cli

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# --- selection-rules -----------------------------------------------------------


def test_selection_rules_l2(capsys, tmp_path):
    path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "selection-rules", "--l", "2", "--order", "2", "--csv", str(path))
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split()[:3] == ["p", "l_prime", "sgn_l"]
    assert len(lines) == 4
    data = rows(path.read_text())
    assert [(r["p"], r["l_prime"], r["delta_M"], r["delta_M_expr"]) for r in data] == [
        ("0", "0", "2", "l"),
        ("1", "0", "2", "l"),
        ("0", "1", "1", "l-1"),
    ]


def test_selection_rules_negative_quadrupole(capsys):
    code, out, _ = run(capsys, "selection-rules", "--l", "-3")
    assert code == 0
    last = out.splitlines()[-1].split()
    assert last[:3] == ["0", "1", "-1"] and last[4:8] == ["-2", "-1", "0", "-2"] and last[8] == "-|l|+1"


def test_selection_rules_untwisted_dipole(capsys):
    code, out, _ = run(capsys, "selection-rules", "--l", "0", "--order", "1")
    assert code == 0
    body = out.splitlines()[1:]
    assert len(body) == 1 and body[0].split()[7] == "0"


def test_selection_rules_byte_stable(capsys):
    a = run(capsys, "selection-rules", "--l", "4")[1]
    b = run(capsys, "selection-rules", "--l", "4")[1]
    assert a == b


@pytest.mark.parametrize(
    "argv",
    [
        ["selection-rules"],
        ["selection-rules", "--l", "x"],
        ["selection-rules", "--l", "1", "--order", "3"],
        ["cm-spectrum", "--l", "2", "--wr-ratio", "-1"],
        ["scan", "--wr-ratios", "1e-4,abc"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


# --- cm-spectrum ------------------------------------------------------------


def test_cm_spectrum_csv_dialect(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, _, _ = run(capsys, "cm-spectrum", "--l", "2", "--output", str(path))
    assert code == 0
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    assert raw.splitlines()[0] == b"N_f,M_f,l_prime,P_cm,P_cm_normalized"
    for r in rows(raw.decode()):
        assert float(repr(float(r["P_cm"]))) == float(r["P_cm"])
        assert format(float(r["P_cm"]), ".17g") == r["P_cm"]


def test_cm_spectrum_l2_structure(capsys):
    code, out, _ = run(capsys, "cm-spectrum", "--l", "2")
    assert code == 0
    data = rows(out)
    nz = {(int(r["N_f"]) - 6, int(r["l_prime"])) for r in data if float(r["P_cm"]) > 0}
    assert nz == {(-2, 0), (0, 0), (2, 0), (-1, 1), (1, 1)}
    assert max(float(r["P_cm_normalized"]) for r in data if r["N_f"] == "6") == 1.0
    for r in data:
        if float(r["P_cm"]) > 0:
            assert int(r["M_f"]) == 2 - int(r["l_prime"])


def test_cm_spectrum_l3_richer(capsys):
    data = rows(run(capsys, "cm-spectrum", "--l", "3")[1])
    nz = {(int(r["N_f"]) - 6, int(r["l_prime"])) for r in data if float(r["P_cm"]) > 0}
    assert {d for d, lp in nz if lp == 0} == {-3, -1, 1, 3}
    assert {d for d, lp in nz if lp == 1} == {-2, 0, 2}


def test_cm_spectrum_untwisted(capsys):
    data = rows(run(capsys, "cm-spectrum", "--l", "0")[1])
    assert all(r["M_f"] == "0" for r in data if float(r["P_cm"]) > 0)


def test_cm_spectrum_zero_reference_exits_1(capsys):
    code, _, err = run(capsys, "cm-spectrum", "--l", "2", "--ref-nf", "9")
    assert code == 1 and "reference" in err


# --- scan ---------------------------------------------------------------------


def test_scan_structure_and_fallback_warning(capsys):
    code, out, err = run(capsys, "scan", "--l-max", "9")
    assert code == 0
    assert "warning" in err and "elastic" in err
    data = rows(out)
    assert [int(r["l"]) for r in data] == sorted(int(r["l"]) for r in data)
    for r in data:
        l, lp = int(r["l"]), int(r["l_prime"])
        if float(r["P_cm"]) > 0:
            assert lp == l % 2


def test_scan_slopes_from_csv(capsys):
    data = rows(run(capsys, "scan", "--l-min", "6", "--l-max", "8", "--wr-ratios", "1e-6,1e-5,1e-4,1e-3,1e-2")[1])
    by = {}
    for r in data:
        if float(r["P_cm"]) > 0:
            by.setdefault((int(r["l"]), int(r["l_prime"])), []).append((float(r["wr_ratio"]), float(r["P_cm"])))
    assert set(by) == {(6, 0), (7, 1), (8, 0)}
    for (l, lp), pts in by.items():
        x, y = np.log10([p[0] for p in pts]), np.log10([p[1] for p in pts])
        assert np.polyfit(x, y, 1)[0] == pytest.approx(2 * (l - lp), abs=1e-8)


def test_scan_threads_byte_identical(capsys, monkeypatch, tmp_path):
    outs = []
    for n in ("1", "4"):
        monkeypatch.setenv(cli.THREADS_ENV, n)
        path = tmp_path / f"scan{n}.csv"
        assert run(capsys, "scan", "--l-min", "-4", "--output", str(path))[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("value", ["zero", "0", "-2"])
def test_scan_bad_thread_env(capsys, monkeypatch, value):
    monkeypatch.setenv(cli.THREADS_ENV, value)
    code, _, err = run(capsys, "scan")
    assert code == 2 and cli.THREADS_ENV in err


def test_scan_l_range_validation(capsys):
    assert run(capsys, "scan", "--l-min", "3", "--l-max", "1")[0] == 2


# --- evaluate -----------------------------------------------------------------


def test_evaluate_dipole_scenario(capsys):
    code, out, _ = run(capsys, "evaluate", "--scenario", str(SCENARIOS / "hydrogen_1s_2p_dipole.json"))
    assert code == 0
    rep = json.loads(out)
    assert rep["conservation"]["ok"] and rep["conservation"]["violations"] == []
    assert rep["total"]["probability"] > 0
    for ch in rep["channels"]:
        assert ch["channel"]["l_prime"] == 0
        dm = ch["final"]["m"] - ch["initial"]["m"]
        assert dm == ch["channel"]["sigma"]
    assert rep["resolved"]["K_f"] == pytest.approx(40.0)


def test_evaluate_delta_M_violation_is_clean_zero(capsys):
    code, out, _ = run(capsys, "evaluate", "--scenario", str(SCENARIOS / "delta_M_violation.json"))
    assert code == 0
    rep = json.loads(out)
    assert rep["total"]["amplitude"] == [0.0, 0.0]
    assert rep["channels"] == [] and rep["conservation"]["ok"]


def test_evaluate_bad_masses(capsys):
    code, _, err = run(capsys, "evaluate", "--scenario", str(SCENARIOS / "bad_masses.json"))
    assert code == 2 and "$.atom" in err


def test_evaluate_schema_paths(capsys, tmp_path):
    doc = json.loads((SCENARIOS / "hydrogen_1s_2p_dipole.json").read_text())
    doc["final"]["cm"]["N"] = -1
    doc["beam"]["eps"]["0"] = "big"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "evaluate", "--scenario", str(path))
    assert code == 2
    assert "$.final.cm.N" in err and "$.beam.eps.0" in err


def test_evaluate_semantic_paths(capsys, tmp_path):
    doc = json.loads((SCENARIOS / "hydrogen_1s_2p_dipole.json").read_text())
    doc["final"]["electronic"]["l"] = 2
    doc["initial"]["cm"]["M"] = 1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "evaluate", "--scenario", str(path))
    assert code == 2
    assert "$.final.electronic" in err and "$.initial.cm" in err


def test_evaluate_unreadable(capsys, tmp_path):
    bad = tmp_path / "x.json"
    bad.write_text("{not json")
    assert run(capsys, "evaluate", "--scenario", str(bad))[0] == 2
    assert run(capsys, "evaluate", "--scenario", str(tmp_path / "missing.json"))[0] == 2


def test_evaluate_include_zero_and_factors(capsys, tmp_path):
    doc = json.loads((SCENARIOS / "hydrogen_1s_2p_dipole.json").read_text())
    doc["output"] = {"include_zero": True, "factors": True}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    rep = json.loads(run(capsys, "evaluate", "--scenario", str(path))[1])
    nz = [c for c in rep["channels"] if c["probability"] > 0]
    assert len(rep["channels"]) > len(nz) >= 1
    f = nz[0]["factors"]
    amp = complex(*nz[0]["amplitude"])
    prod = complex(*f["coefficient"]) * f["cm_radial"] * f["electronic_radial"] * f["angular"] * complex(*f["eps"])
    assert prod == pytest.approx(amp, rel=1e-12)


# --- verify -------------------------------------------------------------------


def test_verify_lambda_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "lambda")
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert all("max_error" in c and "tolerance" in c for c in rep["checks"])


def test_verify_radial_suite_500_cases(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "radial")
    rep = json.loads(out)
    assert code == 0
    closed = next(c for c in rep["checks"] if c["name"] == "cm_radial_closed_form_vs_exact")
    assert closed["n"] == 500 and closed["max_error"] < 1e-9


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lgtrans", "selection-rules", "--l", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and "CM transition" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "lgtrans", "selection-rules"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_cm_spectrum_shared_reference(capsys):
    own = rows(run(capsys, "cm-spectrum", "--l", "3")[1])
    shared = rows(run(capsys, "cm-spectrum", "--l", "3", "--ref-l", "2")[1])
    ref2 = max(float(r["P_cm"]) for r in rows(run(capsys, "cm-spectrum", "--l", "2")[1]) if r["N_f"] == "6")
    for a, b in zip(own, shared):
        assert a["P_cm"] == b["P_cm"]
        assert float(b["P_cm_normalized"]) == pytest.approx(float(b["P_cm"]) / ref2, rel=1e-15)
