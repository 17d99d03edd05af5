"""End-to-end CLI behaviour through the real entry point."""

import json
import subprocess
import sys

import pytest

CMD = [sys.executable, "-m", "iqsense"]


def run_cli(*args, **kw):
    return subprocess.run(
        [*CMD, *args], capture_output=True, text=True, timeout=300, **kw
    )


def test_version():
    r = run_cli("--version")
    assert r.returncode == 0
    assert r.stdout.startswith("iqsense ")


def test_analytic_stdout_csv():
    r = run_cli("analytic")
    assert r.returncode == 0
    lines = r.stdout.splitlines()
    header = [l for l in lines if l.startswith("# ")]
    assert any(l.startswith("# config_sha256=") for l in header)
    assert any(l.startswith("# seed=0") for l in header)
    assert "key,value" in lines
    assert any(l.startswith("variances.sigma0_sq,0.5") for l in lines)
    assert any(l.startswith("thresholds.s12,") for l in lines)


def test_analytic_json_structure():
    r = run_cli("analytic", "--format", "json")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["provenance"]["command"] == "analytic"
    rep = doc["report"]
    assert rep["variances_source"] == "analytic"
    assert rep["rule"]["levels"] == ["H0", "H1", "H2", "H3"]
    assert rep["paper_literal"]["p_fa"] == pytest.approx(
        rep["metrics"]["paper_sum"]["p_fa"], rel=1e-12
    )
    assert "outage" in rep


def test_analytic_merged_rule_drops_four_level_extras(tmp_path):
    cfgf = tmp_path / "c.json"
    cfgf.write_text(json.dumps({"scenario": {"tx_irr_db": None}}))
    r = run_cli("analytic", "--config", str(cfgf), "--format", "json")
    doc = json.loads(r.stdout)
    rep = doc["report"]
    assert rep["rule"]["merged"] == [["H0", "H1"], ["H2", "H3"]]
    assert "thresholds" not in rep
    assert "paper_literal" not in rep


def test_sense_deterministic_output(tmp_path):
    out1, out2, out3 = (tmp_path / f"s{i}.csv" for i in range(3))
    base = ["sense", "--trials", "20000", "--seed", "77"]
    assert run_cli(*base, "--out", str(out1)).returncode == 0
    assert run_cli(*base, "--out", str(out2)).returncode == 0
    assert run_cli(*base, "--workers", "4", "--out", str(out3)).returncode == 0
    b1, b2, b3 = out1.read_bytes(), out2.read_bytes(), out3.read_bytes()
    assert b1 == b2 == b3
    text = out1.read_text()
    assert "# command=sense" in text
    assert "tally,H0,H0," in text


def test_sense_verify_passes():
    r = run_cli("sense", "--trials", "30000", "--seed", "5", "--verify",
                "--out", "/dev/null")
    assert r.returncode == 0
    assert "verify OK" in r.stdout


def test_sense_json(tmp_path):
    out = tmp_path / "s.json"
    r = run_cli("sense", "--trials", "5000", "--format", "json",
                "--out", str(out))
    assert r.returncode == 0
    doc = json.loads(out.read_text())
    rows = doc["rows"]
    tally_rows = [x for x in rows if x["record"] == "tally"]
    assert len(tally_rows) == 16
    assert sum(x["count"] for x in tally_rows) == 4 * 5000


def test_config_error_exit_code(tmp_path):
    cfgf = tmp_path / "bad.json"
    cfgf.write_text('{"nonsense": true}')
    out = tmp_path / "never.csv"
    r = run_cli("sense", "--config", str(cfgf), "--out", str(out))
    assert r.returncode == 2
    assert "error:" in r.stderr
    assert not out.exists()


def test_malformed_json_exit_code(tmp_path):
    cfgf = tmp_path / "broken.json"
    cfgf.write_text("{oops")
    r = run_cli("analytic", "--config", str(cfgf))
    assert r.returncode == 2
    assert "malformed JSON" in r.stderr


def test_sweep_requires_section():
    r = run_cli("sweep", "--trials", "100")
    assert r.returncode == 2
    assert "sweep" in r.stderr


def test_sweep_runs(tmp_path):
    cfgf = tmp_path / "c.json"
    cfgf.write_text(json.dumps({
        "sweep": {"axis": "irr_db", "grid": [-20.0, -10.0],
                  "modes": ["four", "two-bayes"]},
        "trials": 2000,
    }))
    out = tmp_path / "sweep.csv"
    r = run_cli("sweep", "--config", str(cfgf), "--out", str(out))
    assert r.returncode == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0].startswith("axis,value,mode,")
    assert len(lines) == 1 + 4  # header + 2 grid points x 2 modes


def test_mode_override_flags():
    r = run_cli("analytic", "--mode", "two-cfar", "--cfar-pfa", "0.1",
                "--format", "json")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["report"]["mode"] == "two-cfar"
    assert doc["report"]["rule"]["levels"] == ["H0", "H2"]
    bad = run_cli("analytic", "--mode", "two-cfar")
    assert bad.returncode == 2
    lone = run_cli("analytic", "--cfar-pfa", "0.1")
    assert lone.returncode == 2


def test_outage_command():
    r = run_cli("outage", "--trials", "50000", "--seed", "9",
                "--format", "json")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    rep = doc["report"]
    assert rep["monte_carlo"]["lo"] <= rep["analytic"] <= rep["monte_carlo"]["hi"]


def test_frame_command(tmp_path):
    cfgf = tmp_path / "c.json"
    cfgf.write_text(json.dumps({
        "frame": {"n_subcarriers": 16, "active": [1, 2, -3], "snr_db": 10.0},
        "scenario": {"n_packets": 8},
    }))
    out = tmp_path / "frame.json"
    r = run_cli("frame", "--config", str(cfgf), "--seed", "4",
                "--format", "json", "--out", str(out))
    assert r.returncode == 0
    doc = json.loads(out.read_text())
    assert len(doc["rows"]) == 16
    total = sum(sum(row) for row in doc["summary"]["confusion"])
    assert total == 16
    # stdout carries the summary line for quick inspection
    assert json.loads(r.stdout)["summary"]["confusion"] == doc["summary"]["confusion"]


def test_figure_smoke(tmp_path):
    cfgf = tmp_path / "c.json"
    cfgf.write_text(json.dumps({
        "figure": {"irr_grid": [-20.0, -10.0], "snr1_grid": [0.0],
                   "delta_snrs": [-10.0]},
        "trials": 2000,
    }))
    for fig, expected_rows in ((3, 4), (4, 1), (5, 4), (6, 2)):
        out = tmp_path / f"fig{fig}.csv"
        r = run_cli("figure", str(fig), "--config", str(cfgf),
                    "--out", str(out))
        assert r.returncode == 0, r.stderr
        rows = [l for l in out.read_text().splitlines()
                if l and not l.startswith("#")]
        assert len(rows) == 1 + expected_rows
    bad = run_cli("figure", "7")
    assert bad.returncode == 2
