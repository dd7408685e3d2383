import importlib.util
import json
from pathlib import Path

import pytest

from annulus_split.io_formats import read_csv

REPO_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="module")
def exporter():
    script = REPO_ROOT / "scripts" / "export_oracle_tables.py"
    module_spec = importlib.util.spec_from_file_location("export_oracle_tables", script)
    module = importlib.util.module_from_spec(module_spec)
    module_spec.loader.exec_module(module)
    return module


def test_runs_dir_is_under_repo_root(exporter, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert exporter.RUNS_DIR.resolve() == REPO_ROOT / "results" / "runs"
    assert exporter.RUNS_DIR.is_absolute()


def test_exports_latest_run_group(exporter, tmp_path, monkeypatch, capsys):
    reports = [
        {"entry": "pair", "identity_name": "reconstruction", "max_abs_error": 1e-13, "tolerance": 1e-9, "pass": True},
        {"entry": "pair", "identity_name": "extension", "max_abs_error": 2e-8, "tolerance": 1e-8, "pass": False},
        {"entry": "geometry", "identity_name": "omega_disjointness", "max_abs_error": 0, "tolerance": 0, "pass": True},
    ]
    for group in ("2026-10-18_0900", "2026-10-19_1200"):
        path = tmp_path / "runs" / group / "reports" / "oracle_reports.jsonl"
        path.parent.mkdir(parents=True)
        path.write_text("".join(json.dumps(r) + "\n" for r in reports))
    monkeypatch.chdir(REPO_ROOT.parent)

    exporter.main(["--runs-dir", str(tmp_path / "runs")])

    analysis = tmp_path / "runs" / "2026-10-19_1200" / "analysis"
    schema, rows = read_csv(analysis / "entry_summary.csv")
    assert schema.startswith("entry_summary")
    by_entry = {row["entry"]: row for row in rows}
    assert by_entry["pair"]["failed"] == "extension"
    assert float(by_entry["pair"]["worst_margin"]) == pytest.approx(2.0)
    assert by_entry["geometry"]["worst_margin"] == ""
    _, report_rows = read_csv(analysis / "oracle_reports.csv")
    assert len(report_rows) == 3
    assert "entries_csv=" in capsys.readouterr().out


def test_missing_runs_raise(exporter, tmp_path):
    with pytest.raises(FileNotFoundError):
        exporter.main(["--runs-dir", str(tmp_path)])
