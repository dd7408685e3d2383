#!/usr/bin/env python3
"""Export easy-to-scan CSV tables from an oracle suite run."""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys
from collections import defaultdict
from pathlib import Path

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, REPO_ROOT)

from annulus_split.io_formats import write_csv

REPORT_FIELDS = ["entry", "identity_name", "max_abs_error", "tolerance", "samples_tested", "excluded", "pass"]
ENTRY_FIELDS = ["entry", "oracles", "passed", "failed", "worst_margin"]
RUNS_DIR = Path(REPO_ROOT) / "results" / "runs"


def latest_run_group(base: Path) -> Path:
    runs = sorted(glob.glob(str(base / "*" / "reports" / "oracle_reports.jsonl")))
    if not runs:
        raise FileNotFoundError(f"No oracle_reports.jsonl found under {base}")
    return Path(runs[-1]).parent.parent


def load_reports(path: Path) -> list[dict]:
    with path.open() as f:
        return [json.loads(line) for line in f if line.strip()]


def entry_rows(reports: list[dict]) -> list[dict]:
    by_entry: dict[str, list[dict]] = defaultdict(list)
    for r in reports:
        by_entry[r.get("entry", "-")].append(r)

    rows = []
    for entry, items in by_entry.items():
        # error/tolerance over the entry's oracles; zero-tolerance counts are left out
        margins = [r["max_abs_error"] / r["tolerance"] for r in items if r.get("tolerance")]
        rows.append(
            {
                "entry": entry,
                "oracles": len(items),
                "passed": sum(bool(r.get("pass")) for r in items),
                "failed": ";".join(r["identity_name"] for r in items if not r.get("pass")),
                "worst_margin": max(margins) if margins else "",
            }
        )
    return rows


def main(argv: list[str] | None = None) -> None:
    p = argparse.ArgumentParser()
    p.add_argument("--run-group", default="", help="Run group id under results/runs/<id>. Defaults to the latest.")
    p.add_argument("--runs-dir", type=Path, default=RUNS_DIR, help="Folder holding the run groups.")
    args = p.parse_args(argv)

    base = args.runs_dir
    run_dir = base / args.run_group if args.run_group else latest_run_group(base)
    reports_path = run_dir / "reports" / "oracle_reports.jsonl"
    reports = load_reports(reports_path)

    out_reports = run_dir / "analysis" / "oracle_reports.csv"
    out_entries = run_dir / "analysis" / "entry_summary.csv"
    write_csv(out_reports, "oracle_reports", REPORT_FIELDS, reports)
    write_csv(out_entries, "entry_summary", ENTRY_FIELDS, entry_rows(reports))

    print(f"reports_jsonl={reports_path}")
    print(f"reports_csv={out_reports}")
    print(f"entries_csv={out_entries}")


if __name__ == "__main__":
    main()
