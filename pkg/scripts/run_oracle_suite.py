#!/usr/bin/env python3
"""Run every oracle over the golden corpus and the geometry checks, grouped under one run id."""

import argparse
import json
import logging
import os
import sys
from datetime import datetime, timezone

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dotenv import load_dotenv

from annulus_split.annulus_core import Annulus
from annulus_split.config import load_config
from annulus_split.corpus import load_corpus, run_entry_oracles, summarize
from annulus_split.io_formats import plain_json, write_report_lines
from annulus_split.validation import (
    OracleReport,
    check_intersection_predicates,
    check_membership_solver,
    check_omega_disjointness,
)

logger = logging.getLogger(__name__)

# the example annulus [1, 3] used for the C^2 geometry alongside the configured one
GEOMETRY_ANNULI = [(1.0, 3.0)]


def setup_logging(log_dir: str) -> logging.Logger:
    os.makedirs(log_dir, exist_ok=True)
    log_path = os.path.join(log_dir, "oracle_suite.log")

    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        handlers=[logging.FileHandler(log_path), logging.StreamHandler()],
    )
    return logging.getLogger(__name__)


def update_run_manifest(run_dir: str, corpus_file: str, corpus_version: str, config_file: str | None) -> None:
    manifest_path = os.path.join(run_dir, "manifest.json")
    manifest: dict = {}
    if os.path.exists(manifest_path):
        with open(manifest_path, "r") as f:
            manifest = json.load(f)

    if not manifest:
        manifest = {"run_group": os.path.basename(run_dir), "suites": {}}

    manifest["suites"]["oracle_suite"] = {
        "started_at_utc": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "started_at_human": datetime.now().astimezone().strftime("%Y-%m-%d %H:%M:%S %Z"),
        "corpus_file": corpus_file,
        "corpus_version": corpus_version,
        "config_file": config_file,
    }
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=2)


def geometry_reports(annulus: Annulus, seed: int) -> list[OracleReport]:
    tag = {"entry": f"geometry[{annulus.r1:g},{annulus.r2:g}]"}
    reports = [
        check_omega_disjointness(annulus, seed=seed),
        check_membership_solver(annulus, seed=seed),
    ]
    return [OracleReport(r.identity_name, r.max_abs_error, r.samples_tested, r.tolerance, r.excluded, {**tag, **r.details}) for r in reports]


def run_suite(corpus_file: str, run_group: str, config_file: str | None) -> int:
    repo_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    run_dir = os.path.join(repo_root, "results", "runs", run_group)
    reports_dir = os.path.join(run_dir, "reports")
    os.makedirs(reports_dir, exist_ok=True)

    config = load_config(config_file)
    corpus = load_corpus(corpus_file)
    update_run_manifest(run_dir, corpus_file, corpus.version, config_file)
    logger.info("Run group: %s (corpus %s, %d entries)", run_group, corpus.version, len(corpus.entries))

    lines_path = os.path.join(reports_dir, "oracle_reports.jsonl")
    all_reports: list[OracleReport] = []
    for entry in corpus.entries:
        logger.info("--- Running oracles for entry: %s ---", entry.name)
        try:
            reports = run_entry_oracles(entry, config)
        except Exception as e:
            logger.exception("    Error running entry '%s': %s", entry.name, e)
            continue
        with open(os.path.join(reports_dir, f"{entry.name}.json"), "w") as f:
            json.dump(plain_json({"entry": entry.name, "reports": [r.to_dict() for r in reports]}), f, indent=2)
        all_reports.extend(reports)

    geometry = [config.annulus, *(Annulus(r1, r2) for r1, r2 in GEOMETRY_ANNULI)]
    for annulus in geometry:
        all_reports.extend(geometry_reports(annulus, config.seed))
    predicates = check_intersection_predicates(seed=config.seed)
    all_reports.append(
        OracleReport(
            predicates.identity_name,
            predicates.max_abs_error,
            predicates.samples_tested,
            predicates.tolerance,
            predicates.excluded,
            {"entry": "geometry", **predicates.details},
        )
    )

    write_report_lines(lines_path, all_reports)
    summary = summarize(all_reports)
    with open(os.path.join(run_dir, "summary.json"), "w") as f:
        json.dump(plain_json(summary), f, indent=2)
    logger.info("Reports saved to %s", lines_path)
    logger.info("Passed %d of %d oracles; failed: %s", summary["passed"], summary["total"], summary["failed"] or "none")
    return 0 if not summary["failed"] else 1


if __name__ == "__main__":
    load_dotenv()
    parser = argparse.ArgumentParser()
    parser.add_argument("--corpus", type=str, default="corpus.json", help="Path to the corpus JSON file.")
    parser.add_argument("--config", type=str, default=None, help="Optional run configuration JSON.")
    parser.add_argument("--run-group", type=str, default=None, help="Run group id; defaults to a timestamp.")
    args = parser.parse_args()

    repo_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    run_group_id = args.run_group or datetime.now().strftime("%Y%m%d_%H%M%S")
    log_dir = os.path.join(repo_root, "results", "runs", run_group_id, "logs")
    logger = setup_logging(log_dir)

    sys.exit(run_suite(args.corpus, run_group_id, args.config))
