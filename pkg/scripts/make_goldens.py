"""Regenerate the committed golden artifacts in tests/golden/.

Runs the full pipeline plus one refine pass on the bundled synthetic
dataset with pinned parameters, then freezes summary.json and
refine_report.json byte for byte along with a hash manifest of every
artifact. The acceptance suite reruns the same commands and compares.

Usage: python3 scripts/make_goldens.py
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import sys
import tempfile

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from click.testing import CliRunner

from netmine.cli import main

SEED = 0
REPLICATES = 8

HERE = os.path.dirname(os.path.abspath(__file__))
MANIFEST = os.path.join(HERE, "..", "data", "synthetic", "manifest.json")
GOLDEN_DIR = os.path.join(HERE, "..", "tests", "golden")


def run_golden_pipeline(out_dir: str) -> int:
    """Execute the pinned pipeline + refine; returns the clique cluster id."""
    runner = CliRunner()
    result = runner.invoke(
        main,
        [
            "run",
            "--manifest", MANIFEST,
            "--out", out_dir,
            "--seed", str(SEED),
            "--replicates", str(REPLICATES),
        ],
    )
    if result.exit_code != 0:
        raise SystemExit(f"pipeline failed: {result.output}{result.stderr}")

    with open(os.path.join(out_dir, "cluster_graph.json"), "rb") as fh:
        cg = json.loads(fh.read())
    smallest = min(cg["nodes"], key=lambda node: node["size"])

    result = runner.invoke(
        main,
        [
            "refine",
            "--cluster", str(smallest["id"]),
            "--replicates", str(REPLICATES),
            "--seed", str(SEED),
            "--out", out_dir,
        ],
    )
    if result.exit_code != 0:
        raise SystemExit(f"refine failed: {result.output}{result.stderr}")
    return smallest["id"]


def artifact_hashes(out_dir: str) -> dict[str, str]:
    hashes = {}
    for name in sorted(os.listdir(out_dir)):
        with open(os.path.join(out_dir, name), "rb") as fh:
            hashes[name] = hashlib.sha256(fh.read()).hexdigest()
    return hashes


def main_entry() -> None:
    work = tempfile.mkdtemp(prefix="netmine_golden_")
    try:
        clique_cluster = run_golden_pipeline(work)
        os.makedirs(GOLDEN_DIR, exist_ok=True)
        for name in ("summary.json", "refine_report.json"):
            shutil.copyfile(os.path.join(work, name), os.path.join(GOLDEN_DIR, name))
        manifest = {
            "seed": SEED,
            "replicates": REPLICATES,
            "clique_cluster": clique_cluster,
            "artifacts": artifact_hashes(work),
        }
        with open(os.path.join(GOLDEN_DIR, "golden_hashes.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"goldens written to {GOLDEN_DIR}")
        print(f"clique cluster id: {clique_cluster}")
        print(f"artifacts hashed: {len(manifest['artifacts'])}")
    finally:
        shutil.rmtree(work, ignore_errors=True)


if __name__ == "__main__":
    main_entry()
