#!/usr/bin/env python3
"""Run every verification statement at desk scale and summarize verdicts.

Each statement is executed through the CLI entry point so the run exercises
the same config handling, seeding, and reporting paths as a manual
invocation.  Results (canonical JSON, one file per statement) land in the
output directory; a one-line verdict per statement is printed at the end.

Usage:
    python3 scripts/run_all_verifications.py [--out results/verify_all] [--seed 7]
"""

import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from sobolev_wlab.cli import STATEMENT_IDS, main  # noqa: E402

BASE = ["--n", "1", "--s", "0.3", "--p", "2", "--a", "0.1"]


def run(out_dir: str, seed: int) -> int:
    failures = 0
    lines = []
    for sid in STATEMENT_IDS:
        args = ["verify", sid, *BASE, "--seed", str(seed),
                "--samples", "32000", "--conv-grid", "96",
                "--out", out_dir, "--format", "json,csv,svg"]
        code = main(args)
        record_path = os.path.join(out_dir, f"verify_{sid}.json")
        verdicts = []
        if os.path.exists(record_path):
            with open(record_path) as fh:
                verdicts = json.load(fh).get("verdicts", [])
        status = "ok" if code == 0 else f"exit {code}"
        lines.append(f"  {sid:<14} {status:<8} {', '.join(verdicts)}")
        if code != 0:
            failures += 1
    print(f"verification sweep ({len(STATEMENT_IDS)} statements, seed {seed}):")
    print("\n".join(lines))
    print(f"{len(STATEMENT_IDS) - failures}/{len(STATEMENT_IDS)} passed")
    return 1 if failures else 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/verify_all")
    parser.add_argument("--seed", type=int, default=7)
    ns = parser.parse_args()
    sys.exit(run(ns.out, ns.seed))
