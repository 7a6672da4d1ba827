#!/usr/bin/env python3
"""Sweep the weight exponent a and report how the norms respond.

Runs the `sweep` subcommand over a grid of admissible a values at fixed
(n, s, p), producing one canonical JSON record per grid point, then prints
a small table of seminorm / full-norm values with their error estimates.

Usage:
    python3 scripts/sweep_weight_exponent.py [--out results/sweep_a] [--seed 7]
"""

import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from sobolev_wlab.cli import main  # noqa: E402

VALUES = "0,0.05,0.1,0.15"


def run(out_dir: str, seed: int) -> int:
    code = main(["sweep", "--param", "a", "--values", VALUES,
                 "--n", "1", "--s", "0.3", "--p", "2", "--a", "0.1",
                 "--samples", "64000", "--seed", str(seed), "--out", out_dir])
    if code != 0:
        return code
    print(f"{'a':>6}  {'seminorm':>12}  {'stderr':>10}  {'full':>12}")
    for name in sorted(os.listdir(out_dir)):
        if not name.startswith("sweep_a_"):
            continue
        with open(os.path.join(out_dir, name)) as fh:
            rec = json.load(fh)
        rep = rec["outputs"]["report"]
        print(f"{rec['config']['a']:>6}  {rep['seminorm']['value']:>12.6f}"
              f"  {rep['seminorm']['stderr']:>10.2e}  {rep['full']:>12.6f}")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/sweep_a")
    parser.add_argument("--seed", type=int, default=7)
    ns = parser.parse_args()
    sys.exit(run(ns.out, ns.seed))
