#!/usr/bin/env python3
"""Run the smoke experiment: JOS_1 at n in {5, 10}, both seeding strategies,
both solvers, fixed small budget. Finishes in seconds and is byte-reproducible
for a given seed."""

import argparse

from frontdescent.cli import run_experiment, smoke_config


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/smoke")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    ns = parser.parse_args()
    manifest = run_experiment(smoke_config(ns.out, seed=ns.seed, jobs=ns.jobs))
    for run in manifest["runs"]:
        print(
            f"{run['solver']:>6} {run['instance']:<30} {run['status']:>6} "
            f"members={run.get('members', '-')}"
        )
    print(f"outputs in {ns.out}")
    return 0 if all(r["status"] == "ok" for r in manifest["runs"]) else 1


if __name__ == "__main__":
    raise SystemExit(main())
