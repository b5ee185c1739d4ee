#!/usr/bin/env python3
"""Run the full benchmark grid: 5 problems x 8 dimensions x 2 seeding
strategies = 80 instances per solver. With default budgets this is a long
batch job; pass --max-evaluations to bound it."""

import argparse
import sys

from frontdescent.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/paper_grid")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--max-iterations", type=int, default=None)
    parser.add_argument("--max-evaluations", type=int, default=None)
    ns = parser.parse_args()
    argv = [
        "run",
        "--grid",
        "paper",
        "--out",
        ns.out,
        "--seed",
        str(ns.seed),
        "--jobs",
        str(ns.jobs),
    ]
    if ns.max_iterations is not None:
        argv += ["--max-iterations", str(ns.max_iterations)]
    if ns.max_evaluations is not None:
        argv += ["--max-evaluations", str(ns.max_evaluations)]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
