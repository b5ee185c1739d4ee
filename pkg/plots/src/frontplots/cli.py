"""Command line entry point: `plots <kind> --in ... --out ...`."""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, plot_fronts, plot_profiles
from .schemas import SchemaError


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render figures from solver CSV outputs",
    )
    sub = parser.add_subparsers(dest="kind", required=True)

    fronts = sub.add_parser("front_scatter", help="overlay scatter of front CSVs")
    fronts.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="CSV")
    fronts.add_argument("--labels", nargs="*", default=(), metavar="LABEL")
    fronts.add_argument("--out", required=True, metavar="PNG")

    profile = sub.add_parser("profile", help="step plot of one metric's profiles")
    profile.add_argument("--in", dest="inputs", nargs=1, required=True, metavar="CSV")
    profile.add_argument("--metric", default=None)
    profile.add_argument("--labels", nargs="*", default=(), metavar="LABEL")
    profile.add_argument("--out", required=True, metavar="PNG")
    return parser


def main(argv=None):
    ns = build_parser().parse_args(argv)
    try:
        spec = PlotSpec(
            kind=ns.kind, inputs=tuple(ns.inputs), labels=tuple(ns.labels), output=ns.out
        )
        if ns.kind == "front_scatter":
            out = plot_fronts(spec)
        else:
            out = plot_profiles(spec, metric=ns.metric)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
