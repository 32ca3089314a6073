"""Command-line entry point: render one figure from manifest file(s).

Usage:
    couette-plots --kind decay --output fig.png manifest.json
    couette-plots --kind threshold --output thr.png sweep.json
"""

from __future__ import annotations

import argparse
import sys

from couette_plots.render import (PlotJob, PlotError, render_decay,
                                  render_threshold)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="couette-plots",
        description="Render figures from couette-lab run manifests")
    parser.add_argument("manifests", nargs="+", help="manifest JSON path(s)")
    parser.add_argument("--kind", required=True,
                        choices=["decay", "threshold"])
    parser.add_argument("--output", required=True, help="figure file path")
    parser.add_argument("--no-envelopes", action="store_true",
                        help="skip the dashed theoretical overlays")
    parser.add_argument("--series", help="comma-separated series names "
                        "(decay only; default: the four fitted norms)")
    args = parser.parse_args(argv)

    try:
        job = PlotJob(manifests=args.manifests, kind=args.kind,
                      output=args.output,
                      envelopes=not args.no_envelopes,
                      series=args.series.split(",") if args.series else [])
        render = {"decay": render_decay, "threshold": render_threshold}
        path, annotations = render[args.kind](job)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"figure written to {path}")
    for key, val in annotations.items():
        print(f"  {key}: {val}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
