"""Console entry point: render figures from a spec file or from flags.

Usage
-----
``plotkit <spec.yaml>`` renders the plot spec in the file, or
``plotkit --kind pd_vs_snr --in results.csv --out fig.png`` builds the
spec from flags.  Exactly one of the two forms must be used.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, PlotSpec, load_plot_spec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figures from modoa CSV artifacts.",
    )
    parser.add_argument("spec", nargs="?", help="YAML plot spec file")
    parser.add_argument("--kind", choices=KINDS, help="figure kind (flag-driven mode)")
    parser.add_argument(
        "--in", dest="inputs", action="append", metavar="CSV", help="input CSV (repeatable)"
    )
    parser.add_argument("--out", help="output image path")
    parser.add_argument("--title", default="", help="figure title")
    logx = parser.add_mutually_exclusive_group()
    logx.add_argument("--logx", dest="logx", action="store_true", default=None)
    logx.add_argument("--no-logx", dest="logx", action="store_false")
    return parser


def _spec_from_args(args: argparse.Namespace) -> PlotSpec:
    flag_mode = any(v for v in (args.kind, args.inputs, args.out))
    if args.spec and flag_mode:
        raise ValueError("give either a spec file or --kind/--in/--out flags, not both")
    if args.spec:
        spec = load_plot_spec(args.spec)
        if args.title or args.logx is not None:
            spec = PlotSpec(
                kind=spec.kind,
                inputs=spec.inputs,
                out=spec.out,
                title=args.title or spec.title,
                logx=spec.logx if args.logx is None else args.logx,
            )
        return spec
    if not (args.kind and args.inputs and args.out):
        raise ValueError("flag-driven mode needs --kind, --in, and --out")
    return PlotSpec(
        kind=args.kind,
        inputs=tuple(args.inputs),
        out=args.out,
        title=args.title,
        logx=args.logx,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _spec_from_args(args)
        out = render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
