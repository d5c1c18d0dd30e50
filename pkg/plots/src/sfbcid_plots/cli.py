"""Command line front end: ``plots render`` and ``plots presets``."""

from __future__ import annotations

import argparse
import sys

from .figures import PRESETS, FigureSpec, render, resolve_preset

_ALIAS_BY_NAME = {"histogram": "fig4", "nb": "fig6", "prf": "fig7", "nfft": "fig8",
                  "nr": "fig9", "modulation": "fig10", "sto": "fig11",
                  "cfo": "fig12", "doppler": "fig13"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render figures from sfbcid CSV tables.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="draw one preset's figure from a CSV")
    p.add_argument("--preset", required=True, help="preset name or figN alias")
    p.add_argument("--in", dest="csv_path", required=True, metavar="CSV",
                   help="input table written by `sfbcid simulate`")
    p.add_argument("--out", dest="out_path", required=True, metavar="FILE",
                   help="output image (.png, .svg, or .pdf)")
    p.add_argument("--group-by", metavar="COLS",
                   help="comma-separated columns overriding the preset grouping")
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--y-min", type=float)
    p.add_argument("--y-max", type=float)

    sub.add_parser("presets", help="list preset names")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            for name, preset in PRESETS.items():
                print(f"{name} (alias {_ALIAS_BY_NAME[name]}): {preset.description}")
            return 0

        group_by = None
        if args.group_by is not None:
            group_by = tuple(c.strip() for c in args.group_by.split(",") if c.strip())
        spec = FigureSpec(
            preset=resolve_preset(args.preset),
            csv_path=args.csv_path,
            out_path=args.out_path,
            group_by=group_by,
            x_min=args.x_min, x_max=args.x_max,
            y_min=args.y_min, y_max=args.y_max,
        )
        out = render(spec)
        print(out)
        return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
