"""Command line entry points for the scenario simulator.

Subcommands:
    build-offline  build and clean the offline map for a scenario config
    run            run a full scenario and write frames, maps and metrics
    render         convert a saved map to a PPM image
    diff           compare two saved maps cell by cell
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import MapDecayError
from .grid import DecayParams, read_map, write_map
from .scenario import build_offline_phase, load_config, render_frame, run_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mapdecay",
        description="occupancy grid scenario simulator with online map decay")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-offline", help="build the cleaned offline map")
    p.add_argument("config", help="scenario config JSON")
    p.add_argument("output", help="output map path (.ogm)")

    p = sub.add_parser("run", help="run a scenario")
    p.add_argument("config", help="scenario config JSON")
    p.add_argument("--offline", help="reuse a prebuilt offline map", default=None)
    p.add_argument("--output", help="output directory", default=None)
    p.add_argument("--no-decay", action="store_true",
                   help="disable the per-tick pull toward the offline map")
    p.add_argument("--w-on", type=float, default=None,
                   help="override the online weight")
    p.add_argument("--w-off", type=float, default=None,
                   help="override the offline weight")

    p = sub.add_parser("render", help="render a saved map to PPM")
    p.add_argument("map", help="input map (.ogm)")
    p.add_argument("output", help="output image (.ppm)")

    p = sub.add_parser("diff", help="compare two saved maps")
    p.add_argument("a")
    p.add_argument("b")
    return parser


def _decay_override(cfg, args):
    if not (args.no_decay or args.w_on is not None or args.w_off is not None):
        return None
    w_on = args.w_on if args.w_on is not None else cfg.decay.w_on
    w_off = args.w_off if args.w_off is not None else cfg.decay.w_off
    return DecayParams(w_on, w_off, enabled=not args.no_decay)


def _cmd_build_offline(args) -> int:
    cfg = load_config(args.config)
    offline = build_offline_phase(cfg)
    write_map(offline, args.output)
    print(f"wrote {args.output}: {offline.width}x{offline.height} cells, "
          f"{int(offline.observed.sum())} observed")
    return 0


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    offline = read_map(args.offline) if args.offline else None
    run_scenario(cfg, offline=offline,
                 decay_override=_decay_override(cfg, args),
                 output_dir=args.output)
    return 0


def _cmd_render(args) -> int:
    render_frame(read_map(args.map), args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_diff(args) -> int:
    a = read_map(args.a)
    b = read_map(args.b)
    if a.values.shape != b.values.shape:
        print(f"shape mismatch: {a.width}x{a.height} vs {b.width}x{b.height}")
        return 1
    diff = np.abs(a.values - b.values)
    flags = a.observed != b.observed
    n_diff = int((diff > 0.0).sum() + (flags & ~(diff > 0.0)).sum())
    print(f"max_abs_diff={diff.max():.12g} differing_cells={n_diff} "
          f"flag_mismatches={int(flags.sum())}")
    return 0 if n_diff == 0 and not flags.any() else 1


_COMMANDS = {
    "build-offline": _cmd_build_offline,
    "run": _cmd_run,
    "render": _cmd_render,
    "diff": _cmd_diff,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except MapDecayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
