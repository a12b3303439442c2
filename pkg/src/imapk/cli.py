"""Command line front end: imapk <command> <specfile> [flags]."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .errors import ImapkError
from .report import render_text, run, to_json
from .scalar import scalar_from_text
from .specfile import parse_spec

COMMANDS = ("orbit", "markov", "ktheory", "entropy", "classify", "all")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="imapk",
        description="Exact invariants of piecewise monotonic interval maps",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("specfile", help="map specification file")
    parser.add_argument("--cap", type=int, default=None,
                        help="orbit/breakpoint cap (default 10000)")
    parser.add_argument("--tol", type=str, default=None,
                        help="Perron enclosure tolerance as a rational (default 1/1000000)")
    parser.add_argument("--depth", type=int, default=None,
                        help="eventual-surjectivity iteration depth (default 64)")
    parser.add_argument("--assert-cyclic", action="store_true",
                        help="assert that the constant function generates the module")
    parser.add_argument("--assert-idoc", action="store_true",
                        help="assert orbit disjointness beyond the checked cap")
    parser.add_argument("--assert-orbit-infinite", action="store_true",
                        help="assert the critical orbits are infinite beyond the cap")
    parser.add_argument("--partition", type=str, default=None,
                        help="coarser Markov partition, e.g. '[0,1/3,2/3,1]'")
    parser.add_argument("--json", action="store_true", help="emit the JSON report")
    return parser


def _overrides(args, field):
    out = {}
    if args.cap is not None:
        out["cap"] = args.cap
    if args.tol is not None:
        out["tol"] = Fraction(args.tol)
    if args.depth is not None:
        out["depth"] = args.depth
    if args.assert_cyclic:
        out["assert_cyclic"] = True
    if args.assert_idoc:
        out["assert_idoc"] = True
    if args.assert_orbit_infinite:
        out["assert_orbit_infinite"] = True
    if args.partition is not None:
        text = args.partition.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise ImapkError("--partition expects a bracketed list")
        parts = [p.strip() for p in text[1:-1].split(",") if p.strip()]
        out["partition"] = [scalar_from_text(p, field) for p in parts]
    return out


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with open(args.specfile, "r", encoding="utf-8") as handle:
            text = handle.read()
        spec = parse_spec(text)
        report, code = run(args.command, spec, _overrides(args, spec.field))
    except ImapkError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    if args.json:
        print(to_json(report))
    else:
        sys.stdout.write(render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
