"""Command-line front end: ``stablelab force|search|verify|export-dot``.

Exit codes: 0 success (true / countermodel found / suite passed),
1 negative outcome (false / search exhausted / suite failed),
2 usage, parse or validation errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .export import WHAT, model_dot
from .lattice import max_base_cap
from .logic import parse
from .modelfile import dumps_model, load_model, save_model
from .semantics import UnboundAtom, countermodel_search, explain, force
from .suites import SUITES, run_suite

OK, NEGATIVE, ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _world(M, name: str) -> int:
    try:
        return M.frame.names.index(name)
    except ValueError:
        raise UsageError(f"unknown world {name!r}; worlds are {', '.join(M.frame.names)}") from None


def _max_base(arg: int | None) -> int:
    return max_base_cap() if arg is None else arg


def cmd_force(args) -> int:
    M = load_model(args.model)
    w = _world(M, args.world)
    f = parse(args.formula)
    strict = not args.lenient
    verdict = force(M, w, f, strict)
    print("true" if verdict else "false")
    if args.explain:
        for line in explain(M, w, f, strict):
            print(line)
    return OK if verdict else NEGATIVE


def cmd_search(args) -> int:
    f = parse(args.formula)
    found = countermodel_search(f, _max_base(args.max_base), vars_cap=args.vars)
    if found is None:
        print("exhausted")
        return NEGATIVE
    W = found.model.frame
    print(f"world: {W.names[found.world]}")
    print(dumps_model(found.model))
    if args.output:
        save_model(found.model, args.output)
    if args.png:
        from .figures import hasse_png

        hasse_png(W, args.png, highlight=1 << found.world, title=f"refutes {args.formula}")
    return OK


def write_breakdown_csv(report, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.DictWriter(fh, fieldnames=["frame", "size", "instances", "checks", "failures"])
        out.writeheader()
        out.writerows(report.breakdown)


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    report = run_suite(args.suite, _max_base(args.max_base))
    doc = report.to_dict(with_duration=not args.no_duration)
    text = json.dumps(doc, indent=2, ensure_ascii=False, default=list)
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.suite}.json").write_text(text + "\n", encoding="utf-8")
        write_breakdown_csv(report, out / f"{args.suite}.csv")
        from .figures import breakdown_png

        breakdown_png(report, out / f"{args.suite}.png")
    print(report.summary(), file=sys.stderr)
    return OK if report.passed else NEGATIVE


def cmd_export_dot(args) -> int:
    M = load_model(args.model)
    sys.stdout.write(model_dot(M, args.what))
    if args.png:
        from .figures import hasse_png

        hasse_png(M.frame, args.png)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stablelab", description="Stable semantics workbench")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("force", help="decide whether a world forces a formula")
    f.add_argument("model")
    f.add_argument("world")
    f.add_argument("formula")
    f.add_argument("--explain", action="store_true", help="print the clause trace")
    f.add_argument("--lenient", action="store_true", help="unbound atoms hold only at the top world")
    f.set_defaults(run=cmd_force)

    s = sub.add_parser("search", help="look for a countermodel")
    s.add_argument("formula")
    s.add_argument("--max-base", type=int, default=None)
    s.add_argument("--vars", type=int, default=2)
    s.add_argument("-o", "--output", help="save the countermodel file here")
    s.add_argument("--png", help="draw the countermodel frame here")
    s.set_defaults(run=cmd_search)

    v = sub.add_parser("verify", help="run a law suite")
    v.add_argument("suite", help=", ".join(SUITES))
    v.add_argument("--max-base", type=int, default=None)
    v.add_argument("--out", help="directory for JSON, CSV and PNG outputs")
    v.add_argument("--no-duration", action="store_true", help="omit wall-clock time from the report")
    v.set_defaults(run=cmd_verify)

    e = sub.add_parser("export-dot", help="emit Graphviz DOT")
    e.add_argument("model")
    e.add_argument("--what", choices=WHAT, default="hasse")
    e.add_argument("--png", help="also draw the Hasse diagram here")
    e.set_defaults(run=cmd_export_dot)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (UsageError, UnboundAtom, OSError, ValueError) as e:
        # ModelFileError, ParseError, CapExceeded and MissingBimodule are ValueErrors
        print(f"error: {e}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
