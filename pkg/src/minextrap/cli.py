"""``minextrap`` command line.

Exit codes: 0 success, 1 failed assertion, 2 bad input, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from .fixtures import NAMES, load_fixture
from .grid import GridSpec, SolverOptions, solve
from .measures import dumps
from .pipeline import AnalyzeOptions, NonConvergence, analyze, export_plot, parse_input
from .reproduce import EXAMPLES, format_table, reproduce

OK, FAILED, BAD_INPUT, NO_CONVERGENCE = 0, 1, 2, 3

SECTIONS = {"gamma": "gamma", "structure": "structure", "unique": "uniqueness",
            "positivity": "positivity"}


class BadInput(ValueError):
    pass


def read_input(source: str) -> dict:
    """A JSON file, or the name of a bundled example (``e2``, ``e2.json``)."""
    path = Path(source)
    if path.exists():
        try:
            return json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise BadInput(f"{path}: {e}") from e
    stem = path.name.removesuffix(".json")
    if stem in NAMES:
        return load_fixture(stem)
    raise BadInput(f"{source}: no such file or bundled example")


def _options(args) -> AnalyzeOptions:
    return AnalyzeOptions(grid=args.grid, tol=args.tol, max_iter=args.max_iter,
                          mu_norm=args.mu_norm, center=getattr(args, "center", None),
                          halfwidth=getattr(args, "halfwidth", None))


def _flat(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flat(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            yield from _flat(v, f"{prefix}{i}.")
    else:
        yield prefix.rstrip("."), json.dumps(obj) if isinstance(obj, list) else obj


def emit(obj: dict, as_csv: bool, out=None) -> None:
    out = out or sys.stdout
    if as_csv:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["key", "value"])
        w.writerows(_flat(obj))
        out.write(buf.getvalue())
    else:
        out.write(dumps(obj, indent=1, sort_keys=True) + "\n")


def _load(args):
    try:
        return parse_input(read_input(args.input))
    except (KeyError, TypeError, ValueError) as e:
        raise BadInput(f"{args.input}: invalid spectral data ({e})") from e


def cmd_analyze(args) -> int:
    data, priors = _load(args)
    report = analyze(data, _options(args), priors)
    section = SECTIONS.get(args.command)
    emit(report if section is None else {section: report[section]}, args.csv)
    return OK


def cmd_solve(args) -> int:
    data, _ = _load(args)
    N = args.grid or (64 if data.d == 1 else 16)
    rep = solve(data, GridSpec(N, data.d),
                SolverOptions(max_iterations=args.max_iter, gap_tol=args.tol))
    emit(rep.to_json(), args.csv)
    return OK if rep.converged else NO_CONVERGENCE


def cmd_reproduce(args) -> int:
    names = EXAMPLES if args.example == "all" else [args.example]
    rows = [r for n in names for r in reproduce(n)]
    print(format_table(rows))
    return OK if all(r.passed for r in rows) else FAILED


def cmd_export_plot(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise BadInput(f"{args.report}: {e}") from e
    for p in export_plot(report, Path(args.target)):
        print(p)
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="minextrap", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def pipeline_cmd(name, help_, window=False):
        p = sub.add_parser(name, help=help_)
        p.add_argument("input", help="spectral JSON file or bundled example name")
        p.add_argument("--grid", type=int, help="grid points per axis (default 64 in 1-d, 16 in 2-d)")
        p.add_argument("--tol", type=float, default=1e-8, help="relative duality-gap tolerance")
        p.add_argument("--max-iter", type=int, default=200_000)
        p.add_argument("--mu-norm", type=float, help="known norm of the measure")
        if window:
            p.add_argument("--center", type=int, help="positivity window center n")
            p.add_argument("--halfwidth", type=int, help="positivity window half width M")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="JSON output (default)")
        fmt.add_argument("--csv", action="store_true", help="key,value CSV output")
        return p

    pipeline_cmd("analyze", "full pipeline report", window=True).set_defaults(func=cmd_analyze)
    pipeline_cmd("solve", "grid basis pursuit only").set_defaults(func=cmd_solve)
    pipeline_cmd("gamma", "Gamma set").set_defaults(func=cmd_analyze)
    pipeline_cmd("structure", "support structure").set_defaults(func=cmd_analyze)
    pipeline_cmd("unique", "uniqueness verdict").set_defaults(func=cmd_analyze)
    pipeline_cmd("positivity", "positive-definite extension", window=True) \
        .set_defaults(func=cmd_analyze)

    p = sub.add_parser("reproduce", help="scripted checks of a worked example")
    p.add_argument("example", choices=list(EXAMPLES) + ["all"])
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("export-plot", help="CSV plot data from an analyze report")
    p.add_argument("report", help="JSON report written by analyze")
    p.add_argument("target", help="output directory")
    p.set_defaults(func=cmd_export_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except BadInput as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT
    except NonConvergence as e:
        print(f"error: {e}", file=sys.stderr)
        return NO_CONVERGENCE
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
