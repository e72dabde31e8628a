"""Command-line front end: ``evidential <subcommand> [options]``.

Exit codes: 0 on success, 1 when the input fails validation, 2 on usage
errors (bad flags, unreadable files).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import formats
from .belief import dempster_combine, vacuous_extension
from .errors import EvidentialError, FormatError
from .experiment import DieScenario, compare, sensor_constraints
from .frame import make_frame
from .metaprob import build_grid, constraint_filter, peaked_prior, summarize, uniform_prior, update

FORMATS = ("json", "csv", "table")


class UsageError(Exception):
    pass


def load_json(arg: str):
    """Inline JSON when ``arg`` starts with ``{`` or ``[``, otherwise a file path."""
    text = arg
    if not arg.lstrip().startswith(("{", "[")):
        try:
            text = Path(arg).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {arg}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{arg if text is not arg else 'inline JSON'} is not valid JSON: {exc}") from None


def outcome_frame(args):
    if args.labels:
        return make_frame(args.labels.split(","))
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    return make_frame([str(i) for i in range(1, args.n + 1)])


def cmd_combine(args):
    m1 = formats.mass_from_json(load_json(args.m1))
    m2 = formats.mass_from_json(load_json(args.m2))
    result, conflict = dempster_combine(m1, m2)
    if args.format == "json":
        return formats.dumps(formats.mass_to_json(result, conflict))
    if args.format == "csv":
        rows = [["subset", "mass"]] + [[a.key(), formats.num_str(v)] for a, v in result.items()]
        return formats.to_csv(rows + [["conflict", formats.num_str(conflict)]])
    return formats.mass_table(result, conflict)


def cmd_extend(args):
    m = formats.mass_from_json(load_json(args.m))
    fine = make_frame(args.fine.split(",")) if args.fine else None
    refining = formats.refining_from_json(load_json(args.refining), coarse=m.frame, fine=fine)
    result = vacuous_extension(m, refining)
    if args.format == "json":
        return formats.dumps(formats.mass_to_json(result))
    if args.format == "csv":
        return formats.to_csv([["subset", "mass"]] + [[a.key(), formats.num_str(v)] for a, v in result.items()])
    return formats.mass_table(result)


def cmd_bel_table(args):
    m = formats.mass_from_json(load_json(args.m))
    table = formats.bel_table_to_json(m)
    if args.format == "json":
        return formats.dumps(table)
    rows = [(r["subset"] or "{}", r["m"], r["bel"], r["pl"]) for r in table["table"]]
    if args.format == "csv":
        return formats.to_csv([["subset", "m", "bel", "pl"]] + [[r[0]] + [formats.num_str(v) for v in r[1:]] for r in rows])
    return formats.render_table(["subset", "m", "bel", "pl"], rows)


def cmd_grid(args):
    grid = build_grid(outcome_frame(args), args.d)
    if args.format == "json":
        return formats.dumps(formats.grid_to_json(grid))
    header = [f"k_{x}" for x in grid.outcomes.labels]
    if args.format == "csv":
        return formats.to_csv([header] + grid.points.tolist())
    return formats.render_table(header, grid.points.tolist())


def cmd_update(args):
    frame = outcome_frame(args)
    grid = build_grid(frame, args.d)
    if args.prior == "peaked":
        if not args.center:
            raise UsageError("--prior peaked needs --center")
        try:
            center = [int(k) for k in args.center.split(",")]
        except ValueError:
            raise UsageError("--center must be comma-separated integers") from None
        prior = peaked_prior(grid, center, args.concentration)
    else:
        prior = uniform_prior(grid)
    evidence = formats.evidence_from_json(load_json(args.evidence), frame) if args.evidence else []
    posterior = update(prior, evidence)
    if args.format == "json":
        return formats.dumps(formats.metadist_to_json(posterior, support_only=args.support_only))
    if args.format == "csv":
        idx = posterior.support() if args.support_only else None
        return formats.to_csv(formats.metadist_csv_rows(posterior, idx))
    summary = summarize(posterior, top_k=args.top)
    lines = [
        f"grid points: {len(grid)}",
        f"support size: {summary.support_size}",
        "expected p: " + " ".join(f"{x:.4f}" for x in summary.expected),
        "",
        formats.render_table([f"k_{x}" for x in frame.labels] + ["weight"], [list(p) + [w] for p, w in summary.top]),
    ]
    return "\n".join(lines)


def cmd_filter(args):
    frame = outcome_frame(args)
    grid = build_grid(frame, args.d)
    if args.constraints == "paper":
        constraints = sensor_constraints(frame)
    else:
        constraints = formats.constraints_from_json(load_json(args.constraints), frame)
    idx = constraint_filter(grid, constraints)
    if args.format == "json":
        out = formats.grid_to_json(grid, idx)
        out["constraints"] = formats.constraints_to_json(constraints)
        return formats.dumps(out)
    header = [f"k_{x}" for x in frame.labels]
    rows = grid.points[idx].tolist()
    if args.format == "csv":
        return formats.to_csv([header] + rows)
    return formats.render_table(header, rows) + f"{len(rows)} points\n"


def cmd_die_experiment(args):
    base = formats.scenario_from_json(load_json(args.scenario)) if args.scenario else DieScenario()
    overrides = {
        "N": args.N, "d": args.d, "mode": args.mode, "seed": args.seed,
    }
    params = base.provenance()
    params.pop("effective_epsilon")
    params.update({k: v for k, v in overrides.items() if v is not None})
    if args.epsilon is not None:
        params["epsilon"] = args.epsilon
    params["true_die"] = tuple(params["true_die"])
    report = compare(DieScenario(**params))
    if args.support_csv:
        Path(args.support_csv).write_text(formats.report_support_csv(report), encoding="utf-8")
    if args.format == "json":
        return formats.dumps(formats.report_to_json(report))
    if args.format == "csv":
        return formats.report_support_csv(report)
    return formats.report_to_text(report)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, help="output format (default: table on a terminal, json otherwise)")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--seed", type=int, help="random seed for simulated die throws")

    grid_args = argparse.ArgumentParser(add_help=False)
    grid_args.add_argument("--n", type=int, default=6, help="number of outcomes, labelled 1..n")
    grid_args.add_argument("--labels", help="comma-separated outcome labels (overrides --n)")
    grid_args.add_argument("--d", type=int, default=6, help="grid denominator: probabilities are multiples of 1/d")

    parser = argparse.ArgumentParser(prog="evidential", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("combine", parents=[common], help="combine two mass functions with Dempster's rule")
    p.add_argument("--m1", required=True, help="mass function JSON (file or inline)")
    p.add_argument("--m2", required=True, help="mass function JSON (file or inline)")
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("extend", parents=[common], help="vacuously extend a mass function along a refining")
    p.add_argument("--m", required=True, help="mass function JSON over the coarse frame")
    p.add_argument("--refining", required=True, help='refining JSON, e.g. {"odd": ["1","3","5"], ...}')
    p.add_argument("--fine", help="comma-separated fine frame labels (default: image labels, naturally sorted)")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("bel-table", parents=[common], help="tabulate m, Bel and Pl on every subset")
    p.add_argument("--m", required=True, help="mass function JSON")
    p.set_defaults(func=cmd_bel_table)

    p = sub.add_parser("grid", parents=[common, grid_args], help="enumerate the discretized simplex")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("update", parents=[common, grid_args], help="Bayesian update of a meta-level distribution")
    p.add_argument("--evidence", help='evidence JSON, e.g. [{"event": ["1","3","5"], "successes": 5, "trials": 10}]')
    p.add_argument("--prior", choices=("uniform", "peaked"), default="uniform")
    p.add_argument("--center", help="peaked prior centre as comma-separated counts")
    p.add_argument("--concentration", type=float, default=1.0)
    p.add_argument("--support-only", action="store_true", help="omit zero-weight points")
    p.add_argument("--top", type=int, default=10, help="rows shown in table format")
    p.set_defaults(func=cmd_update)

    p = sub.add_parser("filter", parents=[common, grid_args], help="grid points meeting linear constraints")
    p.add_argument("--constraints", required=True, help="'paper' for the four half-probability sensor constraints on a six-face die, or constraints JSON")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("die-experiment", parents=[common], help="run the die / two-sensor experiment in both calculi")
    p.add_argument("--scenario", help="scenario JSON (file or inline); flags below override it")
    p.add_argument("--N", type=int, help="throws per sensor")
    p.add_argument("--d", type=int, help="grid denominator")
    p.add_argument("--epsilon", type=float, help="ignorance mass of the sensor bpas")
    p.add_argument("--mode", choices=("exact_half", "simulated"))
    p.add_argument("--support-csv", help="also write the constrained posterior points to this CSV file")
    p.set_defaults(func=cmd_die_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.format is None:
        args.format = "table" if args.out is None and sys.stdout.isatty() else "json"
    try:
        text = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except EvidentialError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        tmp = f"{args.out}.tmp{os.getpid()}"
        try:
            Path(tmp).write_text(text, encoding="utf-8")
            os.replace(tmp, args.out)
        except OSError as exc:
            print(f"usage error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
