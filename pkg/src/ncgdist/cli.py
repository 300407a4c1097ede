"""Command-line front end: ``ncgdist compute|verify|catalog|bundle|moyal|wd``.

Exit codes: 0 success (including an infinite distance), 1 verification
failure, 2 input error, 3 solver non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import catalog
from .algebra import state_from_json
from .kantorovich import kantorovich_bracket
from .solver import ConvergenceError, SolverOptions, spectral_distance
from .triple import triple_from_json
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CONVERGENCE = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load_json(path: str, what: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {what} file '{path}': {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file '{path}' is not valid JSON: {exc}") from exc


def _load_problem(args):
    try:
        t = triple_from_json(_load_json(args.triple, "triple"))
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"triple: {exc}") from exc
    states = []
    for name, path in (("state-a", args.state_a), ("state-b", args.state_b)):
        obj = _load_json(path, name)
        try:
            states.append(state_from_json(t.algebra, obj))
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{name}: {exc}") from exc
    return t, states[0], states[1]


def _emit(obj, out: str | None):
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def cmd_compute(args) -> int:
    t, a, b = _load_problem(args)
    opts = SolverOptions(rel_tolerance=args.tol, multistarts=args.multistarts, seed=args.seed)
    try:
        res = spectral_distance(t, a, b, opts)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    _emit(res.to_json(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, args.seed)
    text = report.to_csv(timings=args.timings)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    s = report.summary()
    print(f"{args.suite}: {s['passed']}/{s['total']} passed", file=sys.stderr)
    if report.failures:
        w = csv.writer(sys.stderr, lineterminator="\n")
        for r in report.failures:
            w.writerow(r.cells(args.timings))
        return EXIT_FAIL
    return EXIT_OK


def _params_list(path: str) -> list[dict]:
    obj = _load_json(path, "params")
    items = obj if isinstance(obj, list) else [obj]
    if not all(isinstance(p, dict) for p in items):
        raise InputError("params must be a JSON object or a list of objects")
    return items


def _evaluate(entry_id: str, params: dict):
    try:
        return catalog.evaluate(entry_id, params)
    except (ValueError, TypeError) as exc:
        raise InputError(f"{entry_id}: {exc}") from exc


def cmd_catalog(args) -> int:
    if args.action == "list":
        _emit(catalog.list_entries(), None)
        return EXIT_OK
    if args.id is None:
        raise InputError("catalog eval needs an entry id")
    if args.id not in catalog.REGISTRY:
        print(f"error: unknown catalog id '{args.id}'", file=sys.stderr)
        return EXIT_INPUT
    path = args.params or args.params_path
    params = _load_json(path, "params") if path else {}
    if not isinstance(params, dict):
        raise InputError("params must be a JSON object")
    _emit({"id": args.id, "value": _evaluate(args.id, params),
           "formula_ref": catalog.REGISTRY[args.id].formula_ref}, None)
    return EXIT_OK


def _cell(v) -> str:
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    if isinstance(v, float):
        return "%.12g" % v
    return str(v)


def cmd_formula_csv(args) -> int:
    """``bundle``/``moyal`` subcommands: one CSV row per parameter object."""
    entry_id = catalog.ALIASES[(args.command, args.kind)]
    entry = catalog.REGISTRY[entry_id]
    items = _params_list(args.params)
    names = list(entry.params)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["id", *names, "value", "formula_ref"])
    for p in items:
        value = _evaluate(entry_id, p)
        w.writerow([entry_id, *(_cell(p.get(n, "")) for n in names), _cell(value), entry.formula_ref])
    return EXIT_OK


def cmd_wd(args) -> int:
    t, a, b = _load_problem(args)
    opts = SolverOptions(rel_tolerance=args.tol, seed=args.seed)
    try:
        br = kantorovich_bracket(t, a, b, args.pairs, args.seed, opts)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except RuntimeError as exc:
        raise InputError(str(exc)) from exc
    _emit(br.to_json(), args.out)
    return EXIT_OK


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _nonneg_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncgdist", description="Spectral distances on finite spectral triples.")
    sub = ap.add_subparsers(dest="command", required=True)

    def problem_flags(p):
        p.add_argument("--triple", required=True, help="triple JSON file")
        p.add_argument("--state-a", required=True, help="first state JSON file")
        p.add_argument("--state-b", required=True, help="second state JSON file")
        p.add_argument("--tol", type=_positive_float, default=1e-6, help="relative gap tolerance")
        p.add_argument("--seed", type=_nonneg_int, default=0)
        p.add_argument("--out", help="write the JSON result here instead of stdout")

    p = sub.add_parser("compute", help="spectral distance between two states")
    problem_flags(p)
    p.add_argument("--multistarts", type=_positive_int, default=16)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="run a verification suite and write a CSV report")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.add_argument("--timings", action="store_true", help="fill the runtime_ms column")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("catalog", help="list or evaluate closed-form formulas")
    p.add_argument("action", choices=("list", "eval"))
    p.add_argument("id", nargs="?")
    p.add_argument("params_path", nargs="?", help="params JSON file")
    p.add_argument("--params", help="params JSON file")
    p.set_defaults(func=cmd_catalog)

    for name, kinds in (("bundle", ("fiber", "fiber_n2", "torus")),
                        ("moyal", ("eigen", "qlength", "sqlength"))):
        p = sub.add_parser(name, help=f"{name} closed forms as CSV")
        p.add_argument("kind", choices=kinds)
        p.add_argument("--params", required=True, help="JSON object or list of objects")
        p.set_defaults(func=cmd_formula_csv)

    p = sub.add_parser("wd", help="spectral distance and sampled upper bound on W_D")
    problem_flags(p)
    p.add_argument("--pairs", type=_positive_int, default=20)
    p.set_defaults(func=cmd_wd)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
