"""Command-line front end.

Exit codes: 0 success or SAT, 1 UNSAT (or not a di-cograph), 2 validation
failure, 3 I/O or parse error, 4 internal invariant breach.  Data goes to
stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from .cotree import relations_from_cotree, serialize_cotree
from .dicograph import is_dicograph, parse_digraph
from .oracle import CapExceeded, cross_check
from .relations import Instance, ParseError, format_relations, parse_relations
from .satisfiability import UNSAT_MESSAGE, InvariantError, RuleOrder, build_cotree
from .simulation import ExperimentConfig, ProtocolError, run_experiment, write_csv

OK, UNSAT, INVALID, IO_ERROR, INTERNAL = 0, 1, 2, 3, 4


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _Exit(IO_ERROR, f"cannot read {path}: {exc.strerror or exc}") from None


def _load_instance(path: str) -> Instance:
    text = _read(path)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            inst = parse_relations(text)
        except (ParseError, ValueError) as exc:
            raise _Exit(IO_ERROR, f"{path}: {exc}") from None
    for w in caught:
        _err(f"{path}: warning: {w.message}")
    return inst


def _write(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise _Exit(IO_ERROR, f"cannot write {out}: {exc.strerror or exc}") from None


def _solve(args):
    inst = _load_instance(args.file)
    outcome = build_cotree(inst, args.order, verify=args.verify)
    if outcome.violations:
        print(UNSAT_MESSAGE)
        for v in outcome.violations:
            _err(f"invalid: {v}")
        raise _Exit(INVALID)
    if not outcome.satisfiable:
        print(UNSAT_MESSAGE)
        _err("no rule applies on {" + ", ".join(v for v in inst.vertices if v in outcome.unsat_witness) + "}")
        raise _Exit(UNSAT)
    return inst, outcome.cotree


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    from .relations import validate

    inst = _load_instance(args.file)
    violations = validate(inst)
    if not violations:
        print("ok")
        return OK
    for v in violations:
        print(v)
    return INVALID


def cmd_check(args) -> int:
    _solve(args)
    print("SAT")
    return OK


def cmd_cotree(args) -> int:
    _, tree = _solve(args)
    _write(args.out, serialize_cotree(tree) + "\n")
    return OK


def cmd_extend(args) -> int:
    inst, tree = _solve(args)
    _write(args.out, format_relations(Instance(inst.vertices, relations_from_cotree(tree))))
    return OK


def cmd_dicograph(args) -> int:
    text = _read(args.file)
    try:
        g = parse_digraph(text)
    except (ParseError, ValueError) as exc:
        raise _Exit(IO_ERROR, f"{args.file}: {exc}") from None
    ok, result = is_dicograph(g)
    if ok:
        print("true")
        print(serialize_cotree(result))
        return OK
    print("false")
    names = [g.label(v) for v in range(g.n)]
    _err("prime induced subgraph on {" + ", ".join(v for v in names if v in result) + "}")
    return UNSAT


_SIM_FLAGS = {
    "leaf_sizes": "leaf_sizes",
    "trials": "trials",
    "p_unassigned": "p_unassigned",
    "p_forbidden": "p_forbidden",
    "labels": "label_distribution",
    "orders": "rule_orders",
    "seed": "master_seed",
    "fx_orientation": "fx_orientation",
    "baseline": "baseline",
}


def cmd_simulate(args) -> int:
    settings: dict = {}
    if args.config:
        base = ExperimentConfig.from_text(_read(args.config))
        settings = {k: getattr(base, k) for k in _SIM_FLAGS.values()}
    for flag, key in _SIM_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            settings[key] = value
    try:
        cfg = ExperimentConfig.from_strings(settings)
    except ValueError as exc:
        raise _Exit(INVALID, f"bad configuration: {exc}") from None
    _err(f"simulate: master_seed={cfg.master_seed} threads={args.threads}")
    try:
        records = list(run_experiment(cfg, workers=args.threads))
    except ProtocolError as exc:
        raise _Exit(INTERNAL, str(exc)) from None
    _write(args.out, write_csv(records))
    return OK


def cmd_oracle_check(args) -> int:
    try:
        agreed, total, bad = cross_check(args.n, args.trials, args.seed, args.order)
    except CapExceeded as exc:
        raise _Exit(IO_ERROR, str(exc)) from None
    family = "exhaustive" if args.n <= 3 else f"random seed={args.seed}"
    pct = 100.0 * agreed / total if total else 100.0
    print(f"n={args.n} family={family} instances={total} agreed={agreed} ({pct:.2f}%)")
    for inst in bad[:5]:
        _err("disagreement on:\n" + format_relations(inst))
    return OK if agreed == total else INTERNAL


# ---------------------------------------------------------------------------


def _order(text: str) -> RuleOrder:
    try:
        return RuleOrder.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicosat",
        description="Satisfiability of partial orthology, paralogy and xenology relations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def solver(name, help_text, out=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="relations file")
        p.add_argument("--order", type=_order, default=RuleOrder(), help="rule order: 123..321 or rand:<seed>")
        p.add_argument("--verify", action="store_true", help="re-check the result against the input")
        if out:
            p.add_argument("--out", help="output file (default stdout)")
        return p

    p = sub.add_parser("validate", help="check a relations file for structural violations")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)
    solver("check", "decide satisfiability").set_defaults(func=cmd_check)
    solver("cotree", "print an explaining cotree", out=True).set_defaults(func=cmd_cotree)
    solver("extend", "print a full relation set extending the input", out=True).set_defaults(func=cmd_extend)

    p = sub.add_parser("dicograph", help="recognize a di-cograph and print its cotree")
    p.add_argument("file", help="digraph file")
    p.set_defaults(func=cmd_dicograph)

    p = sub.add_parser("simulate", help="run the simulation study and write CSV")
    p.add_argument("--config", help="key = value configuration file; flags override it")
    p.add_argument("--leaf-sizes", dest="leaf_sizes", help="comma separated, e.g. 25,50,100")
    p.add_argument("--trials")
    p.add_argument("--p-unassigned", dest="p_unassigned", help="comma separated probabilities")
    p.add_argument("--p-forbidden", dest="p_forbidden", help="comma separated probabilities")
    p.add_argument("--labels", help="uniform, skewed, or p0,p1,pX")
    p.add_argument("--orders", help="comma separated rule orders, 'rand', or 'all'")
    p.add_argument("--seed", help="master seed")
    p.add_argument("--fx-orientation", dest="fx_orientation", choices=("canonical", "reversed"))
    p.add_argument("--baseline", help="0 (off), 3 or 4 options for the random-assignment rows")
    p.add_argument("--threads", type=int, default=1, help="worker processes; output does not depend on it")
    p.add_argument("--out", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle-check", help="compare the engine with brute-force enumeration")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--order", type=_order, default=RuleOrder())
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        if str(exc):
            _err(f"dicosat {args.command}: {exc}")
        return exc.code
    except InvariantError as exc:
        _err(f"dicosat {args.command}: invariant breach: {exc}")
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
