"""Command-line interface.

Exit codes: 0 ok, 1 invalid domain, 2 I/O or parse error, 3 inconsistent
branch or kernel error, 4 no plan, 5 resource cap, 6 soundness violation.
"""

from __future__ import annotations

import argparse
import random
import sys

from .aspemit import emit_lp
from .domain import GoalSet, parse_domain, validate_domain
from .errors import (
    AllOutcomesExcluded,
    BranchCapExceeded,
    ConcurrentSimilarEPs,
    HpxfError,
    InconsistencyDetected,
    IterationBudgetExceeded,
    MultipleSensingActions,
    NoPlan,
    OracleScaleError,
    ParseError,
    UnknownAction,
)
from .generators import random_plan
from .kernel import Theory
from .oracle import check_soundness, oracle_project
from .planner import (
    EMPTY_PLAN,
    PlanSearchConfig,
    parse_plan,
    plan_search,
    print_plan,
    project,
)

OK, INVALID, IO_PARSE, INCONSISTENT, NO_PLAN, CAP, UNSOUND = range(7)

_MODES = {"seq": "sequential", "sequential": "sequential",
          "conc": "concurrent", "concurrent": "concurrent"}


class _Exit(Exception):
    def __init__(self, code, message=""):
        super().__init__(message)
        self.code = code


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise _Exit(IO_PARSE, f"cannot read {path}: {err.strerror}") from None


def _load_theory(path, strict=True):
    domain = parse_domain(_read(path))
    report = validate_domain(domain)
    for f in report.findings:
        print(f"{path}: {f.severity}: {f.location}: {f.message}", file=sys.stderr)
    if strict and not report.ok:
        raise _Exit(INVALID, f"{path}: {len(report.errors)} validation error(s)")
    return Theory(domain)


def _load_plan(path):
    return parse_plan(_read(path)) if path else EMPTY_PLAN


def _write(text, path, out):
    if path in (None, "-"):
        out.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as err:
        raise _Exit(IO_PARSE, f"cannot write {path}: {err.strerror}") from None


def _goal_pairs(items):
    pairs = set()
    for item in items or ():
        f, sep, v = item.partition("=")
        if not sep or not f or not v:
            raise _Exit(IO_PARSE, f"goal {item!r} is not of the form fluent=value")
        pairs.add((f.strip(), v.strip()))
    return frozenset(pairs)


def run_check(args, out):
    th = _load_theory(args.domain, strict=False)
    report = validate_domain(th.domain)
    d, comp = th.domain, th.compiled
    gen = comp.generated
    dead = [ep for ep in gen if len({f for f, _ in ep.conditions}) < len(ep.conditions)]
    plural = "" if len(gen) == 1 else "s"
    line = (f"{len(d.ranges)} fluents, {len(d.actions)} actions, {len(d.scls)} SCLs, "
            f"{len(gen)} generated EP{plural}")
    if dead:
        line += f" ({len(dead)} unsatisfiable)"
    for ep in dead:
        print(f"{args.domain}: warning: {ep.id}: conditions can never hold together",
              file=sys.stderr)
    print(line, file=out)
    if args.show_compiled:
        for ep in gen:
            prov = comp.provenance[ep.id]
            cond = ", ".join(f"{f} = {v}" for f, v in sorted(ep.conditions))
            print(f"# {ep.id}: from {prov.source} via {prov.scl}, "
                  f"trigger {prov.trigger[0]} = {prov.trigger[1]}", file=out)
            print(f"action {ep.action} {{ effect {ep.effect[0]} = {ep.effect[1]}"
                  + (f" if {cond}" if cond else "") + " }", file=out)
    return OK if report.ok else INVALID


def run_project(args, out):
    th = _load_theory(args.domain)
    plan = _load_plan(args.plan)
    tree = project(plan, th, max_branches=args.max_branches)
    _write(tree.dump(), args.output, out)
    return INCONSISTENT if tree.inconsistent() else OK


def run_plan(args, out):
    th = _load_theory(args.domain)
    goals = th.domain.goals
    if args.weak or args.strong:
        goals = GoalSet(_goal_pairs(args.strong), _goal_pairs(args.weak))
    cfg = PlanSearchConfig(args.max_steps, args.max_branches, _MODES[args.mode])
    plan = plan_search(th, cfg, goals)
    _write(print_plan(plan) or "# empty plan: goals hold initially\n", args.output, out)
    return OK


def run_emit(args, out):
    th = _load_theory(args.domain)
    cfg = PlanSearchConfig(args.max_steps, args.max_branches, _MODES[args.mode])
    _write(emit_lp(th.domain, cfg).text, args.output, out)
    return OK


def run_oracle_compare(args, out):
    th = _load_theory(args.domain)
    if args.plan:
        plans = [_load_plan(args.plan)]
    else:
        rng = random.Random(args.seed)
        plans = [random_plan(rng, th.domain, args.max_steps) for _ in range(args.samples)]
    worst = OK
    for i, plan in enumerate(plans):
        tree = project(plan, th, max_branches=args.max_branches)
        rep = check_soundness(tree, oracle_project(plan, th, tree))
        if len(plans) > 1:
            print(f"# plan {i + 1}", file=out)
            out.write(print_plan(plan))
        out.write(rep.dump())
        if not rep.sound:
            worst = UNSOUND
    return worst


def build_parser():
    p = argparse.ArgumentParser(prog="hpxf", description=(
        "Epistemic action reasoning with postdiction: check domains, project "
        "plans, search contingent plans, emit answer set programs."))
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, plan=False, bounds=False):
        sp.add_argument("--domain", required=True, help="domain file")
        if plan:
            sp.add_argument("--plan", help="plan file (default: empty plan)")
        if bounds:
            sp.add_argument("--max-steps", type=int, default=3, help="horizon (default 3)")
        sp.add_argument("--max-branches", type=int, default=2, help="branch cap (default 2)")
        sp.add_argument("-o", "--output", help="output file (default stdout)")

    sp = sub.add_parser("check", help="parse and validate a domain")
    sp.add_argument("--domain", required=True)
    sp.add_argument("--show-compiled", action="store_true",
                    help="print effect propositions generated from static causal laws")
    sp.set_defaults(func=run_check)

    sp = sub.add_parser("project", help="print the transition tree of a plan")
    common(sp, plan=True)
    sp.set_defaults(func=run_project, max_branches=None)

    sp = sub.add_parser("plan", help="search a plan for the domain goals")
    common(sp, bounds=True)
    sp.add_argument("--mode", choices=sorted(_MODES), default="seq")
    sp.add_argument("--weak", action="append", metavar="F=V", help="weak goal (repeatable)")
    sp.add_argument("--strong", action="append", metavar="F=V", help="strong goal (repeatable)")
    sp.set_defaults(func=run_plan)

    sp = sub.add_parser("emit-asp", help="write the answer set program encoding")
    common(sp, bounds=True)
    sp.add_argument("--mode", choices=sorted(_MODES), default="seq")
    sp.set_defaults(func=run_emit)

    sp = sub.add_parser("oracle-compare", help="check projection soundness against possible worlds")
    common(sp, plan=True, bounds=True)
    sp.add_argument("--seed", type=int, default=0, help="seed for random plans without --plan")
    sp.add_argument("--samples", type=int, default=20, help="random plans to check without --plan")
    sp.set_defaults(func=run_oracle_compare)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "max_steps", 0) < 0 or (getattr(args, "max_branches", 0) or 0) < 0:
        print("hpxf: bounds must be non-negative", file=sys.stderr)
        return IO_PARSE
    try:
        return args.func(args, out)
    except _Exit as err:
        if str(err):
            print(f"hpxf: {err}", file=sys.stderr)
        return err.code
    except (ParseError, UnknownAction) as err:
        print(f"hpxf: {err}", file=sys.stderr)
        return IO_PARSE
    except NoPlan as err:
        print(f"hpxf: {err}", file=sys.stderr)
        return NO_PLAN
    except (BranchCapExceeded, IterationBudgetExceeded, OracleScaleError) as err:
        print(f"hpxf: {err}", file=sys.stderr)
        return CAP
    except (InconsistencyDetected, ConcurrentSimilarEPs, MultipleSensingActions,
            AllOutcomesExcluded) as err:
        print(f"hpxf: {err}", file=sys.stderr)
        return INCONSISTENT
    except HpxfError as err:
        print(f"hpxf: {err}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
