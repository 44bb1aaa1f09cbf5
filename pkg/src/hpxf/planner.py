"""Conditional plans: projection into transition trees, goal checks, search.

Plan text format::

    step { sit }
    step { drv }
    step { senseLoc }
    branch pAt=kit {
        step { drv }
    }

A plan is a sequence of steps followed by optional ``branch`` blocks that
continue after the sensing action of the last step.  Outcomes without a
branch block end there.  Steps after a sensing step that is *not* the last
step are shared by every outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple, Optional

from .domain import Tok, tokenize
from .errors import (
    BranchCapExceeded,
    ConcurrentSimilarEPs,
    InconsistencyDetected,
    MultipleSensingActions,
    NoPlan,
    PlanError,
)
from .kernel import dump_lines, executable, sensed_fluent, successors


@dataclass(frozen=True)
class ConditionalPlan:
    steps: tuple = ()
    branches: tuple = ()      # ((fluent, value, ConditionalPlan), ...)

    @classmethod
    def sequence(cls, *steps):
        """Linear plan; each step is an action name or an iterable of names."""
        return cls(tuple(frozenset([s]) if isinstance(s, str) else frozenset(s)
                         for s in steps))

    @property
    def depth(self):
        sub = max((p.depth for _, _, p in self.branches), default=0)
        return len(self.steps) + sub

    def __bool__(self):
        return bool(self.steps)

    def branch(self, fluent, value):
        for f, v, p in self.branches:
            if (f, v) == (fluent, value):
                return p
        return None

    def actions(self):
        out = set()
        for s in self.steps:
            out |= s
        for _, _, p in self.branches:
            out |= p.actions()
        return out


EMPTY_PLAN = ConditionalPlan()


def parse_plan(text):
    toks = tokenize(text)
    pos = [0]

    def peek():
        return toks[pos[0]] if pos[0] < len(toks) else None

    def take(expected=None):
        tok = peek()
        if tok is None:
            last = toks[-1] if toks else Tok("", 1, 1)
            raise PlanError("unexpected end of plan", last.line, last.col)
        if expected is not None and tok.text != expected:
            raise PlanError(f"expected {expected!r}, found {tok.text!r}", tok.line, tok.col)
        pos[0] += 1
        return tok

    def block(closing):
        steps, branches = [], []
        while True:
            tok = peek()
            if tok is None or tok.text == closing:
                break
            if tok.text == ";":
                take()
                continue
            if tok.text == "step":
                if branches:
                    raise PlanError("steps cannot follow branch blocks", tok.line, tok.col)
                take()
                take("{")
                names = []
                while peek() is not None and peek().text != "}":
                    t = take()
                    if t.text != ",":
                        names.append(t.text)
                take("}")
                steps.append(frozenset(names))
            elif tok.text == "branch":
                take()
                f = take().text
                take("=")
                v = take().text
                take("{")
                sub = block("}")
                take("}")
                if not steps:
                    raise PlanError("branch block without a preceding step", tok.line, tok.col)
                branches.append((f, v, sub))
            else:
                raise PlanError(f"unexpected {tok.text!r} in plan", tok.line, tok.col)
        return ConditionalPlan(tuple(steps), tuple(sorted(branches, key=lambda b: b[:2])))

    plan = block(None)
    return plan


def print_plan(plan, indent=0):
    pad = "    " * indent
    lines = [f"{pad}step {{ {', '.join(sorted(s))} }}" for s in plan.steps]
    for f, v, sub in plan.branches:
        lines.append(f"{pad}branch {f}={v} {{")
        body = print_plan(sub, indent + 1)
        if body:
            lines.append(body.rstrip("\n"))
        lines.append(f"{pad}}}")
    return "\n".join(lines) + "\n" if lines else ""


def validate_plan(plan, th):
    """Raise PlanError if ``plan`` names unknown actions or misplaced branches."""
    for step in plan.steps:
        for a in sorted(step):
            if a not in th.actions:
                raise PlanError(f"unknown action {a!r}")
    if plan.branches:
        try:
            f = sensed_fluent(plan.steps[-1], th)
        except MultipleSensingActions as err:
            raise PlanError(str(err)) from None
        for bf, bv, sub in plan.branches:
            if bf != f:
                raise PlanError(f"branch on {bf!r} but the last step senses {f!r}")
            if bv not in th.ranges[bf]:
                raise PlanError(f"{bv!r} is not in the range of {bf!r}")
            validate_plan(sub, th)


# ---------------------------------------------------------------------------
# Transition trees
# ---------------------------------------------------------------------------

@dataclass
class TreeNode:
    key: tuple                         # (level, branch label)
    state: object = None               # HState, None when inconsistent
    error: Optional[InconsistencyDetected] = None
    parent: Optional[tuple] = None
    executed: frozenset = frozenset()  # actions that were executable
    planned: frozenset = frozenset()   # actions the plan asked for
    outcome: object = None             # sensed Triple, if any

    @property
    def consistent(self):
        return self.error is None


@dataclass
class TransitionTree:
    nodes: dict = field(default_factory=dict)
    children: dict = field(default_factory=dict)

    @property
    def root(self):
        return self.nodes[(0, 0)]

    def add(self, node):
        self.nodes[node.key] = node
        self.children.setdefault(node.key, [])
        if node.parent is not None:
            self.children[node.parent].append(node.key)

    def leaves(self):
        return [self.nodes[k] for k in sorted(self.nodes) if not self.children[k]]

    def level(self, n):
        return [self.nodes[k] for k in sorted(self.nodes) if k[0] == n]

    def inconsistent(self):
        return [n for n in self.nodes.values() if not n.consistent]

    def dump(self):
        out = []
        for key in sorted(self.nodes):
            node = self.nodes[key]
            header = f"node ({key[0]},{key[1]})"
            if node.parent is not None:
                header += f" via {{{', '.join(sorted(node.planned))}}}"
                if node.outcome is not None:
                    header += f" sensed {node.outcome.fluent}={node.outcome.value}"
            if not node.consistent:
                out.append(f"{header} inconsistent: {node.error}")
                continue
            out.append(header)
            out.extend(f"  {line}" for line in dump_lines(node.state))
        return "\n".join(out) + "\n"


def project(plan, th, max_branches=None):
    """Transition tree obtained by executing ``plan`` from the initial state.

    Levels are expanded in order so branch labels are canonical: the first
    sensing outcome (in declared value order) keeps its parent's label, the
    others take the smallest labels not yet used anywhere in the tree.
    """
    validate_plan(plan, th)
    tree = TransitionTree()
    try:
        root = TreeNode((0, 0), th.initial_state())
    except InconsistencyDetected as err:
        root = TreeNode((0, 0), None, err)
    tree.add(root)
    used = {0}
    frontier = [(root, plan)]
    level = 0
    while frontier:
        nxt = []
        for node, rest in frontier:
            if not node.consistent or not rest.steps:
                continue
            step = rest.steps[0]
            tail = ConditionalPlan(rest.steps[1:], rest.branches)
            for i, succ in enumerate(successors(step, node.state, th)):
                if i == 0:
                    label = node.key[1]
                else:
                    label = _fresh(used)
                    if max_branches is not None and label > max_branches:
                        raise BranchCapExceeded(
                            f"branch label {label} exceeds the cap of {max_branches}")
                    used.add(label)
                child = TreeNode((level + 1, label), succ.state, succ.error, node.key,
                                 succ.executed, step, succ.outcome)
                tree.add(child)
                if tail.steps:
                    cont = tail
                elif succ.outcome is not None:
                    cont = tail.branch(succ.outcome.fluent, succ.outcome.value) or EMPTY_PLAN
                else:
                    cont = EMPTY_PLAN
                nxt.append((child, cont))
        frontier = sorted(nxt, key=lambda item: item[0].key)
        level += 1
    return tree


def _fresh(used):
    label = 0
    while label in used:
        label += 1
    return label


# ---------------------------------------------------------------------------
# Goals
# ---------------------------------------------------------------------------

def known_at_now(state, pairs):
    n = state.now
    return all((f, v, n, True) in state.kh for f, v in pairs)


class GoalReport(NamedTuple):
    weak_satisfied: bool
    strong_satisfied: bool
    weak_failing: tuple
    strong_failing: tuple
    inconsistent: tuple

    @property
    def satisfied(self):
        return self.weak_satisfied and self.strong_satisfied


def verify_goals(tree, goals):
    """Weak goals must hold in some consistent leaf, strong goals in all of them."""
    leaves = tree.leaves()
    good = [leaf for leaf in leaves if leaf.consistent]
    weak_failing = tuple(leaf.key for leaf in good if not known_at_now(leaf.state, goals.weak))
    strong_failing = tuple(leaf.key for leaf in good
                           if not known_at_now(leaf.state, goals.strong))
    weak_ok = not goals.weak or len(weak_failing) < len(good)
    return GoalReport(weak_ok, not strong_failing, weak_failing, strong_failing,
                      tuple(leaf.key for leaf in leaves if not leaf.consistent))


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlanSearchConfig:
    max_steps: int = 3
    max_branches: int = 2
    mode: str = "sequential"    # or "concurrent"

    def __post_init__(self):
        if self.max_steps < 0 or self.max_branches < 0:
            raise ValueError("max_steps and max_branches must be non-negative")
        if self.mode not in ("sequential", "concurrent"):
            raise ValueError(f"unknown planning mode {self.mode!r}")


class _Found(NamedTuple):
    branches: int     # labels used beyond the root branch
    depth: int
    plan: ConditionalPlan

    @property
    def cost(self):
        return (self.branches, self.depth)


def _action_sets(h, th, mode):
    ready = [a for a in th.actions if executable(a, h, th)]
    if mode == "sequential":
        return [frozenset([a]) for a in ready]
    sets = []
    for k in range(1, len(ready) + 1):
        for combo in combinations(ready, k):
            if sum(1 for a in combo if th.senses.get(a)) <= 1:
                sets.append(frozenset(combo))
    return sets


def plan_search(th, cfg, goals=None):
    """Find a conditional plan satisfying the goals within the configured bounds.

    Iterative deepening over the horizon; each depth is searched exhaustively
    with memoisation on (h-state, remaining depth, weak goal still needed),
    preferring plans that use fewer branches.  Raises NoPlan when no plan
    exists within ``cfg.max_steps`` steps, and BranchCapExceeded when plans
    exist only with more than ``cfg.max_branches`` extra branch labels.
    """
    goals = th.domain.goals if goals is None else goals
    weak, strong = goals.weak, goals.strong
    try:
        root = th.initial_state()
    except InconsistencyDetected as err:
        raise NoPlan(f"initial state is inconsistent: {err}") from None
    memo = {}

    def solve(h, d, need_weak):
        key = (h, d, need_weak)
        if key in memo:
            return memo[key]
        best = None
        strong_ok = known_at_now(h, strong)
        weak_ok = known_at_now(h, weak)
        if strong_ok and (weak_ok or not need_weak):
            best = _Found(0, 0, EMPTY_PLAN)
        if best is None and d > 0:
            for acts in _action_sets(h, th, cfg.mode):
                try:
                    succs = successors(acts, h, th)
                except (ConcurrentSimilarEPs, MultipleSensingActions):
                    continue
                found = _combine(acts, succs, d, need_weak, solve)
                if found is not None and (best is None or found.cost < best.cost):
                    best = found
        memo[key] = best
        return best

    over_cap = None
    for depth in range(cfg.max_steps + 1):
        found = solve(root, depth, bool(weak))
        if found is None:
            continue
        if found.branches <= cfg.max_branches:
            return found.plan
        over_cap = found
    if over_cap is not None:
        raise BranchCapExceeded(
            f"plans exist but need {over_cap.branches} extra branches "
            f"(cap {cfg.max_branches})")
    raise NoPlan(f"no plan within {cfg.max_steps} steps")


def _combine(acts, succs, d, need_weak, solve):
    def child(s, need):
        if s.error is not None:
            # inconsistent leaves are exempt from strong goals but never satisfy weak ones
            return None if need else _Found(0, 0, EMPTY_PLAN)
        return solve(s.state, d - 1, need)

    plain = [child(s, False) for s in succs]
    if need_weak:
        options = []
        for j, s in enumerate(succs):
            r = child(s, True)
            if r is None:
                continue
            picks = plain[:j] + [r] + plain[j + 1:]
            if all(p is not None for p in picks):
                options.append(picks)
        if not options:
            return None
        picks = min(options, key=lambda ps: (sum(p.branches for p in ps),
                                             max(p.depth for p in ps)))
    else:
        if any(p is None for p in plain):
            return None
        picks = plain

    branches = len(succs) - 1 + sum(p.branches for p in picks)
    depth = 1 + max(p.depth for p in picks)
    if len(succs) == 1:
        sub = picks[0].plan
        plan = ConditionalPlan((acts,) + sub.steps, sub.branches)
    else:
        arms = tuple((s.outcome.fluent, s.outcome.value, p.plan)
                     for s, p in zip(succs, picks) if p.plan)
        plan = ConditionalPlan((acts,), tuple(sorted(arms, key=lambda b: b[:2])))
    return _Found(branches, depth, plan)
