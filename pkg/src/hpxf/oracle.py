"""Brute-force possible-worlds reference semantics for small domains.

Every total assignment consistent with the initial value propositions and
the static causal laws is evolved deterministically along the plan using
the compiled effect propositions.  Sensing splits the set of trajectories
by the sensed value.  A knowledge history is *sound* when each of its
triples holds in every trajectory that survives at the same tree node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple

from .errors import OracleScaleError
from .planner import project

MAX_FLUENTS = 6
MAX_VALUES = 4


class World(tuple):
    """Total assignment stored as sorted ``(fluent, value)`` pairs."""

    __slots__ = ()

    def __new__(cls, assignment):
        items = assignment.items() if isinstance(assignment, dict) else assignment
        return super().__new__(cls, tuple(sorted(items)))

    def __getitem__(self, key):
        if isinstance(key, str):
            for f, v in self:
                if f == key:
                    return v
            raise KeyError(key)
        return tuple.__getitem__(self, key)

    def as_dict(self):
        return dict(self)

    def holds(self, pairs):
        d = dict(self)
        return all(d.get(f) == v for f, v in pairs)


def _satisfies_scls(world, scls):
    d = dict(world)
    for scl in scls:
        if all(d[f] == v for f, v in scl.conditions) and d[scl.effect[0]] != scl.effect[1]:
            return False
    return True


def check_scale(domain):
    if len(domain.ranges) > MAX_FLUENTS:
        raise OracleScaleError(f"{len(domain.ranges)} fluents exceed the oracle limit {MAX_FLUENTS}")
    for f, vals in domain.ranges.items():
        if len(vals) > MAX_VALUES:
            raise OracleScaleError(f"fluent {f!r} has {len(vals)} values, limit is {MAX_VALUES}")


def initial_worlds(domain):
    """All worlds agreeing with the value propositions and closed under the laws."""
    check_scale(domain)
    fixed = {vp.fluent: vp.value for vp in domain.init}
    fluents = sorted(domain.ranges)
    choices = [(fixed[f],) if f in fixed else tuple(domain.ranges[f]) for f in fluents]
    worlds = []
    for values in product(*choices):
        w = World(zip(fluents, values))
        if _satisfies_scls(w, domain.scls):
            worlds.append(w)
    return worlds


def step_world(world, actions, th):
    """Successor world, or None when two applicable effects disagree."""
    d = dict(world)
    updates = {}
    for a in sorted(actions):
        for ep in th.eps_by_action.get(a, ()):
            if all(d[f] == v for f, v in ep.conditions):
                f, v = ep.effect
                if updates.setdefault(f, v) != v:
                    return None
    d.update(updates)
    return World(d)


@dataclass
class OracleResult:
    nodes: dict = field(default_factory=dict)   # node key -> list of trajectories
    dropped: int = 0          # trajectories with clashing effects
    scl_incoherent: int = 0   # trajectories leaving the laws' models
    ranges: dict = field(default_factory=dict)

    def worlds_at(self, key, t):
        return {traj[t] for traj in self.nodes[key]}


def oracle_project(plan, th, tree=None, scl_filter=True):
    """Evolve every initial world along the projection tree of ``plan``.

    The kernel's tree supplies the executed action set of every edge, so an
    action the agent could not execute is skipped here too.  With
    ``scl_filter`` trajectories that stop satisfying the static causal laws
    are discarded as impossible and counted.
    """
    if tree is None:
        tree = project(plan, th)
    res = OracleResult(ranges=dict(th.ranges))
    res.nodes[(0, 0)] = [(w,) for w in initial_worlds(th.domain)]
    for key in sorted(tree.nodes):
        for ck in tree.children[key]:
            child = tree.nodes[ck]
            trajs = res.nodes[key]
            if child.outcome is not None:
                o = child.outcome
                trajs = [tr for tr in trajs if tr[o.step][o.fluent] == o.value]
            out = []
            for tr in trajs:
                if not child.executed:
                    out.append(tr)
                    continue
                nxt = step_world(tr[-1], child.executed, th)
                if nxt is None:
                    res.dropped += 1
                elif scl_filter and not _satisfies_scls(nxt, th.scls):
                    res.scl_incoherent += 1
                else:
                    out.append(tr + (nxt,))
            res.nodes[ck] = out
    return res


class Violation(NamedTuple):
    node: tuple
    triple: object      # kernel Triple, or None for an inconsistent node
    witness: object     # a trajectory refuting it


@dataclass
class SoundnessReport:
    violations: list = field(default_factory=list)
    incompleteness: int = 0
    checked: int = 0

    @property
    def sound(self):
        return not self.violations

    def dump(self):
        lines = [f"checked {self.checked} triples",
                 f"violations {len(self.violations)}",
                 f"incompleteness {self.incompleteness}"]
        for v in self.violations:
            what = str(v.triple) if v.triple is not None else "inconsistent node"
            lines.append(f"violation ({v.node[0]},{v.node[1]}) {what}")
        return "\n".join(lines) + "\n"


def check_soundness(tree, oracle):
    """Compare every node's knowledge with the node's surviving trajectories.

    An inconsistent node that still has surviving trajectories is itself a
    violation: the kernel ruled out a situation that can occur.
    """
    rep = SoundnessReport()
    for key in sorted(tree.nodes):
        node = tree.nodes[key]
        trajs = oracle.nodes.get(key, [])
        if not node.consistent:
            if trajs:
                rep.violations.append(Violation(key, None, trajs[0]))
            continue
        if not trajs:
            continue
        kh = node.state.kh
        for tr in sorted(kh):
            rep.checked += 1
            f, v, t, pos = tr
            for traj in trajs:
                if (traj[t][f] == v) != pos:
                    rep.violations.append(Violation(key, tr, traj))
                    break
        for t in range(node.state.now + 1):
            for f, vals in sorted(oracle.ranges.items()):
                seen = {traj[t][f] for traj in trajs}
                if len(seen) == 1:
                    (v,) = seen
                    if (f, v, t, True) not in kh:
                        rep.incompleteness += 1
                for v in vals:
                    if v not in seen and (f, v, t, False) not in kh:
                        rep.incompleteness += 1
    return rep

