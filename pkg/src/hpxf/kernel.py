"""Historical knowledge states and their evolution under actions and sensing.

An h-state pairs an action history (``(action, step)`` pairs) with a
knowledge history of signed triples: ``Triple(f, v, t, True)`` means *f is
known to have value v at step t*, ``Triple(f, v, t, False)`` means *f is
known not to have value v at step t*.  Knowledge is refined by eight
monotone inference mechanisms applied until nothing changes.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple, Optional

from .compile import DEFAULT_CAP, gen_ep
from .errors import (
    AllOutcomesExcluded,
    ConcurrentSimilarEPs,
    InconsistencyDetected,
    MultipleSensingActions,
    UnknownAction,
)


class SignedValue(NamedTuple):
    value: str
    positive: bool = True

    def __invert__(self):
        return SignedValue(self.value, not self.positive)


class Triple(NamedTuple):
    fluent: str
    value: str
    step: int
    positive: bool = True

    @property
    def signed(self):
        return SignedValue(self.value, self.positive)

    def __str__(self):
        op = "=" if self.positive else "!="
        return f"knows {self.fluent}{op}{self.value} @{self.step}"


def knows(f, v, t):
    return Triple(f, v, t, True)


def knows_not(f, v, t):
    return Triple(f, v, t, False)


@dataclass(frozen=True)
class HState:
    ah: frozenset = frozenset()
    kh: frozenset = frozenset()

    @cached_property
    def now(self):
        return now(self)

    def dump(self):
        return dump_hstate(self)


def now(h):
    """0 for an empty action history, otherwise one past the latest step."""
    if not h.ah:
        return 0
    return 1 + max(t for _, t in h.ah)


class Theory:
    """A validated domain together with its compiled effect propositions.

    Every kernel function takes the theory as context.  Lookup tables are
    built once here.
    """

    def __init__(self, domain, compiled=None, cap=DEFAULT_CAP):
        self.domain = domain
        if compiled is None:
            compiled = gen_ep(domain.effects, domain.scls, cap=cap)
        self.compiled = compiled
        self.ranges = dict(domain.ranges)
        self.scls = tuple(domain.scls)
        self.eps_by_action = defaultdict(tuple)
        for ep in compiled.eps:
            self.eps_by_action[ep.action] += (ep,)
        self.senses = defaultdict(tuple)
        for kp in domain.knowledge:
            self.senses[kp.action] += (kp.fluent,)
        self.requires = defaultdict(frozenset)
        for x in domain.executability:
            self.requires[x.action] |= x.required
        self.actions = tuple(domain.actions) + tuple(
            sorted(domain.action_set() - set(domain.actions)))

    @classmethod
    def from_text(cls, text, **kw):
        from .domain import parse_domain
        return cls(parse_domain(text), **kw)

    def check_action(self, a):
        if a not in self.actions:
            raise UnknownAction(f"unknown action {a!r}")

    @lru_cache(maxsize=4096)
    def effects_at(self, ah):
        """Effect history indexed by step: ``{t: (ep, ...)}``."""
        by_step = defaultdict(list)
        for a, t in sorted(ah):
            self.check_action(a)
            by_step[t].extend(self.eps_by_action.get(a, ()))
        return {t: tuple(eps) for t, eps in by_step.items()}

    def initial_state(self):
        """The evaluated h-state built from the value propositions."""
        kh = frozenset(knows(vp.fluent, vp.value, 0) for vp in self.domain.init)
        h = HState(frozenset(), kh)
        _check_valid_kh(kh, "init")
        return evaluate(h, self)


def effect_history(h, th):
    """All ``(ep_id, step)`` pairs for effect propositions of occurred actions."""
    return frozenset((ep.id, t) for t, eps in th.effects_at(h.ah).items() for ep in eps)


# ---------------------------------------------------------------------------
# Inertia
# ---------------------------------------------------------------------------

def _condition_known_false(ep, t, kh):
    return any((fc, vc, t, False) in kh for fc, vc in ep.conditions)


def inertial(f, sv, t, h, th, _eff=None):
    """Whether ``(f, sv)`` cannot be changed by the effects applied at ``t``.

    For a positive value every effect at ``t`` that would set ``f`` to another
    value must have a condition known to be false; for a negated value the
    same holds for effects that would set ``f`` to that value.
    """
    if sv.value not in th.ranges.get(f, ()):
        return False
    eff = th.effects_at(h.ah) if _eff is None else _eff
    kh = h.kh
    for ep in eff.get(t, ()):
        ef, ev = ep.effect
        if ef != f:
            continue
        threatens = (ev != sv.value) if sv.positive else (ev == sv.value)
        if threatens and not _condition_known_false(ep, t, kh):
            return False
    return True


# ---------------------------------------------------------------------------
# The eight inference mechanisms.  Each ``_add_*`` returns candidate triples;
# the public wrappers merge them and enforce validity.
# ---------------------------------------------------------------------------

def _add_fwd(h, th, eff):
    n = h.now
    out = set()
    for f, v, t, pos in h.kh:
        if t + 1 <= n and inertial(f, SignedValue(v, pos), t, h, th, eff):
            out.add(Triple(f, v, t + 1, pos))
    return out


def _add_back(h, th, eff):
    out = set()
    for f, v, t1, pos in h.kh:
        t = t1 - 1
        if t >= 0 and inertial(f, SignedValue(v, not pos), t, h, th, eff):
            out.add(Triple(f, v, t, pos))
    return out


def _add_cause(h, th, eff):
    kh = h.kh
    out = set()
    for t, eps in eff.items():
        for ep in eps:
            if all((fc, vc, t, True) in kh for fc, vc in ep.conditions):
                out.add(Triple(*ep.effect, t + 1, True))
    return out


def _add_pd_pos(h, th, eff):
    kh = h.kh
    out = set()
    for t, eps in eff.items():
        for ep in eps:
            fe, ve = ep.effect
            if (fe, ve, t + 1, True) not in kh or (fe, ve, t, False) not in kh:
                continue
            if any(other is not ep and other.effect == ep.effect for other in eps):
                continue
            out.update(Triple(fc, vc, t, True) for fc, vc in ep.conditions)
    return out


def _add_pd_neg(h, th, eff):
    kh = h.kh
    out = set()
    for t, eps in eff.items():
        for ep in eps:
            fe, ve = ep.effect
            if (fe, ve, t + 1, False) not in kh:
                continue
            unknown = [c for c in ep.conditions if (c[0], c[1], t, True) not in kh]
            if len(unknown) == 1:
                out.add(Triple(*unknown[0], t, False))
            elif not unknown:
                # every condition held, yet the effect is known not to hold
                out.update(Triple(fc, vc, t, False) for fc, vc in ep.conditions)
    return out


def _add_ex_pos(h, th, eff):
    n = h.now
    negated = defaultdict(set)
    for f, v, t, pos in h.kh:
        if not pos:
            negated[f, t].add(v)
    out = set()
    for f, values in th.ranges.items():
        if len(values) == 1:
            out.update(Triple(f, values[0], t, True) for t in range(n + 1))
            continue
        for t in range(n + 1):
            neg = negated.get((f, t))
            if not neg or len(neg) < len(values) - 1:
                continue
            for v in values:
                if all(w in neg for w in values if w != v):
                    out.add(Triple(f, v, t, True))
    return out


def _add_ex_neg(h, th, eff):
    out = set()
    for f, v, t, pos in h.kh:
        if pos:
            out.update(Triple(f, w, t, False) for w in th.ranges[f] if w != v)
    return out


def _add_scl(h, th, eff):
    steps = defaultdict(set)
    for f, v, t, pos in h.kh:
        if pos:
            steps[f, v].add(t)
    out = set()
    for scl in th.scls:
        common = None
        for c in scl.conditions:
            s = steps.get(c)
            if not s:
                common = set()
                break
            common = set(s) if common is None else common & s
        for t in common or ():
            out.add(Triple(*scl.effect, t, True))
    return out


_ADDERS = {
    "fwd": _add_fwd,
    "back": _add_back,
    "cause": _add_cause,
    "pd_pos": _add_pd_pos,
    "pd_neg": _add_pd_neg,
    "ex_pos": _add_ex_pos,
    "ex_neg": _add_ex_neg,
    "scl": _add_scl,
}

IM_ORDER = tuple(_ADDERS)


def _check_valid_kh(kh, mechanism, new=None):
    """Raise InconsistencyDetected if ``kh`` violates functional validity.

    When ``new`` is given only those triples are checked against ``kh``.
    """
    pos = defaultdict(set)
    for f, v, t, p in kh:
        if p:
            pos[f, t].add(v)
    for tr in sorted(kh if new is None else new):
        f, v, t, p = tr
        if p:
            if (f, v, t, False) in kh:
                raise InconsistencyDetected(tr, Triple(f, v, t, False), mechanism)
            others = pos[f, t] - {v}
            if others:
                raise InconsistencyDetected(tr, Triple(f, min(others), t, True), mechanism)
        elif (f, v, t, True) in kh:
            raise InconsistencyDetected(tr, Triple(f, v, t, True), mechanism)


def _apply(name, h, th, eff=None):
    if eff is None:
        eff = th.effects_at(h.ah)
    new = _ADDERS[name](h, th, eff) - h.kh
    if not new:
        return h
    kh = h.kh | new
    _check_valid_kh(kh, name, new)
    return HState(h.ah, kh)


def fwd(h, th):
    """Forward inertia."""
    return _apply("fwd", h, th)


def back(h, th):
    """Backward inertia."""
    return _apply("back", h, th)


def cause(h, th):
    return _apply("cause", h, th)


def pd_pos(h, th):
    """Positive postdiction: an observed change reveals its effect's conditions."""
    return _apply("pd_pos", h, th)


def pd_neg(h, th):
    """Negative postdiction: a missing effect with all but one condition known
    reveals that the remaining condition did not hold."""
    return _apply("pd_neg", h, th)


def ex_pos(h, th):
    return _apply("ex_pos", h, th)


def ex_neg(h, th):
    return _apply("ex_neg", h, th)


def scl_conseq(h, th):
    """Static causal consequence at a single step."""
    return _apply("scl", h, th)


def eval_once(h, th, order=IM_ORDER):
    eff = th.effects_at(h.ah)
    for name in order:
        h = _apply(name, h, th, eff)
    return h


def evaluate(h, th, order=IM_ORDER):
    """Apply :func:`eval_once` until the knowledge history stops growing."""
    while True:
        nxt = eval_once(h, th, order)
        if len(nxt.kh) == len(h.kh):
            return nxt
        h = nxt


# ---------------------------------------------------------------------------
# Sensing and transitions
# ---------------------------------------------------------------------------

def sensed_fluent(actions, th):
    """The single fluent sensed by ``actions``, or None."""
    sensing = [(a, f) for a in sorted(actions) for f in th.senses.get(a, ())]
    if not sensing:
        return None
    if len(sensing) > 1:
        raise MultipleSensingActions(
            "only one fluent can be sensed per transition, got "
            + ", ".join(f"{a} senses {f}" for a, f in sensing))
    return sensing[0][1]


def sense(actions, h, th):
    """Possible sensing outcomes, one knowledge set per value not known to be false.

    Without a sensing action the single empty outcome is returned so every
    transition has at least one successor.
    """
    f = sensed_fluent(actions, th)
    if f is None:
        return [frozenset()]
    ts = h.now
    outcomes = [frozenset({knows(f, v, ts)}) for v in th.ranges[f]
                if (f, v, ts, False) not in h.kh]
    if not outcomes:
        raise AllOutcomesExcluded(f"every value of {f!r} is known not to hold at step {ts}")
    return outcomes


def executable(a, h, th):
    n = h.now
    return all((f, v, n, True) in h.kh for f, v in th.requires.get(a, ()))


def check_concurrency(actions, th):
    """Reject action sets applying two effect propositions with one effect."""
    seen = {}
    for a in sorted(actions):
        for ep in th.eps_by_action.get(a, ()):
            other = seen.setdefault(ep.effect, ep)
            if other is not ep:
                raise ConcurrentSimilarEPs(
                    f"{other.id} and {ep.id} both set {ep.effect[0]}={ep.effect[1]}")


class Successor(NamedTuple):
    executed: frozenset
    outcome: Optional[Triple]
    state: Optional[HState]
    error: Optional[InconsistencyDetected]

    @property
    def consistent(self):
        return self.error is None


def successors(actions, h, th):
    """Detailed transition: one record per sensing outcome.

    Inconsistent outcomes are reported through ``Successor.error`` rather
    than raised.
    """
    for a in actions:
        th.check_action(a)
    ex = frozenset(a for a in actions if executable(a, h, th))
    if not ex:
        try:
            return [Successor(ex, None, evaluate(h, th), None)]
        except InconsistencyDetected as err:
            return [Successor(ex, None, None, err)]
    check_concurrency(ex, th)
    outcomes = sense(ex, h, th)
    n = h.now
    ah = h.ah | {(a, n) for a in ex}
    out = []
    for k in outcomes:
        outcome = next(iter(k)) if k else None
        try:
            out.append(Successor(ex, outcome, evaluate(HState(ah, h.kh | k), th), None))
        except InconsistencyDetected as err:
            out.append(Successor(ex, outcome, None, err))
    return out


def transition(actions, h, th):
    """Successor h-states of executing ``actions`` in ``h``.

    Raises InconsistencyDetected for the first inconsistent successor.
    """
    result = []
    for s in successors(actions, h, th):
        if s.error is not None:
            raise s.error
        result.append(s.state)
    return result


# ---------------------------------------------------------------------------
# Validity and dump format
# ---------------------------------------------------------------------------

def is_valid(h, th):
    """Functional validity of the knowledge history and step bounds."""
    try:
        _check_valid_kh(h.kh, "check")
    except InconsistencyDetected:
        return False
    n = h.now
    return all(v in th.ranges.get(f, ()) and 0 <= t <= n for f, v, t, _ in h.kh)


def _knows_key(tr):
    op = "=" if tr.positive else "!="
    return (f"knows {tr.fluent}{op}{tr.value}", tr.step)


def dump_lines(h):
    lines = [f"occ {a} @{t}" for a, t in sorted(h.ah, key=lambda p: (p[1], p[0]))]
    lines += [str(tr) for tr in sorted(h.kh, key=_knows_key)]
    return lines


def dump_hstate(h):
    return "\n".join(dump_lines(h)) + "\n"


def state_variable_bound(th, h):
    """Fluents x largest range x number of time points up to ``now``."""
    n_v = max((len(v) for v in th.ranges.values()), default=0)
    return len(th.ranges) * n_v * (h.now + 1)
