"""Seeded random domains and plans for property tests, demos and benchmarks."""

from __future__ import annotations

import random

from .domain import (
    Domain,
    EffectProposition,
    ExecutabilityCondition,
    GoalSet,
    KnowledgeProposition,
    StaticCausalLaw,
    ValueProposition,
)
from .planner import ConditionalPlan


def _pairs(rng, ranges, k, exclude=()):
    fluents = [f for f in ranges if f not in exclude]
    chosen = rng.sample(fluents, min(k, len(fluents)))
    return frozenset((f, rng.choice(ranges[f])) for f in chosen)


def random_domain(rng, max_fluents=4, max_range=3, max_actions=3, max_scls=2,
                  p_init=0.6, p_exec=0.15, p_goal=0.5):
    """A small valid domain.  ``rng`` is a ``random.Random``."""
    n_f = rng.randint(1, max_fluents)
    ranges = {f"f{i}": tuple(f"v{j}" for j in range(rng.randint(1, max_range)))
              for i in range(n_f)}
    init = tuple(ValueProposition(f, rng.choice(vals))
                 for f, vals in ranges.items() if rng.random() < p_init)

    actions = tuple(f"a{i}" for i in range(rng.randint(1, max_actions)))
    effects, knowledge, execs = [], [], []
    for a in actions:
        used = set()
        for k in range(rng.randint(0, 2)):
            f = rng.choice(list(ranges))
            eff = (f, rng.choice(ranges[f]))
            if eff in used:
                continue
            used.add(eff)
            conds = _pairs(rng, ranges, rng.randint(0, 2))
            effects.append(EffectProposition(f"ep_{a}_{k + 1}", a, conds, eff))
        if rng.random() < 0.5:
            knowledge.append(KnowledgeProposition(a, rng.choice(list(ranges))))
        if rng.random() < p_exec:
            execs.append(ExecutabilityCondition(a, _pairs(rng, ranges, 1)))

    scls = []
    if n_f > 1:
        for i in range(rng.randint(0, max_scls)):
            ef = rng.choice(list(ranges))
            conds = _pairs(rng, ranges, rng.randint(1, 2), exclude=(ef,))
            scls.append(StaticCausalLaw(f"scl{i + 1}", conds, (ef, rng.choice(ranges[ef]))))

    weak = frozenset(_pairs(rng, ranges, 1)) if rng.random() < p_goal else frozenset()
    strong = frozenset(_pairs(rng, ranges, 1)) if rng.random() < p_goal / 2 else frozenset()
    return Domain(ranges=ranges, init=init, effects=tuple(effects), scls=tuple(scls),
                  knowledge=tuple(knowledge), executability=tuple(execs),
                  goals=GoalSet(strong, weak), actions=actions)


def random_plan(rng, domain, depth, p_branch=0.7, p_concurrent=0.0):
    """A random conditional plan of at most ``depth`` steps."""
    senses = {kp.action: kp.fluent for kp in domain.knowledge}
    actions = list(domain.actions)
    steps = []
    for i in range(depth):
        if rng.random() < p_concurrent and len(actions) > 1:
            step = frozenset(rng.sample(actions, 2))
        else:
            step = frozenset([rng.choice(actions)])
        steps.append(step)
        sensed = [senses[a] for a in step if a in senses]
        if len(sensed) == 1 and i < depth - 1 and rng.random() < p_branch:
            f = sensed[0]
            arms = []
            for v in domain.ranges[f]:
                sub = random_plan(rng, domain, depth - i - 1, p_branch, p_concurrent)
                if sub:
                    arms.append((f, v, sub))
            return ConditionalPlan(tuple(steps), tuple(arms))
    return ConditionalPlan(tuple(steps))


def random_cases(seed, count, **kw):
    """Yield ``count`` reproducible (domain, plan) pairs."""
    rng = random.Random(seed)
    horizon = kw.pop("max_horizon", 4)
    for _ in range(count):
        d = random_domain(rng, **kw)
        yield d, random_plan(rng, d, rng.randint(0, horizon))


def scaling_domain(n_fluents, range_size=3):
    """A chain-structured domain whose size grows linearly with ``n_fluents``.

    Action ``a<i>`` moves fluent ``f<i>`` to the next value when ``f<i-1>``
    has its first value; every fourth fluent is tied to its predecessor by a
    static causal law and one action senses the last fluent.
    """
    vals = tuple(f"v{j}" for j in range(range_size))
    ranges = {f"f{i}": vals for i in range(n_fluents)}
    init = tuple(ValueProposition(f"f{i}", vals[0]) for i in range(0, n_fluents, 2))
    effects, scls = [], []
    for i in range(n_fluents):
        conds = frozenset() if i == 0 else frozenset({(f"f{i - 1}", vals[0])})
        for j in range(range_size):
            c = conds | {(f"f{i}", vals[j])}
            if len(c) == len({f for f, _ in c}):
                effects.append(EffectProposition(
                    f"ep_a{i}_{j + 1}", f"a{i}", frozenset(c), (f"f{i}", vals[(j + 1) % range_size])))
        if i % 4 == 3:
            scls.append(StaticCausalLaw(f"scl{i}", frozenset({(f"f{i - 1}", vals[1])}),
                                        (f"f{i}", vals[1])))
    actions = tuple(f"a{i}" for i in range(n_fluents)) + ("look",)
    knowledge = (KnowledgeProposition("look", f"f{n_fluents - 1}"),)
    return Domain(ranges=ranges, init=init, effects=tuple(effects), scls=tuple(scls),
                  knowledge=knowledge, executability=(), goals=GoalSet(frozenset(), frozenset()),
                  actions=actions)


def scaling_plan(n_fluents, horizon=5):
    steps = [frozenset([f"a{(3 * k) % n_fluents}"]) for k in range(horizon - 1)]
    return ConditionalPlan(tuple(steps) + (frozenset(["look"]),))
