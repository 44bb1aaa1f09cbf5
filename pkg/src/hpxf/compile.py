"""Compilation of static causal laws into additional effect propositions.

An effect proposition whose effect matches a condition of a static causal
law (the *trigger*) gives rise to a new effect proposition for the same
action: its conditions are the union of the law's and the source
proposition's conditions minus the trigger, its effect is the law's effect.
Repeating this until nothing new appears handles chained laws.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .domain import EffectProposition
from .errors import IterationBudgetExceeded

DEFAULT_CAP = 100_000


@dataclass(frozen=True)
class Provenance:
    source: str
    scl: str
    trigger: tuple


@dataclass
class CompiledEffectSet:
    eps: tuple
    provenance: dict = field(default_factory=dict)

    @property
    def generated(self):
        return tuple(ep for ep in self.eps if ep.id in self.provenance)

    def keys(self):
        return {ep.key for ep in self.eps}

    def for_action(self, action):
        return tuple(ep for ep in self.eps if ep.action == action)


def _derive(eps, scls, known):
    """Yield (new_ep, provenance) for every derivation not already in ``known``.

    ``known`` is updated in place so a derivation is reported once.
    """
    for ep in eps:
        for scl in scls:
            if ep.effect not in scl.conditions:
                continue
            conds = (scl.conditions | ep.conditions) - {ep.effect}
            new = EffectProposition(f"({ep.id},{scl.id})", ep.action, frozenset(conds), scl.effect)
            if new.key in known:
                continue
            known.add(new.key)
            yield new, Provenance(ep.id, scl.id, ep.effect)


def add_ep(eps, scls):
    """One derivation pass; returns the effect propositions not yet in ``eps``."""
    eps = list(eps)
    known = {ep.key for ep in eps}
    return [new for new, _ in _derive(eps, list(scls), known)]


def gen_ep(eps, scls, cap=DEFAULT_CAP):
    """Least fixpoint of :func:`add_ep`, with provenance for generated EPs.

    Raises IterationBudgetExceeded once more than ``cap`` propositions have
    been generated.
    """
    eps = list(eps)
    scls = list(scls)
    known = {ep.key for ep in eps}
    provenance = {}
    frontier = eps
    while frontier:
        fresh = []
        for new, prov in _derive(frontier, scls, known):
            fresh.append(new)
            provenance[new.id] = prov
            if len(provenance) > cap:
                raise IterationBudgetExceeded(
                    f"more than {cap} effect propositions generated from static causal laws")
        eps.extend(fresh)
        frontier = fresh
    return CompiledEffectSet(tuple(eps), provenance)
