"""Answer-set-program encoding of a domain.

The program has two parts.  The *world* part is a set of facts (plus one
integrity constraint per executability requirement) describing the domain.
The *foundational* part is domain independent: inertia, causation,
postdiction, exclusion, sensing with branching, static causal laws, goal
verification and plan generation.  Output is plain text in the input syntax
of common grounders; nothing here runs a solver.

Repairs to the printed encoding are listed in EMITTER-NOTES.md.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .planner import PlanSearchConfig

_CONST_RE = re.compile(r"[a-z][A-Za-z0-9_']*\Z")

# Predicates the emitted program may mention.
VOCABULARY = frozenset("""
    possVal knows knowsNot hasEP hasEff hasCond sclHasEff sclHasCond hasKP occ
    apply kMaySet kInertial kCause kPosPost kNotNegPost kPosEx kNotNegEx
    numKnownCond hasNumCond numKNF numPossVal sclNumKnownCond sclNumCond sRes
    sNextBr uBr wGoal sGoal notWG notSG notGoal allWGAchieved act s br
""".split())


def term(name):
    """A domain token as an ASP constant, quoted when it is not a valid one."""
    if _CONST_RE.match(name) and name not in ("not",):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _fact(pred, *args):
    return f"{pred}({','.join(term(a) for a in args)})."


@dataclass(frozen=True)
class ProgramText:
    world_part: str
    foundational_part: str
    constants: tuple      # (maxS, maxB)

    @property
    def text(self):
        return self.world_part + "\n" + self.foundational_part

    def __str__(self):
        return self.text


def emit_world(domain):
    d = domain
    out = ["% fluent ranges"]
    for f, vals in d.ranges.items():
        out.extend(_fact("possVal", f, v) for v in vals)

    out.append("% initial knowledge")
    out.extend(f"knows({term(vp.fluent)},{term(vp.value)},0,0,0)." for vp in d.init)

    out.append("% actions and effect propositions")
    for a in sorted(d.action_set(), key=_action_order(d)):
        out.append(_fact("act", a))
    for ep in d.effects:
        out.append(_fact("hasEP", ep.action, ep.id))
        out.append(_fact("hasEff", ep.id, *ep.effect))
        out.extend(_fact("hasCond", ep.id, f, v) for f, v in sorted(ep.conditions))

    out.append("% static causal laws")
    for scl in d.scls:
        out.append(_fact("sclHasEff", scl.id, *scl.effect))
        out.extend(_fact("sclHasCond", scl.id, f, v) for f, v in sorted(scl.conditions))

    out.append("% knowledge propositions")
    out.extend(_fact("hasKP", kp.action, kp.fluent) for kp in d.knowledge)

    out.append("% executability conditions")
    for x in d.executability:
        for f, v in sorted(x.required):
            out.append(f":- occ({term(x.action)},N,B), not knows({term(f)},{term(v)},N,N,B).")

    out.append("% goals")
    out.extend(_fact("wGoal", f, v) for f, v in sorted(d.goals.weak))
    out.extend(_fact("sGoal", f, v) for f, v in sorted(d.goals.strong))
    return "\n".join(out) + "\n"


def _action_order(d):
    declared = {a: i for i, a in enumerate(d.actions)}
    return lambda a: (declared.get(a, len(declared)), a)


_FOUNDATIONAL = """\
s(0..{maxS}). br(0..{maxB}).

% concurrency
apply(EP,N,N,B) :- hasEP(A,EP), occ(A,N,B).
:- apply(EP1,T,N,B), hasEff(EP1,F,V), apply(EP2,T,N,B), hasEff(EP2,F,V), EP1 != EP2, possVal(F,V).
apply(EP,T,N+1,B) :- apply(EP,T,N,B), N < {maxS}.

% inertia
kMaySet(F,V,T,N,B) :- apply(EP,T,N,B), hasEff(EP,F,V).
kInertial(F,neg(V),T,N,B) :- not kMaySet(F,V,T,N,B), uBr(N,B), s(T), possVal(F,V).
kInertial(F,neg(V),T,N,B) :- apply(EP,T,N,B), hasEff(EP,F,V), hasCond(EP,F1,V1), knows(F1,V2,T,N,B), V1 != V2, s(T).
kInertial(F,V,T,N,B) :- NV = #count{{ V1 : kInertial(F,neg(V1),T,N,B), possVal(F,V1), V1 != V }}, uBr(N,B), s(T), numPossVal(F,NV+1), possVal(F,V).
knows(F,V,T,N,B) :- knows(F,V,T-1,N,B), kInertial(F,V,T-1,N,B), T <= N, s(T), possVal(F,V).
knows(F,V,T,N,B) :- knows(F,V,T+1,N,B), kInertial(F,neg(V),T,N,B), T < N, possVal(F,V).
knowsNot(F,V,T,N,B) :- knowsNot(F,V,T-1,N,B), kInertial(F,neg(V),T-1,N,B), T <= N, s(T), possVal(F,V).
knowsNot(F,V,T,N,B) :- knowsNot(F,V,T+1,N,B), kInertial(F,V,T,N,B), T < N, possVal(F,V).
knows(F,V,T,N,B) :- knows(F,V,T,N-1,B), s(N).
knowsNot(F,V,T,N,B) :- knowsNot(F,V,T,N-1,B), s(N).

% causation and postdiction
numKnownCond(EP,C,T,N,B) :- C = #count{{ F,V : knows(F,V,T,N,B), hasCond(EP,F,V) }}, uBr(N,B), apply(EP,T,N,B).
hasNumCond(EP,C) :- C = #count{{ F,V : hasCond(EP,F,V) }}, hasEff(EP,_,_).
kCause(F,V,T+1,N,B) :- apply(EP,T,N,B), numKnownCond(EP,C,T,N,B), hasNumCond(EP,C), hasEff(EP,F,V), uBr(N,B), N > T.
kPosPost(F,V,T,N,B) :- apply(EP,T,N,B), uBr(N,B), hasCond(EP,F,V), hasEff(EP,F1,V1), knows(F1,V1,T+1,N,B), knowsNot(F1,V1,T,N,B), not knowsNot(F,V,T,N,B), N > T.
kNotNegPost(F,V,T,N,B) :- apply(EP,T,N,B), hasEff(EP,F1,V1), knowsNot(F1,V1,T+1,N,B), uBr(N,B), N > T, hasCond(EP,F,V), hasNumCond(EP,C+1), numKnownCond(EP,C,T,N,B), not knows(F,V,T,N,B).
knows(F,V,T,N,B) :- kCause(F,V,T,N,B).
knows(F,V,T,N,B) :- kPosPost(F,V,T,N,B).
knowsNot(F,V,T,N,B) :- kNotNegPost(F,V,T,N,B).

% knowledge by exclusion
numKNF(F,KN,T,N,B) :- KN = #count{{ V : knowsNot(F,V,T,N,B), possVal(F,V) }}, uBr(N,B), s(T), T <= N, possVal(F,_).
numPossVal(F,NV) :- NV = #count{{ V : possVal(F,V) }}, possVal(F,_).
kPosEx(F,V,T,N,B) :- numKNF(F,KN,T,N,B), numPossVal(F,KN+1), not knowsNot(F,V,T,N,B), possVal(F,V).
kNotNegEx(F,V,T,N,B) :- knows(F,V1,T,N,B), V != V1, possVal(F,V1), possVal(F,V).
knows(F,V,T,N,B) :- kPosEx(F,V,T,N,B).
knowsNot(F,V,T,N,B) :- kNotNegEx(F,V,T,N,B).

% sensing and branching
uBr(0,0).
sNextBr(N,B1) :- sRes(_,_,N,B1,_).
uBr(N,B) :- uBr(N-1,B), not sNextBr(N-1,B), s(N).
1 {{ sRes(F,V,N,B1,B2) : br(B2) }} 1 :- occ(A,N,B1), hasKP(A,F), s(N), possVal(F,V), not knowsNot(F,V,N,N,B1).
:- br(B1), br(B2), s(N), 2 #count{{ F,V : sRes(F,V,N,B1,B2) }}.
:- sRes(F,V,N,B1,B2), uBr(N,B2), B1 != B2.
:- sRes(F,V,N,BP1,BC), sRes(F1,V1,N,BP2,BC), BP1 != BP2.
:- occ(A,N,B), hasKP(A,F), s(N), #count{{ V : sRes(F,V,N,B,B) }} = 0.
uBr(N,B2) :- sRes(F,V,N-1,B1,B2), s(N).
knows(F,V,N-1,N,B2) :- sRes(F,V,N-1,B1,B2), s(N).
:- br(B), s(N), 2 #count{{ A : occ(A,N,B), hasKP(A,_) }}.
knows(F,V,T,N,B2) :- sRes(_,_,N-1,B1,B2), knows(F,V,T,N-1,B1), N >= T, s(N).
knowsNot(F,V,T,N,B2) :- sRes(_,_,N-1,B1,B2), knowsNot(F,V,T,N-1,B1), N >= T, s(N).
apply(EP,T,N,B2) :- sRes(_,_,N,B1,B2), apply(EP,T,N,B1), N >= T, s(N).

% static causal laws
hasEP(A,(EP,SCL)) :- hasEP(A,EP), hasEff(EP,FT,VT), sclHasCond(SCL,FT,VT).
hasEff((EP,SCL),FE,VE) :- hasEP(A,EP), hasEff(EP,FT,VT), sclHasCond(SCL,FT,VT), sclHasEff(SCL,FE,VE).
hasCond((EP,SCL),FC,VC) :- hasEff(EP,FT,VT), hasCond(EP,FC,VC), sclHasCond(SCL,FT,VT).
hasCond((EP,SCL),FC,VC) :- hasEff(EP,FT,VT), sclHasCond(SCL,FC,VC), sclHasCond(SCL,FT,VT), (FT,VT) != (FC,VC).
sclNumKnownCond(SCL,C,T,N,B) :- C = #count{{ F,V : knows(F,V,T,N,B), sclHasCond(SCL,F,V) }}, uBr(N,B), s(T), sclHasEff(SCL,_,_), T <= N.
sclNumCond(SCL,C) :- C = #count{{ F,V : sclHasCond(SCL,F,V) }}, sclHasEff(SCL,_,_).
knows(F,V,T,N,B) :- sclHasEff(SCL,F,V), sclNumKnownCond(SCL,C,T,N,B), sclNumCond(SCL,C).

% plan verification
notWG(N,B) :- wGoal(F,V), uBr(N,B), not knows(F,V,N,N,B), possVal(F,V).
allWGAchieved(N) :- not notWG(N,B), uBr(N,B).
:- not allWGAchieved({maxS}).
notSG(N,B) :- sGoal(F,V), uBr(N,B), not knows(F,V,N,N,B), possVal(F,V).
:- notSG({maxS},B), uBr({maxS},B).
notGoal(N,B) :- notWG(N,B).
notGoal(N,B) :- notSG(N,B).

% plan generation ({mode})
{choice}
"""

_CHOICE = {
    "sequential": "1 {{ occ(A,N,B) : act(A) }} 1 :- uBr(N,B), notGoal(N,B), N < {maxS}.",
    "concurrent": "1 {{ occ(A,N,B) : act(A) }} :- uBr(N,B), notGoal(N,B), N < {maxS}.",
}


def emit_foundational(max_steps, max_branches, mode="sequential"):
    """Domain-independent rules with the horizon and branch constants filled in."""
    if mode not in _CHOICE:
        raise ValueError(f"unknown planning mode {mode!r}")
    choice = _CHOICE[mode].format(maxS=max_steps)
    return _FOUNDATIONAL.format(maxS=max_steps, maxB=max_branches, mode=mode, choice=choice)


def emit_lp(domain, cfg=None):
    cfg = cfg or PlanSearchConfig()
    return ProgramText(emit_world(domain),
                       emit_foundational(cfg.max_steps, cfg.max_branches, cfg.mode),
                       (cfg.max_steps, cfg.max_branches))


def predicates(text):
    """Names of all predicates appearing in ``text`` (comments ignored)."""
    body = re.sub(r"%[^\n]*", "", text)
    body = re.sub(r'"(?:[^"\\]|\\.)*"', "", body)
    names = set(re.findall(r"(?<![A-Za-z0-9_#])([a-z][A-Za-z0-9_]*)\s*\(", body))
    return names - {"neg"}
