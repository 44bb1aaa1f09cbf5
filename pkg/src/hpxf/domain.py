"""Reasoning domains: data types, the text format, grounding and validation.

A domain file is UTF-8 text; ``#`` starts a comment and newlines are
insignificant (``;`` may be used as a visual separator).  Declarations::

    sort room { bath, kit }
    fluent wcAt { bath, kit }          # or: fluent wcAt : room
    init wcAt = bath
    action drv {
        effect wcAt = kit if wcAt = bath
        senses pAt
        executable if wcAt = bath
    }
    scl pAt = bath if wcAt = bath, sitting = true
    goal weak ab_sit = true
    forall r in {bath, kit}: scl pAt = r if wcAt = r, sitting = true

``forall`` may prefix any declaration, including statements inside an
action body, and may be nested.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from typing import NamedTuple, Union

from .errors import ParseError, SchemaError

Pair = tuple  # (fluent, value)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

class ValueProposition(NamedTuple):
    fluent: str
    value: str


class KnowledgeProposition(NamedTuple):
    action: str
    fluent: str


@dataclass(frozen=True)
class EffectProposition:
    id: str
    action: str
    conditions: frozenset
    effect: Pair

    @property
    def key(self):
        """Identity used for deduplication: ids are deliberately excluded."""
        return (self.action, self.conditions, self.effect)


@dataclass(frozen=True)
class StaticCausalLaw:
    id: str
    conditions: frozenset
    effect: Pair


@dataclass(frozen=True)
class ExecutabilityCondition:
    action: str
    required: frozenset


@dataclass(frozen=True)
class GoalSet:
    strong: frozenset = frozenset()
    weak: frozenset = frozenset()


@dataclass(frozen=True)
class Domain:
    ranges: dict
    init: tuple = ()
    effects: tuple = ()
    scls: tuple = ()
    knowledge: tuple = ()
    executability: tuple = ()
    goals: GoalSet = GoalSet()
    actions: tuple = ()

    @property
    def fluents(self):
        return tuple(self.ranges)

    @property
    def fr(self):
        return frozenset((f, v) for f, vs in self.ranges.items() for v in vs)

    def action_set(self):
        """Actions mentioned by effects, knowledge or executability elements."""
        mentioned = {ep.action for ep in self.effects}
        mentioned |= {kp.action for kp in self.knowledge}
        mentioned |= {x.action for x in self.executability}
        return mentioned


# ---------------------------------------------------------------------------
# Tokenizer and AST
# ---------------------------------------------------------------------------

class Tok(NamedTuple):
    text: str
    line: int
    col: int


KEYWORDS = {
    "sort", "fluent", "init", "action", "effect", "if", "senses",
    "executable", "scl", "goal", "weak", "strong", "forall", "in",
}

_TOKEN_RE = re.compile(r"\s*(?:(#[^\n]*)|([A-Za-z_][A-Za-z0-9_]*)|(!=|[{}=,:;])|(\S))")


def tokenize(text):
    toks = []
    line_starts = [0] + [m.end() for m in re.finditer(r"\n", text)]
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        pos = m.end()
        comment, ident, punct, bad = m.groups()
        if comment is not None or (ident is None and punct is None and bad is None):
            continue
        start = m.start(m.lastindex)
        line = _bisect(line_starts, start)
        col = start - line_starts[line - 1] + 1
        if bad is not None:
            raise ParseError(f"unexpected character {bad!r}", line, col)
        toks.append(Tok(ident if ident is not None else punct, line, col))
    return toks


def _bisect(starts, offset):
    lo, hi = 0, len(starts)
    while lo < hi:
        mid = (lo + hi) // 2
        if starts[mid] <= offset:
            lo = mid + 1
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class PairNode:
    fluent: Tok
    value: Tok


@dataclass(frozen=True)
class SortDecl:
    name: Tok
    values: tuple


@dataclass(frozen=True)
class FluentDecl:
    name: Tok
    values: tuple = ()
    sort: Union[Tok, None] = None


@dataclass(frozen=True)
class InitDecl:
    pair: PairNode


@dataclass(frozen=True)
class EffectStmt:
    effect: PairNode
    conditions: tuple


@dataclass(frozen=True)
class SensesStmt:
    fluent: Tok


@dataclass(frozen=True)
class ExecStmt:
    required: tuple


@dataclass(frozen=True)
class ActionDecl:
    name: Tok
    body: tuple


@dataclass(frozen=True)
class SclDecl:
    effect: PairNode
    conditions: tuple
    at: Tok


@dataclass(frozen=True)
class GoalDecl:
    kind: str
    pairs: tuple


@dataclass(frozen=True)
class Schema:
    var: Tok
    values: tuple          # tuple of Tok, or empty when `sort` names a sort
    sort: Union[Tok, None]
    body: object


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else Tok("", 1, 1)
            raise ParseError("unexpected end of input", last.line, last.col)
        self.i += 1
        return tok

    def expect(self, text):
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def accept(self, text):
        tok = self.peek()
        if tok is not None and tok.text == text:
            self.i += 1
            return tok
        return None

    def ident(self, what="identifier"):
        tok = self.next()
        if not re.match(r"[A-Za-z_]", tok.text) or tok.text in KEYWORDS:
            raise ParseError(f"expected {what}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def skip_separators(self):
        while self.accept(";"):
            pass

    def ident_set(self):
        self.expect("{")
        vals = []
        if not self.accept("}"):
            vals.append(self.ident("value"))
            while self.accept(","):
                vals.append(self.ident("value"))
            self.expect("}")
        return tuple(vals)

    def pair(self):
        f = self.ident("fluent")
        self.expect("=")
        v = self.ident("value")
        return PairNode(f, v)

    def pair_list(self):
        pairs = [self.pair()]
        while self.accept(","):
            pairs.append(self.pair())
        return tuple(pairs)

    def program(self):
        decls = []
        self.skip_separators()
        while self.peek() is not None:
            decls.append(self.declaration(top=True))
            self.skip_separators()
        return decls

    def schema(self, top):
        var = self.ident("schema variable")
        self.expect("in")
        if self.peek() is not None and self.peek().text == "{":
            values, sort = self.ident_set(), None
        else:
            values, sort = (), self.ident("sort name")
        self.expect(":")
        body = self.declaration(top) if top else self.statement()
        return Schema(var, values, sort, body)

    def declaration(self, top=True):
        tok = self.next()
        kw = tok.text
        if kw == "forall":
            return self.schema(top=True)
        if kw == "sort":
            return SortDecl(self.ident("sort name"), self.ident_set())
        if kw == "fluent":
            name = self.ident("fluent")
            if self.accept(":"):
                return FluentDecl(name, (), self.ident("sort name"))
            return FluentDecl(name, self.ident_set())
        if kw == "init":
            return InitDecl(self.pair())
        if kw == "action":
            name = self.ident("action")
            self.expect("{")
            body = []
            self.skip_separators()
            while not self.accept("}"):
                body.append(self.statement())
                self.skip_separators()
            return ActionDecl(name, tuple(body))
        if kw == "scl":
            effect = self.pair()
            self.expect("if")
            return SclDecl(effect, self.pair_list(), tok)
        if kw == "goal":
            kind = self.next()
            if kind.text not in ("weak", "strong"):
                raise ParseError("goal kind must be 'weak' or 'strong'", kind.line, kind.col)
            return GoalDecl(kind.text, self.pair_list())
        raise ParseError(f"unexpected {kw!r}", tok.line, tok.col)

    def statement(self):
        tok = self.next()
        if tok.text == "forall":
            return self.schema(top=False)
        if tok.text == "effect":
            effect = self.pair()
            conds = self.pair_list() if self.accept("if") else ()
            return EffectStmt(effect, conds)
        if tok.text == "senses":
            return SensesStmt(self.ident("fluent"))
        if tok.text == "executable":
            self.expect("if")
            return ExecStmt(self.pair_list())
        raise ParseError(f"unexpected {tok.text!r} in action body", tok.line, tok.col)


def parse_ast(text):
    """Parse domain text into schematic (ungrounded) declarations."""
    return _Parser(tokenize(text)).program()


# ---------------------------------------------------------------------------
# Grounding
# ---------------------------------------------------------------------------

def _substitute(node, var, value):
    if isinstance(node, Tok):
        return node._replace(text=value) if node.text == var else node
    if isinstance(node, tuple):
        return tuple(_substitute(x, var, value) for x in node)
    if dataclasses.is_dataclass(node):
        if isinstance(node, Schema) and node.var.text == var:
            raise SchemaError(f"schema variable {var!r} shadows an outer variable",
                              node.var.line, node.var.col)
        changes = {f.name: _substitute(getattr(node, f.name), var, value)
                   for f in dataclasses.fields(node)}
        return dataclasses.replace(node, **changes)
    return node


def _mentions(node, var):
    if isinstance(node, Tok):
        return node.text == var
    if isinstance(node, tuple):
        return any(_mentions(x, var) for x in node)
    if dataclasses.is_dataclass(node):
        return any(_mentions(getattr(node, f.name), var) for f in dataclasses.fields(node))
    return False


def ground_schemas(decls, sorts=None):
    """Expand every ``forall`` schema into one declaration per binding.

    ``sorts`` maps sort names to value tuples; ``sort`` declarations found in
    ``decls`` are added to it.  The result contains no schemas, including
    inside action bodies.
    """
    sorts = dict(sorts or {})
    for d in decls:
        if isinstance(d, SortDecl):
            if d.name.text in sorts:
                raise ParseError(f"duplicate sort {d.name.text!r}", d.name.line, d.name.col)
            sorts[d.name.text] = tuple(v.text for v in d.values)

    out = []
    for d in decls:
        out.extend(_ground(d, sorts))
    return out


def _ground(node, sorts):
    if isinstance(node, Schema):
        if node.sort is not None:
            if node.sort.text not in sorts:
                raise SchemaError(f"schema variable {node.var.text!r} is bound to unknown sort "
                                  f"{node.sort.text!r}", node.sort.line, node.sort.col)
            values = sorts[node.sort.text]
        else:
            values = tuple(v.text for v in node.values)
        if not values:
            raise SchemaError(f"schema variable {node.var.text!r} ranges over an empty sort",
                              node.var.line, node.var.col)
        if not _mentions(node.body, node.var.text):
            raise SchemaError(f"schema variable {node.var.text!r} is not used",
                              node.var.line, node.var.col)
        result = []
        for value in values:
            result.extend(_ground(_substitute(node.body, node.var.text, value), sorts))
        return result
    if isinstance(node, ActionDecl):
        body = []
        for stmt in node.body:
            body.extend(_ground(stmt, sorts))
        return [dataclasses.replace(node, body=tuple(body))]
    return [node]


# ---------------------------------------------------------------------------
# Building a Domain from ground declarations
# ---------------------------------------------------------------------------

def parse_domain(text):
    """Parse, ground and assemble a Domain from domain-format text.

    Raises ParseError on syntax errors, duplicate declarations, and references
    to undeclared fluents.  Values outside a fluent's range are left for
    :func:`validate_domain` to report.
    """
    decls = ground_schemas(parse_ast(text))
    return _build(decls)


def _build(decls):
    sorts = {d.name.text: tuple(v.text for v in d.values)
             for d in decls if isinstance(d, SortDecl)}
    ranges = {}
    for d in decls:
        if not isinstance(d, FluentDecl):
            continue
        name = d.name
        if name.text in ranges:
            raise ParseError(f"duplicate fluent {name.text!r}", name.line, name.col)
        if d.sort is not None:
            if d.sort.text not in sorts:
                raise ParseError(f"unknown sort {d.sort.text!r}", d.sort.line, d.sort.col)
            values = sorts[d.sort.text]
        else:
            seen = set()
            for v in d.values:
                if v.text in seen:
                    raise ParseError(f"duplicate value {v.text!r} in range of {name.text!r}",
                                     v.line, v.col)
                seen.add(v.text)
            values = tuple(v.text for v in d.values)
        ranges[name.text] = values
    if not ranges:
        raise ParseError("no fluent declarations", 1, 1)

    def pair(p):
        if p.fluent.text not in ranges:
            raise ParseError(f"unknown fluent {p.fluent.text!r}", p.fluent.line, p.fluent.col)
        return (p.fluent.text, p.value.text)

    init, effects, scls, kps, excs, actions = [], [], [], [], [], []
    strong, weak = [], []
    for d in decls:
        if isinstance(d, InitDecl):
            init.append(ValueProposition(*pair(d.pair)))
        elif isinstance(d, SclDecl):
            scls.append(StaticCausalLaw(f"scl{len(scls) + 1}",
                                        frozenset(pair(c) for c in d.conditions),
                                        pair(d.effect)))
        elif isinstance(d, GoalDecl):
            (weak if d.kind == "weak" else strong).extend(pair(p) for p in d.pairs)
        elif isinstance(d, ActionDecl):
            a = d.name.text
            if a in actions:
                raise ParseError(f"duplicate action {a!r}", d.name.line, d.name.col)
            actions.append(a)
            required = []
            k = 0
            for stmt in d.body:
                if isinstance(stmt, EffectStmt):
                    k += 1
                    effects.append(EffectProposition(
                        f"ep_{a}_{k}", a,
                        frozenset(pair(c) for c in stmt.conditions), pair(stmt.effect)))
                elif isinstance(stmt, SensesStmt):
                    if stmt.fluent.text not in ranges:
                        raise ParseError(f"unknown fluent {stmt.fluent.text!r}",
                                         stmt.fluent.line, stmt.fluent.col)
                    kp = KnowledgeProposition(a, stmt.fluent.text)
                    if kp not in kps:
                        kps.append(kp)
                elif isinstance(stmt, ExecStmt):
                    required.extend(pair(p) for p in stmt.required)
            if required:
                excs.append(ExecutabilityCondition(a, frozenset(required)))

    return Domain(
        ranges=ranges,
        init=tuple(init),
        effects=tuple(effects),
        scls=tuple(scls),
        knowledge=tuple(kps),
        executability=tuple(excs),
        goals=GoalSet(frozenset(strong), frozenset(weak)),
        actions=tuple(actions),
    )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Finding:
    severity: str      # "error" or "warning"
    location: str
    message: str

    def __str__(self):
        return f"{self.severity}: {self.location}: {self.message}"


@dataclass
class ValidationReport:
    findings: list = field(default_factory=list)

    @property
    def errors(self):
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self):
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self):
        return not self.errors

    def add(self, severity, location, message):
        self.findings.append(Finding(severity, location, message))


def _pair_str(p):
    return f"{p[0]}={p[1]}"


def validate_domain(d):
    """Check every domain invariant; findings are returned, never raised."""
    report = ValidationReport()
    ranges = d.ranges

    for f, vs in ranges.items():
        if not vs:
            report.add("error", f"fluent {f}", "range is empty")
        if len(set(vs)) != len(vs):
            report.add("error", f"fluent {f}", "range contains duplicate values")

    def check_pairs(pairs, where):
        for p in sorted(pairs):
            if p[0] not in ranges:
                report.add("error", where, f"unknown fluent {p[0]!r}")
            elif p[1] not in ranges[p[0]]:
                report.add("error", where, f"{p[1]!r} is not in the range of {p[0]!r}")

    def check_functional(pairs, where):
        seen = {}
        for f, v in sorted(pairs):
            if f in seen and seen[f] != v:
                report.add("error", where, f"conditions require {f}={seen[f]} and {f}={v}")
            seen.setdefault(f, v)

    seen_vp = {}
    for vp in d.init:
        where = f"init {_pair_str(vp)}"
        check_pairs([tuple(vp)], where)
        if vp.fluent in seen_vp and seen_vp[vp.fluent] != vp.value:
            report.add("error", where,
                       f"{vp.fluent} is already initialised to {seen_vp[vp.fluent]}")
        seen_vp.setdefault(vp.fluent, vp.value)

    ids = set()
    for ep in d.effects:
        where = f"effect {ep.id}"
        if ep.id in ids:
            report.add("error", where, "duplicate effect proposition id")
        ids.add(ep.id)
        check_pairs(ep.conditions | {ep.effect}, where)
        check_functional(ep.conditions, where)

    for scl in d.scls:
        where = f"scl {scl.id}"
        if scl.id in ids:
            report.add("error", where, "duplicate static causal law id")
        ids.add(scl.id)
        check_pairs(scl.conditions | {scl.effect}, where)
        check_functional(scl.conditions, where)
        if not scl.conditions:
            report.add("error", where, "static causal law has no conditions")
        if scl.effect[0] in {f for f, _ in scl.conditions}:
            report.add("error", where,
                       f"effect fluent {scl.effect[0]!r} appears in its own conditions")

    sensed = {}
    for kp in d.knowledge:
        where = f"action {kp.action}"
        if kp.fluent not in ranges:
            report.add("error", where, f"senses unknown fluent {kp.fluent!r}")
        sensed.setdefault(kp.action, []).append(kp.fluent)
    for a, fs in sensed.items():
        if len(fs) > 1:
            report.add("error", f"action {a}",
                       f"senses {len(fs)} fluents; at most one fluent can be sensed per step")

    for x in d.executability:
        where = f"action {x.action} executable"
        check_pairs(x.required, where)
        check_functional(x.required, where)

    check_pairs(d.goals.weak, "goal weak")
    check_pairs(d.goals.strong, "goal strong")

    declared = set(d.actions)
    for a in sorted(d.action_set() - declared):
        report.add("error", f"action {a}", "referenced but not declared")
    return report


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _pairs_str(pairs):
    return ", ".join(f"{f} = {v}" for f, v in sorted(pairs))


def print_domain(d):
    """Render a Domain in the text format; ``parse_domain`` inverts it."""
    lines = []
    for f, vs in d.ranges.items():
        lines.append(f"fluent {f} {{ {', '.join(vs)} }}")
    if d.init:
        lines.append("")
        lines.extend(f"init {vp.fluent} = {vp.value}" for vp in d.init)
    exc = {}
    for x in d.executability:
        exc.setdefault(x.action, set()).update(x.required)
    for a in d.actions:
        lines.append("")
        lines.append(f"action {a} {{")
        for ep in d.effects:
            if ep.action != a:
                continue
            cond = f" if {_pairs_str(ep.conditions)}" if ep.conditions else ""
            lines.append(f"    effect {ep.effect[0]} = {ep.effect[1]}{cond}")
        for kp in d.knowledge:
            if kp.action == a:
                lines.append(f"    senses {kp.fluent}")
        if exc.get(a):
            lines.append(f"    executable if {_pairs_str(exc[a])}")
        lines.append("}")
    if d.scls:
        lines.append("")
        for scl in d.scls:
            lines.append(f"scl {scl.effect[0]} = {scl.effect[1]} if {_pairs_str(scl.conditions)}")
    if d.goals.weak or d.goals.strong:
        lines.append("")
        for kind, pairs in (("weak", d.goals.weak), ("strong", d.goals.strong)):
            for f, v in sorted(pairs):
                lines.append(f"goal {kind} {f} = {v}")
    return "\n".join(lines) + "\n"
