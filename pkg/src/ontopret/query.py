"""Conjunctive graph-pattern queries and the canned competency questions."""

from __future__ import annotations

import json
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from decimal import Decimal
from statistics import mean
from typing import Optional, Union

from .errors import MissingScenarioData, NonNumericValue, ParseError, UnboundFilterVariable
from .interpret import compare
from .kb import (
    DEFAULT_PREFIXES,
    OP,
    RDF_TYPE,
    DataProp,
    Iri,
    KnowledgeBase,
    Literal,
    ObjectProp,
    compact_iri,
    term_key,
)
from .schema import task_chain
from .turtle import Token, _XSD_TYPES, tokenize


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self):
        return f"?{self.name}"


Term = Union[Iri, Var, Literal]


@dataclass(frozen=True)
class Filter:
    var: Var
    op: str
    value: object  # a term, or a tuple of terms for "in"

    def test(self, bound) -> bool:
        if self.op == "in":
            return bound in self.value
        if isinstance(bound, Literal) and isinstance(self.value, Literal):
            return compare(bound, self.op, self.value)
        if self.op in ("=", "=="):
            return bound == self.value
        if self.op in ("!=", "≠"):
            return bound != self.value
        return False


@dataclass(frozen=True)
class Pattern:
    triples: tuple = ()
    filters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(tuple(t) for t in self.triples))
        object.__setattr__(self, "filters", tuple(self.filters))
        for s, p, o in self.triples:
            if not isinstance(p, Iri):
                raise TypeError(f"predicate must be an IRI, got {p!r}")
        bound = self.variables()
        for f in self.filters:
            if f.var not in bound:
                raise UnboundFilterVariable(f"filter variable {f.var} does not occur in any triple")

    def variables(self) -> list:
        out = []
        for triple in self.triples:
            for t in triple:
                if isinstance(t, Var) and t not in out:
                    out.append(t)
        return out


@dataclass
class ResultSet:
    columns: list
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def bindings(self) -> list:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def to_tsv(self, prefixes=None) -> str:
        prefixes = DEFAULT_PREFIXES if prefixes is None else prefixes
        lines = ["\t".join(self.columns)]
        for row in self.rows:
            lines.append("\t".join(render_term(v, prefixes) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self, prefixes=None) -> str:
        prefixes = DEFAULT_PREFIXES if prefixes is None else prefixes
        rows = [{c: render_term(v, prefixes) for c, v in zip(self.columns, row)} for row in self.rows]
        return json.dumps(rows, indent=2, ensure_ascii=False) + "\n"

    def to_dict(self, prefixes=None) -> dict:
        prefixes = DEFAULT_PREFIXES if prefixes is None else prefixes
        return {
            "columns": list(self.columns),
            "rows": [[render_term(v, prefixes) for v in row] for row in self.rows],
        }


def render_term(term, prefixes) -> str:
    if isinstance(term, Iri):
        return compact_iri(term, prefixes)
    if isinstance(term, Literal):
        return term.lexical
    return str(term)


def _row_key(row):
    return tuple(term_key(v) for v in row)


def _make_result(columns, rows) -> ResultSet:
    unique = sorted(set(rows), key=_row_key)
    return ResultSet(columns=list(columns), rows=unique)


# ---------------------------------------------------------------- evaluation


def _substitute(term, binding):
    if isinstance(term, Var):
        return binding.get(term, term)
    return term


def _matches(kb, triple, binding, mode):
    """Yield (s, o) pairs of stored facts matching ``triple`` under ``binding``."""
    s, p, o = (_substitute(t, binding) for t in triple)
    s_free = isinstance(s, Var)
    o_free = isinstance(o, Var)
    if not s_free and not isinstance(s, Iri):
        return
    if p == RDF_TYPE:
        if isinstance(o, Literal):
            return
        if not s_free:
            for c in kb.types(s, mode):
                if o_free or o == c:
                    yield s, c
        elif not o_free:
            for x in kb.individuals_of(o, mode):
                yield x, o
        else:
            for x in kb.individuals():
                for c in kb.types(x, mode):
                    yield x, c
        return
    if not s_free:
        facts = kb.about(s)
    elif isinstance(o, Iri):
        facts = kb.incoming(o)
    else:
        facts = kb.with_property(p)
    for a in facts:
        if not isinstance(a, (ObjectProp, DataProp)) or a.property != p:
            continue
        obj = a.object if isinstance(a, ObjectProp) else a.value
        if (s_free or a.subject == s) and (o_free or obj == o):
            yield a.subject, obj


def _boundness(triple, binding):
    return sum(1 for t in (triple[0], triple[2]) if not isinstance(t, Var) or t in binding)


def select(kb: KnowledgeBase, pattern: Pattern, asserted_only: bool = False) -> ResultSet:
    """All bindings satisfying every triple and filter.

    Class-membership triples use the inferred view (subclass closure) unless
    ``asserted_only`` is set.
    """
    mode = "direct" if asserted_only else "inferred"
    columns = pattern.variables()
    rows = []

    def solve(remaining, binding):
        if not remaining:
            if all(f.test(binding[f.var]) for f in pattern.filters):
                rows.append(tuple(binding[v] for v in columns))
            return
        # most-bound triple first
        idx = max(range(len(remaining)), key=lambda i: (_boundness(remaining[i], binding), -i))
        triple = remaining[idx]
        rest = remaining[:idx] + remaining[idx + 1:]
        s, _, o = triple
        for sv, ov in _matches(kb, triple, binding, mode):
            new = dict(binding)
            ok = True
            for var, val in ((s, sv), (o, ov)):
                if isinstance(var, Var):
                    if var in new and new[var] != val:
                        ok = False
                        break
                    new[var] = val
            if ok:
                solve(rest, new)

    solve(list(pattern.triples), {})
    return _make_result([v.name for v in columns], rows)


# ---------------------------------------------------------------- text syntax

_FILTER_RE = re.compile(r"^\s*FILTER\s*\(\s*[?$](\w+)\s*(<=|>=|!=|=|<|>|IN\b|in\b)\s*(.*)\)\s*\.?\s*$")


def _term_from_tokens(tokens, prefixes, line):
    """Single term from a token list: IRI, prefixed name, variable or literal."""
    if not tokens:
        raise ParseError(line, 1, "missing term")
    t = tokens[0]
    if t.kind == "VAR":
        return Var(t.value), tokens[1:]
    if t.kind in ("IRIREF", "PNAME"):
        return _resolve(t, prefixes), tokens[1:]
    if t.kind == "a":
        return RDF_TYPE, tokens[1:]
    if t.kind == "STRING":
        if len(tokens) > 2 and tokens[1].kind == "DTYPE":
            dt = _resolve(tokens[2], prefixes)
            kind = _XSD_TYPES.get(dt.value)
            if kind is None:
                raise ParseError(t.line, t.column, f"unsupported datatype {dt.value}")
            return Literal(t.value, kind), tokens[3:]
        return Literal(t.value), tokens[1:]
    if t.kind == "INTEGER":
        return Literal(t.text, "integer"), tokens[1:]
    if t.kind == "DECIMAL":
        return Literal.decimal(t.text), tokens[1:]
    if t.kind in ("true", "false"):
        return Literal(t.kind, "boolean"), tokens[1:]
    raise ParseError(t.line, t.column, f"unexpected {t.text!r}", expected="term")


def _resolve(t: Token, prefixes) -> Iri:
    if t.kind == "IRIREF":
        return Iri(t.value)
    if t.kind != "PNAME":
        raise ParseError(t.line, t.column, f"unexpected {t.text!r}", expected="IRI")
    prefix, local = t.value
    if prefix not in prefixes:
        raise ParseError(t.line, t.column, f"undeclared prefix {prefix!r}")
    return Iri(prefixes[prefix] + local)


def _relocate(tokens, line):
    return [Token(t.kind, t.text, line, t.column, t.value) for t in tokens]


def parse_pattern(text: str, prefixes=None) -> Pattern:
    """Parse ``?s <p> <o> .`` lines, ``@prefix`` lines and ``FILTER(?v op value)`` lines.

    ``op`` is one of ``= != < > <= >=`` or ``IN`` followed by a parenthesised,
    comma-separated list of terms.
    """
    prefixes = dict(DEFAULT_PREFIXES if prefixes is None else prefixes)
    triples, filters = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(" #", 1)[0].strip() if not raw.strip().startswith("#") else ""
        if not line:
            continue
        m = _FILTER_RE.match(line)
        if m:
            var, op, rest = Var(m.group(1)), m.group(2).lower(), m.group(3).strip()
            toks = _relocate(tokenize(rest, allow_vars=True)[:-1], lineno)
            if op == "in":
                if not toks or toks[0].text != "(" or toks[-1].text != ")":
                    raise ParseError(lineno, 1, "IN needs a parenthesised list")
                inner = toks[1:-1]
                values = []
                while inner:
                    term, inner = _term_from_tokens(inner, prefixes, lineno)
                    values.append(term)
                    if inner and inner[0].text == ",":
                        inner = inner[1:]
                filters.append(Filter(var, "in", tuple(values)))
            else:
                term, left = _term_from_tokens(toks, prefixes, lineno)
                if left:
                    raise ParseError(lineno, left[0].column, f"unexpected {left[0].text!r}")
                filters.append(Filter(var, op, term))
            continue
        toks = _relocate(tokenize(line, allow_vars=True)[:-1], lineno)
        if toks and toks[0].kind == "PREFIX":
            if len(toks) < 3 or toks[1].kind != "PNAME" or toks[2].kind != "IRIREF":
                raise ParseError(lineno, 1, "malformed @prefix line")
            prefixes[toks[1].value[0]] = toks[2].value
            continue
        if toks and toks[-1].text == ".":
            toks = toks[:-1]
        s, toks = _term_from_tokens(toks, prefixes, lineno)
        p, toks = _term_from_tokens(toks, prefixes, lineno)
        o, toks = _term_from_tokens(toks, prefixes, lineno)
        if toks:
            raise ParseError(lineno, toks[0].column, f"unexpected {toks[0].text!r}", expected="'.'")
        if not isinstance(p, Iri):
            raise ParseError(lineno, 1, "predicate must be an IRI")
        triples.append((s, p, o))
    return Pattern(tuple(triples), tuple(filters))


# ---------------------------------------------------------------- aggregates and CQ helpers


def aggregate_avg(kb: KnowledgeBase, cls: Iri, prop: Iri) -> Optional[Decimal]:
    """Mean of ``prop`` over the inferred members of ``cls``; ``None`` when there is nothing to average."""
    values = []
    for x in sorted(kb.individuals_of(cls, "inferred")):
        for v in sorted(kb.values(x, prop)):
            if not v.is_numeric:
                raise NonNumericValue(f"{x.local} has non-numeric {prop.local} {v.lexical!r}")
            values.append(Decimal(v.lexical))
    if not values:
        return None
    return mean(values)


def top_k_behaviors(kb: KnowledgeBase, role: Iri, behavior_class: Iri, k: int) -> list:
    if k <= 0:
        return []
    members = kb.individuals_of(behavior_class, "inferred")
    counts = Counter()
    for actor in kb.subjects(OP.performsRole, role):
        for b in kb.objects(actor, OP.exhibits):
            if b in members:
                for label in kb.values(b, OP.hasCueLabel):
                    counts[label.lexical] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:k]


def tasks_for_actor(kb: KnowledgeBase, actor: Iri, goal: Iri) -> list:
    roles = kb.objects(actor, OP.performsRole)
    assigned = set()
    for r in roles:
        assigned |= kb.objects(r, OP.assignedTask)
    goals = {goal}
    todo = deque([goal])
    while todo:
        for sub in kb.objects(todo.popleft(), OP.hasSubGoal):
            if sub not in goals:
                goals.add(sub)
                todo.append(sub)
    for_goal = set()
    for g in goals:
        for_goal |= kb.objects(g, OP.achievedBy)
    return task_chain(kb, assigned & for_goal)


@dataclass(frozen=True)
class PropertyPath:
    """Alternating edges from a start node; each hop is (property, "->" | "<-", node)."""

    start: Iri
    hops: tuple

    def __len__(self):
        return len(self.hops)

    def render(self, prefixes=None) -> str:
        prefixes = DEFAULT_PREFIXES if prefixes is None else prefixes
        c = lambda x: compact_iri(x, prefixes)  # noqa: E731
        parts = [c(self.start)]
        for prop, direction, node in self.hops:
            if direction == "->":
                parts.append(f"-{c(prop)}->")
            else:
                parts.append(f"<-{c(prop)}-")
            parts.append(c(node))
        return " ".join(parts)


def _neighbours(kb, node):
    out = []
    for a in kb.about(node):
        if isinstance(a, ObjectProp):
            out.append((a.property, "->", a.object))
    for a in kb.incoming(node):
        out.append((a.property, "<-", a.subject))
    out.sort(key=lambda h: (h[0], h[1], h[2]))
    return out


def connecting_properties(kb: KnowledgeBase, a: Iri, b: Iri, max_hops: int = 4) -> list:
    """Simple property paths of length 1..max_hops from ``a`` to ``b``, edges walked either way."""
    if max_hops > 4:
        raise ValueError("max_hops is limited to 4")
    if a == b:
        return []
    paths = []

    def walk(node, hops, visited):
        for prop, direction, nxt in _neighbours(kb, node):
            if nxt in visited:
                continue
            step = hops + ((prop, direction, nxt),)
            if nxt == b:
                paths.append(PropertyPath(a, step))
            elif len(step) < max_hops:
                walk(nxt, step, visited | {nxt})

    walk(a, (), frozenset({a}))
    paths.sort(key=lambda p: (len(p), p.render()))
    return paths


# ---------------------------------------------------------------- competency questions

CQ_TEXT = {
    "CQ1": "Interpretation resulting from a Deviation exhibited by an actor performing AssemblerRole",
    "CQ2": "Top three behaviors exhibited by a deceiving actor with PlayerRole",
    "CQ3": "Tasks the kitting machine actor performs to achieve the scenario goal",
    "CQ4": "Tasks a PlayerRole actor performs to achieve the poker goal",
    "CQ5": "Property paths linking the kitting machine actor to the human actor",
    "CQ6": "Average hasResponseTime over Deception behaviors",
}

CQ_REQUIREMENTS = {
    "CQ1": (OP.AssemblerRole,),
    "CQ2": (OP.PlayerRole,),
    "CQ3": (OP.Robot1, OP.CompleteKitGoal),
    "CQ4": (OP.HumanPlayer1, OP.WinGameGoal),
    "CQ5": (OP.Robot1, OP.Human1),
    "CQ6": (OP.PokerScenario,),
}

CQ1_PATTERN = Pattern(
    triples=(
        (Var("a"), OP.performsRole, OP.AssemblerRole),
        (Var("a"), OP.exhibits, Var("b")),
        (Var("b"), RDF_TYPE, OP.Deviation),
        (Var("b"), OP.informs, Var("i")),
        (Var("i"), RDF_TYPE, Var("c")),
    ),
    filters=(Filter(Var("c"), "in", (OP.Contradiction, OP.Confirmation)),),
)


def run_cq(kb: KnowledgeBase, cq_id: str) -> ResultSet:
    cq_id = cq_id.upper()
    if cq_id not in CQ_REQUIREMENTS:
        raise ValueError(f"unknown competency question {cq_id!r}")
    present = kb.individuals()
    missing = [x for x in CQ_REQUIREMENTS[cq_id] if x not in present]
    if missing:
        raise MissingScenarioData(missing)
    if cq_id == "CQ1":
        return select(kb, CQ1_PATTERN)
    if cq_id == "CQ2":
        ranked = top_k_behaviors(kb, OP.PlayerRole, OP.Deception, 3)
        return ResultSet(["signature", "count"], [(Literal(s), Literal.of(n)) for s, n in ranked])
    if cq_id in ("CQ3", "CQ4"):
        actor, goal = CQ_REQUIREMENTS[cq_id]
        chain = tasks_for_actor(kb, actor, goal)
        return ResultSet(["step", "task"], [(Literal.of(i + 1), t) for i, t in enumerate(chain)])
    if cq_id == "CQ5":
        paths = connecting_properties(kb, OP.Robot1, OP.Human1, 4)
        return ResultSet(["hops", "path"], [(Literal.of(len(p)), Literal(p.render(kb.prefixes))) for p in paths])
    avg = aggregate_avg(kb, OP.Deception, OP.hasResponseTime)
    return ResultSet(["average"], [] if avg is None else [(Literal.decimal(avg),)])
