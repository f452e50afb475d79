"""Forward-chaining materialization, consistency checking and entailment explanation.

Rules::

    R-Subsume      x:C, C ⊑ D                 ⟹ x:D
    R-Universal    x:C, C ⊑ ∀p.D, p(x,y)      ⟹ y:D
    R-Inverse      p(x,y), p ≡ q⁻             ⟹ q(y,x)
    R-ExistSkolem  x:C, C ⊑ ∃p.D, no witness  ⟹ p(x,y), y:D  for fresh y
                   (and p(y,x), y:D for C ⊑ ∃p⁻.D)

The first three are evaluated semi-naively to a least fixpoint.  Skolemization
runs only in ``skolemize`` mode and only after the other rules have saturated;
in ``check`` mode the unmet existentials are reported instead.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field

from .errors import FragmentError, NotEntailed
from .kb import (
    ClassAssertion,
    DataProp,
    Existential,
    InverseExistential,
    InverseProperties,
    Iri,
    KnowledgeBase,
    ObjectProp,
    SubClassOf,
    Universal,
    assertion_key,
)

CHECK = "check"
SKOLEMIZE = "skolemize"


@dataclass(frozen=True)
class InferenceRule:
    id: str
    description: str


RULES = {
    r.id: r
    for r in (
        InferenceRule("R-Subsume", "x:C and C ⊑ D give x:D"),
        InferenceRule("R-Universal", "x:C, C ⊑ ∀p.D and p(x,y) give y:D"),
        InferenceRule("R-Inverse", "p(x,y) and p inverse of q give q(y,x)"),
        InferenceRule("R-ExistSkolem", "x:C and C ⊑ ∃p.D with no witness mint a fresh p-successor in D"),
    )
}


@dataclass(frozen=True)
class Step:
    rule: str
    premises: tuple
    axiom: object
    conclusion: object

    def __str__(self):
        prem = ", ".join(str(p) for p in self.premises)
        return f"{self.rule}: {prem} [{self.axiom}] ⟹ {self.conclusion}"


@dataclass
class Derivation:
    conclusion: object
    steps: list = field(default_factory=list)

    def replay(self, asserted) -> bool:
        """Re-derive the conclusion from ``asserted`` by checking each step in turn."""
        known = set(asserted)
        for step in self.steps:
            if not all(p in known for p in step.premises):
                return False
            if not _step_valid(step):
                return False
            known.add(step.conclusion)
        return self.conclusion in known

    def __len__(self):
        return len(self.steps)


def _step_valid(step: Step) -> bool:
    ax, prem, concl = step.axiom, step.premises, step.conclusion
    if step.rule == "R-Subsume":
        (m,) = prem
        return (isinstance(ax, SubClassOf) and isinstance(ax.sup, Iri) and m.concept == ax.sub
                and concl == ClassAssertion(m.individual, ax.sup))
    if step.rule == "R-Universal":
        m, edge = prem
        return (isinstance(ax, SubClassOf) and isinstance(ax.sup, Universal) and m.concept == ax.sub
                and edge.subject == m.individual and edge.property == ax.sup.property
                and concl == ClassAssertion(edge.object, ax.sup.filler))
    if step.rule == "R-Inverse":
        (edge,) = prem
        if not isinstance(ax, InverseProperties) or edge.property not in (ax.p, ax.q):
            return False
        other = ax.q if edge.property == ax.p else ax.p
        return concl == ObjectProp(edge.object, other, edge.subject)
    if step.rule == "R-ExistSkolem":
        (m,) = prem
        return isinstance(ax, SubClassOf) and isinstance(ax.sup, (Existential, InverseExistential)) and m.concept == ax.sub
    return False


@dataclass(frozen=True)
class Violation:
    individual: Iri
    class_a: Iri
    class_b: Iri
    derivation_a: Derivation
    derivation_b: Derivation

    def __str__(self):
        return f"{self.individual.local} is both {self.class_a.local} and {self.class_b.local}"


@dataclass(frozen=True)
class Witness:
    individual: Iri
    axiom: SubClassOf

    def __str__(self):
        return f"{self.individual.local} lacks a witness for {self.axiom}"


@dataclass
class ConsistencyReport:
    violations: list = field(default_factory=list)
    incomplete_witnesses: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.violations


def _restriction_key(r):
    return (type(r).__name__, r.property, r.filler)


class Materialization:
    """Result of one closure computation, with the rule firings that produced it."""

    def __init__(self, kb: KnowledgeBase, mode: str = CHECK):
        if mode not in (CHECK, SKOLEMIZE):
            raise ValueError(f"unknown mode {mode!r}")
        self._check_fragment(kb)
        self.mode = mode
        self.asserted = frozenset(kb.abox)
        self.kb = kb.copy()
        self.justifications = defaultdict(set)
        self.depth = {}
        self._agenda = deque(sorted(kb.abox, key=assertion_key))
        self._saturate()
        if mode == SKOLEMIZE:
            self._skolemize()
        witnesses = [] if mode == SKOLEMIZE else [Witness(x, ax) for x, ax in self.unmet()]
        self.report = ConsistencyReport(incomplete_witnesses=witnesses)
        self._best = None

    @staticmethod
    def _check_fragment(kb):
        for ax in kb.tbox:
            if isinstance(ax, SubClassOf):
                if not isinstance(ax.sup, (Iri, Existential, InverseExistential, Universal)):
                    raise FragmentError(f"unsupported axiom {ax!r}")

    # -- rule application

    def _derive(self, conclusion, rule, premises, axiom):
        if conclusion in self.asserted:
            return
        self.justifications[conclusion].add((rule, premises, axiom))
        if conclusion not in self.kb.abox:
            self.kb.add_assertion(conclusion)
            self._agenda.append(conclusion)

    def _saturate(self):
        kb = self.kb
        while self._agenda:
            fact = self._agenda.popleft()
            if isinstance(fact, ClassAssertion):
                x, c = fact.individual, fact.concept
                for d in sorted(kb.superclasses(c)):
                    self._derive(ClassAssertion(x, d), "R-Subsume", (fact,), SubClassOf(c, d))
                for r in sorted(kb.restrictions(c), key=_restriction_key):
                    if isinstance(r, Universal):
                        for y in sorted(kb.objects(x, r.property)):
                            edge = ObjectProp(x, r.property, y)
                            self._derive(ClassAssertion(y, r.filler), "R-Universal", (fact, edge), SubClassOf(c, r))
            elif isinstance(fact, ObjectProp):
                x, p, y = fact.subject, fact.property, fact.object
                for c in sorted(kb.types(x)):
                    for r in sorted(kb.restrictions(c), key=_restriction_key):
                        if isinstance(r, Universal) and r.property == p:
                            self._derive(ClassAssertion(y, r.filler), "R-Universal",
                                         (ClassAssertion(x, c), fact), SubClassOf(c, r))
                for q in sorted(kb.inverses(p)):
                    self._derive(ObjectProp(y, q, x), "R-Inverse", (fact,), InverseProperties(p, q))

    # -- existentials

    def _satisfied(self, x, r) -> bool:
        kb = self.kb
        if isinstance(r, Existential):
            return any(kb.has_type(y, r.filler) for y in kb.objects(x, r.property))
        return any(kb.has_type(y, r.filler) for y in kb.subjects(r.property, x))

    def unmet(self):
        """(individual, axiom) pairs whose existential has no witness, in sorted order."""
        kb = self.kb
        out = []
        for c in kb.restricted_classes():
            existentials = [r for r in kb.restrictions(c) if isinstance(r, (Existential, InverseExistential))]
            if not existentials:
                continue
            members = sorted(kb.individuals_of(c))
            for r in sorted(existentials, key=_restriction_key):
                for x in members:
                    if not self._satisfied(x, r):
                        out.append((x, SubClassOf(c, r)))
        out.sort(key=lambda pair: (pair[0], pair[1].sub, _restriction_key(pair[1].sup)))
        return out

    def _fresh(self, x: Iri, p: Iri) -> Iri:
        taken = self.kb.individuals()
        n = 0
        while True:
            cand = Iri(f"_:sk_{x.local}_{p.local}_{n}")
            if cand not in taken:
                return cand
            n += 1

    def _skolemize(self):
        bound = sum(
            1 for ax in self.kb.tbox
            if isinstance(ax, SubClassOf) and isinstance(ax.sup, (Existential, InverseExistential))
        )
        while True:
            gaps = self.unmet()
            if not gaps:
                return
            x, ax = gaps[0]
            r = ax.sup
            depth = self.depth.get(x, 0) + 1
            if depth > bound:
                raise FragmentError(
                    f"existential axioms generate an unbounded chain of fresh individuals (at {ax}); "
                    "skolemize mode needs an acyclic existential dependency graph"
                )
            y = self._fresh(x, r.property)
            self.depth[y] = depth
            premise = ClassAssertion(x, ax.sub)
            edge = ObjectProp(x, r.property, y) if isinstance(r, Existential) else ObjectProp(y, r.property, x)
            self._derive(edge, "R-ExistSkolem", (premise,), ax)
            self._derive(ClassAssertion(y, r.filler), "R-ExistSkolem", (premise,), ax)
            self._saturate()

    @property
    def fresh_individuals(self) -> list:
        return sorted(self.depth)

    # -- explanations

    def _costs(self):
        if self._best is not None:
            return self._best
        cost = {a: 0 for a in self.asserted}
        best = {}
        changed = True
        items = sorted(self.justifications.items(), key=lambda kv: assertion_key(kv[0]))
        while changed:
            changed = False
            for concl, justs in items:
                for rule, premises, axiom in sorted(justs, key=lambda j: (j[0], [assertion_key(p) for p in j[1]], str(j[2]))):
                    if not all(p in cost for p in premises):
                        continue
                    c = 1 + sum(cost[p] for p in premises)
                    if c < cost.get(concl, math.inf):
                        cost[concl] = c
                        best[concl] = (rule, premises, axiom)
                        changed = True
        self._best = best
        return best

    def explain(self, a) -> Derivation:
        if a not in self.kb.abox:
            raise NotEntailed(f"{a} is not entailed")
        best = self._costs()
        steps = []
        done = set(self.asserted)

        def visit(fact):
            if fact in done:
                return
            rule, premises, axiom = best[fact]
            for p in premises:
                visit(p)
            done.add(fact)
            steps.append(Step(rule, premises, axiom, fact))

        visit(a)
        return Derivation(a, steps)


def materialize(kb: KnowledgeBase, mode: str = CHECK):
    """Closure of ``kb`` as a new snapshot, plus the existential audit (check mode)."""
    m = Materialization(kb, mode)
    return m.kb, m.report


def check_consistency(kb: KnowledgeBase) -> ConsistencyReport:
    m = Materialization(kb, CHECK)
    closed = m.kb
    violations = []
    for x in sorted(closed.individuals()):
        types = sorted(closed.types(x))
        for i, a in enumerate(types):
            for b in types[i + 1:]:
                if closed.disjoint(a, b):
                    violations.append(Violation(
                        x, a, b,
                        m.explain(ClassAssertion(x, a)),
                        m.explain(ClassAssertion(x, b)),
                    ))
    return ConsistencyReport(violations=violations, incomplete_witnesses=m.report.incomplete_witnesses)


def is_entailed(kb: KnowledgeBase, a) -> bool:
    if not isinstance(a, (ClassAssertion, ObjectProp, DataProp)):
        raise TypeError(f"not an assertion: {a!r}")
    return a in Materialization(kb, CHECK).kb.abox


def explain(kb: KnowledgeBase, a) -> Derivation:
    """Shortest discovered derivation of ``a``; raises :class:`NotEntailed` otherwise."""
    return Materialization(kb, CHECK).explain(a)
