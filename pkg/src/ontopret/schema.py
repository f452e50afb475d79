"""The canonical OntoPret TBox, its module groupings, and a structural validator."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import networkx as nx

from .errors import BrokenSequence
from .kb import (
    OP,
    OWL_CLASS,
    OWL_DATATYPE_PROPERTY,
    OWL_OBJECT_PROPERTY,
    Declaration,
    DisjointClasses,
    Existential,
    InverseExistential,
    InverseProperties,
    Iri,
    KnowledgeBase,
    ObjectProp,
    SubClassOf,
    Universal,
)

CLASS_NAMES = (
    "Scenario", "Context", "Domain", "Goal", "Task", "Role", "Actor", "Expectation",
    "Behavior", "TaskOriented", "Deviation", "Deception",
    "Interpretation", "Contradiction", "Confirmation",
    "Slip", "Lapse", "Mistake", "Violation",
)
OBJECT_PROPERTY_NAMES = (
    "encapsulates", "conceptualizes", "hasGoal", "hasSubGoal", "achievedBy",
    "hasNextStep", "hasPreviousStep", "providesRole", "performsRole", "sets",
    "determines", "exhibits", "informs", "assignedTask",
)
DATA_PROPERTY_NAMES = ("hasResponseTime", "hasCueLabel")

# Properties that only carry scenario data; no TBox axiom beyond their declaration.
SCENARIO_ONLY_PROPERTIES = ("assignedTask", "achievedBy", "hasSubGoal", "exhibits", "hasResponseTime", "hasCueLabel")

BEHAVIOR_CLASSES = (OP.TaskOriented, OP.Deviation, OP.Deception)
INTERPRETATION_CLASSES = (OP.Contradiction, OP.Confirmation)
GEMS_CLASSES = (OP.Slip, OP.Lapse, OP.Mistake, OP.Violation)


@dataclass(frozen=True)
class OntoPretVocabulary:
    classes: tuple
    object_properties: tuple
    data_properties: tuple

    def all_terms(self) -> tuple:
        return self.classes + self.object_properties + self.data_properties


VOCABULARY = OntoPretVocabulary(
    classes=tuple(OP.term(n) for n in CLASS_NAMES),
    object_properties=tuple(OP.term(n) for n in OBJECT_PROPERTY_NAMES),
    data_properties=tuple(OP.term(n) for n in DATA_PROPERTY_NAMES),
)


def _axioms():
    sub = [
        (OP.TaskOriented, OP.Behavior),
        (OP.Deviation, OP.Behavior),
        (OP.Deception, OP.Behavior),
        (OP.Contradiction, OP.Interpretation),
        (OP.Confirmation, OP.Interpretation),
    ]
    sub += [(g, OP.Deviation) for g in GEMS_CLASSES]
    for a, b in sub:
        yield SubClassOf(a, b)
    for group in (BEHAVIOR_CLASSES, INTERPRETATION_CLASSES, GEMS_CLASSES):
        for a, b in combinations(group, 2):
            yield DisjointClasses(a, b)
    yield SubClassOf(OP.Actor, Existential(OP.performsRole, OP.Role))
    yield SubClassOf(OP.Role, Existential(OP.sets, OP.Expectation))
    yield SubClassOf(OP.Expectation, Existential(OP.determines, OP.Interpretation))
    yield SubClassOf(OP.Scenario, Existential(OP.hasGoal, OP.Goal))
    yield SubClassOf(OP.Scenario, Existential(OP.providesRole, OP.Role))
    # Context -encapsulates-> Scenario, Domain -conceptualizes-> Scenario
    yield SubClassOf(OP.Scenario, InverseExistential(OP.encapsulates, OP.Context))
    yield SubClassOf(OP.Scenario, InverseExistential(OP.conceptualizes, OP.Domain))
    yield SubClassOf(OP.Deviation, Universal(OP.informs, OP.Contradiction))
    yield SubClassOf(OP.TaskOriented, Universal(OP.informs, OP.Confirmation))
    yield InverseProperties(OP.hasNextStep, OP.hasPreviousStep)


def canonical_axioms() -> frozenset:
    """Logical axioms of the canonical TBox (declarations excluded)."""
    return frozenset(_axioms())


def declarations() -> list:
    out = [Declaration(c, OWL_CLASS) for c in VOCABULARY.classes]
    out += [Declaration(p, OWL_OBJECT_PROPERTY) for p in VOCABULARY.object_properties]
    out += [Declaration(p, OWL_DATATYPE_PROPERTY) for p in VOCABULARY.data_properties]
    return out


def build_tbox() -> KnowledgeBase:
    kb = KnowledgeBase()
    kb.add_all(declarations())
    kb.add_all(_axioms())
    return kb


# ---------------------------------------------------------------- modules


@dataclass(frozen=True)
class ModuleTag:
    tag: str
    members: frozenset


def module_tags() -> list:
    scenario = {OP.Scenario, OP.Context, OP.Domain, OP.Goal, OP.Task, OP.Role}
    expectation = {OP.Actor, OP.Role, OP.Expectation, OP.Interpretation}
    behavior = {
        OP.Actor, OP.Behavior, OP.Interpretation,
        OP.TaskOriented, OP.Deviation, OP.Deception,
        OP.Contradiction, OP.Confirmation,
    }
    return [
        ModuleTag("Scenario-Module", frozenset(scenario)),
        ModuleTag("Expectation-Module", frozenset(expectation)),
        ModuleTag("Behavior-Module", frozenset(behavior)),
    ]


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Finding:
    kind: str
    iris: tuple
    message: str

    def __str__(self):
        return f"[{self.kind}] {self.message}"


def _cycles(edges) -> list:
    g = nx.DiGraph()
    g.add_edges_from(edges)
    out = []
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1 or any(g.has_edge(n, n) for n in comp):
            out.append(tuple(sorted(comp)))
    return sorted(out)


def validate_schema(kb: KnowledgeBase) -> list:
    """Structural problems in ``kb``, each naming the IRIs involved."""
    findings = []

    named = [(ax.sub, ax.sup) for ax in kb.tbox if isinstance(ax, SubClassOf) and isinstance(ax.sup, Iri)]
    for comp in _cycles(named):
        findings.append(Finding("subclass-cycle", comp, "subclass cycle among " + ", ".join(c.local for c in comp)))

    subgoals = [(a.subject, a.object) for a in kb.with_property(OP.hasSubGoal) if isinstance(a, ObjectProp)]
    for comp in _cycles(subgoals):
        findings.append(Finding("subgoal-cycle", comp, "hasSubGoal cycle among " + ", ".join(g.local for g in comp)))

    successors = {}
    for a in kb.with_property(OP.hasNextStep):
        successors.setdefault(a.subject, set()).add(a.object)
    for task in sorted(successors):
        nxt = successors[task]
        if len(nxt) > 1:
            iris = (task,) + tuple(sorted(nxt))
            findings.append(Finding(
                "sequence-branch", iris,
                f"{task.local} has {len(nxt)} next steps: " + ", ".join(t.local for t in sorted(nxt)),
            ))

    # A missing disjointness only counts once the KB talks about both classes.
    mentioned = set()
    for ax in kb.tbox:
        if isinstance(ax, SubClassOf):
            mentioned.add(ax.sub)
            mentioned.add(ax.sup if isinstance(ax.sup, Iri) else ax.sup.filler)
        elif isinstance(ax, DisjointClasses):
            mentioned.update((ax.a, ax.b))
        elif isinstance(ax, Declaration):
            mentioned.add(ax.iri)
    for ax in sorted((a for a in canonical_axioms() if isinstance(a, DisjointClasses)), key=lambda d: (d.a, d.b)):
        if ax.a in mentioned and ax.b in mentioned and ax not in kb.tbox:
            findings.append(Finding("missing-disjointness", (ax.a, ax.b), f"{ax.a.local} and {ax.b.local} are not declared disjoint"))

    return findings


def task_chain(kb: KnowledgeBase, tasks) -> list:
    """Order ``tasks`` along their hasNextStep links; they must form one linear chain."""
    tasks = set(tasks)
    if not tasks:
        return []
    nxt = {}
    has_prev = set()
    for t in tasks:
        succ = kb.objects(t, OP.hasNextStep) & tasks
        if len(succ) > 1:
            raise BrokenSequence(f"{t.local} branches to " + ", ".join(s.local for s in sorted(succ)))
        if succ:
            (s,) = succ
            nxt[t] = s
            has_prev.add(s)
    heads = sorted(tasks - has_prev)
    if len(heads) != 1:
        raise BrokenSequence("tasks do not form a single chain: heads " + ", ".join(h.local for h in heads) if heads
                             else "tasks form a cycle")
    chain = [heads[0]]
    while chain[-1] in nxt:
        if nxt[chain[-1]] in chain:
            raise BrokenSequence("hasNextStep cycle at " + nxt[chain[-1]].local)
        chain.append(nxt[chain[-1]])
    if len(chain) != len(tasks):
        missing = sorted(tasks - set(chain))
        raise BrokenSequence("tasks off the chain: " + ", ".join(m.local for m in missing))
    return chain
