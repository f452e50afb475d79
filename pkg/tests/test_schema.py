import pytest

from ontopret.errors import BrokenSequence
from ontopret.kb import (
    OP,
    ClassAssertion,
    Declaration,
    DisjointClasses,
    Existential,
    InverseExistential,
    InverseProperties,
    KnowledgeBase,
    ObjectProp,
    SubClassOf,
    Universal,
)
from ontopret.reasoner import check_consistency
from ontopret.schema import (
    GEMS_CLASSES,
    SCENARIO_ONLY_PROPERTIES,
    VOCABULARY,
    build_tbox,
    canonical_axioms,
    module_tags,
    task_chain,
    validate_schema,
)


def logical(kb):
    return {ax for ax in kb.tbox if not isinstance(ax, Declaration)}


def test_tbox_contents():
    ax = logical(build_tbox())
    assert SubClassOf(OP.Actor, Existential(OP.performsRole, OP.Role)) in ax
    assert DisjointClasses(OP.TaskOriented, OP.Deviation) in ax
    assert SubClassOf(OP.Scenario, Existential(OP.hasGoal, OP.Goal)) in ax
    assert SubClassOf(OP.Scenario, InverseExistential(OP.encapsulates, OP.Context)) in ax
    assert SubClassOf(OP.Deviation, Universal(OP.informs, OP.Contradiction)) in ax
    assert InverseProperties(OP.hasPreviousStep, OP.hasNextStep) in ax


def test_tbox_axiom_counts():
    ax = logical(build_tbox())
    named = [a for a in ax if isinstance(a, SubClassOf) and a.sup in VOCABULARY.classes]
    assert len(named) == 9
    assert len([a for a in ax if isinstance(a, DisjointClasses)]) == 3 + 1 + 6
    assert len([a for a in ax if isinstance(a, SubClassOf) and isinstance(a.sup, Existential)]) == 5
    assert len([a for a in ax if isinstance(a, SubClassOf) and isinstance(a.sup, InverseExistential)]) == 2
    assert len([a for a in ax if isinstance(a, SubClassOf) and isinstance(a.sup, Universal)]) == 2


def test_no_universal_on_deception():
    assert not [a for a in build_tbox().tbox
                if isinstance(a, SubClassOf) and a.sub == OP.Deception and isinstance(a.sup, Universal)]


def test_build_is_deterministic():
    assert build_tbox() == build_tbox()
    assert logical(build_tbox()) == set(canonical_axioms())


def test_tbox_self_consistent():
    report = check_consistency(build_tbox())
    assert report.violations == [] and report.incomplete_witnesses == []


def test_canonical_schema_has_no_findings():
    assert validate_schema(build_tbox()) == []


def test_every_property_used_or_scenario_only():
    used = set()
    for ax in logical(build_tbox()):
        if isinstance(ax, SubClassOf) and ax.sup not in VOCABULARY.classes:
            used.add(ax.sup.property)
        elif isinstance(ax, InverseProperties):
            used |= {ax.p, ax.q}
    for p in VOCABULARY.object_properties + VOCABULARY.data_properties:
        assert p in used or p.local in SCENARIO_ONLY_PROPERTIES, p


def test_vocabulary_terms_unique():
    terms = VOCABULARY.all_terms()
    assert len(terms) == len(set(terms))
    symbols = set()
    for ax in logical(build_tbox()):
        if isinstance(ax, SubClassOf):
            symbols.add(ax.sub)
            symbols |= {ax.sup} if ax.sup in VOCABULARY.classes else {ax.sup.property, ax.sup.filler}
        elif isinstance(ax, DisjointClasses):
            symbols |= {ax.a, ax.b}
        else:
            symbols |= {ax.p, ax.q}
    assert symbols <= set(terms)


def test_module_tags():
    tags = {t.tag: t.members for t in module_tags()}
    assert len(tags) == 3 and all(tags.values())
    assert OP.Role in tags["Scenario-Module"] and OP.Role in tags["Expectation-Module"]
    union = set().union(*tags.values())
    assert union == set(VOCABULARY.classes) - set(GEMS_CLASSES)
    assert {OP.Actor, OP.Behavior, OP.Interpretation, OP.TaskOriented, OP.Deviation, OP.Deception,
            OP.Contradiction, OP.Confirmation} <= tags["Behavior-Module"]


def test_subgoal_cycle_found():
    kb = build_tbox()
    kb.add_assertion(ObjectProp(OP.g1, OP.hasSubGoal, OP.g2))
    kb.add_assertion(ObjectProp(OP.g2, OP.hasSubGoal, OP.g1))
    (f,) = validate_schema(kb)
    assert f.kind == "subgoal-cycle" and set(f.iris) == {OP.g1, OP.g2}


def test_sequence_branch_found():
    kb = build_tbox()
    kb.add_assertion(ObjectProp(OP.t1, OP.hasNextStep, OP.t2))
    kb.add_assertion(ObjectProp(OP.t1, OP.hasNextStep, OP.t3))
    (f,) = validate_schema(kb)
    assert f.kind == "sequence-branch" and set(f.iris) == {OP.t1, OP.t2, OP.t3}


def test_subclass_cycle_found():
    kb = KnowledgeBase().add_all([SubClassOf(OP.A, OP.B), SubClassOf(OP.B, OP.A)])
    (f,) = validate_schema(kb)
    assert f.kind == "subclass-cycle" and set(f.iris) == {OP.A, OP.B}


def test_missing_disjointness_found():
    kb = KnowledgeBase().add_all(canonical_axioms() - {DisjointClasses(OP.Contradiction, OP.Confirmation)})
    (f,) = validate_schema(kb)
    assert f.kind == "missing-disjointness" and set(f.iris) == {OP.Contradiction, OP.Confirmation}


def test_abox_only_kb_is_clean():
    kb = KnowledgeBase().add_assertion(ClassAssertion(OP.x, OP.Actor))
    assert validate_schema(kb) == []


def test_task_chain_orders_and_rejects():
    kb = KnowledgeBase()
    kb.add_assertion(ObjectProp(OP.t2, OP.hasNextStep, OP.t3))
    kb.add_assertion(ObjectProp(OP.t1, OP.hasNextStep, OP.t2))
    assert task_chain(kb, {OP.t3, OP.t1, OP.t2}) == [OP.t1, OP.t2, OP.t3]
    assert task_chain(kb, set()) == []
    with pytest.raises(BrokenSequence):
        task_chain(kb, {OP.t1, OP.t3})
    kb.add_assertion(ObjectProp(OP.t3, OP.hasNextStep, OP.t1))
    with pytest.raises(BrokenSequence):
        task_chain(kb, {OP.t1, OP.t2, OP.t3})
