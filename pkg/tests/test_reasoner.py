import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontopret.errors import FragmentError, NotEntailed
from ontopret.kb import (
    OP,
    ClassAssertion,
    DisjointClasses,
    Existential,
    InverseProperties,
    KnowledgeBase,
    ObjectProp,
    SubClassOf,
    Universal,
)
from ontopret.reasoner import (
    CHECK,
    SKOLEMIZE,
    Materialization,
    check_consistency,
    explain,
    is_entailed,
    materialize,
)
from ontopret.schema import build_tbox

from oracles import naive_closure, naive_unmet, shortest_subsumption
from strategies import CLASSES, class_assertions, edges, small_kbs


def with_abox(*facts):
    return build_tbox().add_all(facts)


def test_deviation_informs_contradiction():
    closed, _ = materialize(with_abox(ClassAssertion(OP.b1, OP.Deviation), ObjectProp(OP.b1, OP.informs, OP.i1)))
    assert ClassAssertion(OP.i1, OP.Contradiction) in closed.abox


def test_task_oriented_informs_confirmation():
    closed, _ = materialize(with_abox(ClassAssertion(OP.b2, OP.TaskOriented), ObjectProp(OP.b2, OP.informs, OP.i2)))
    assert ClassAssertion(OP.i2, OP.Confirmation) in closed.abox


def test_missing_role_reported_in_check_mode():
    _, report = materialize(with_abox(ClassAssertion(OP.a1, OP.Actor)))
    assert [(w.individual, w.axiom) for w in report.incomplete_witnesses] == [
        (OP.a1, SubClassOf(OP.Actor, Existential(OP.performsRole, OP.Role)))]


def test_inverse_step():
    closed, _ = materialize(with_abox(ObjectProp(OP.t1, OP.hasNextStep, OP.t2)))
    assert ObjectProp(OP.t2, OP.hasPreviousStep, OP.t1) in closed.abox


def test_input_not_mutated():
    kb = with_abox(ClassAssertion(OP.b1, OP.Slip))
    before = kb.copy()
    materialize(kb)
    assert kb == before


def test_skolemize_fills_chain():
    kb = with_abox(ClassAssertion(OP.a1, OP.Actor))
    m = Materialization(kb, SKOLEMIZE)
    assert m.unmet() == []
    (role,) = m.kb.objects(OP.a1, OP.performsRole)
    assert role.is_blank and role.value == "_:sk_a1_performsRole_0"
    (exp,) = m.kb.objects(role, OP.sets)
    (interp,) = m.kb.objects(exp, OP.determines)
    assert ClassAssertion(interp, OP.Interpretation) in m.kb.abox
    assert len(m.fresh_individuals) == 3
    assert max(m.depth.values()) <= 4


def test_skolemize_is_reproducible():
    kb = with_abox(ClassAssertion(OP.s, OP.Scenario), ClassAssertion(OP.a, OP.Actor))
    a, _ = materialize(kb, SKOLEMIZE)
    b, _ = materialize(kb, SKOLEMIZE)
    assert a == b


def test_cyclic_existentials_rejected():
    kb = KnowledgeBase().add_all([
        SubClassOf(OP.A, Existential(OP.p, OP.A)),
        ClassAssertion(OP.x, OP.A),
    ])
    with pytest.raises(FragmentError):
        materialize(kb, SKOLEMIZE)
    _, report = materialize(kb, CHECK)
    assert len(report.incomplete_witnesses) == 1


def test_contradiction_and_confirmation_conflict():
    report = check_consistency(with_abox(ClassAssertion(OP.i1, OP.Contradiction), ClassAssertion(OP.i1, OP.Confirmation)))
    assert len(report.violations) == 1
    v = report.violations[0]
    assert {v.class_a, v.class_b} == {OP.Contradiction, OP.Confirmation}


def test_conflict_through_subclass():
    kb = with_abox(ClassAssertion(OP.b1, OP.Slip), ClassAssertion(OP.b1, OP.TaskOriented))
    report = check_consistency(kb)
    assert [(v.individual, {v.class_a, v.class_b}) for v in report.violations] == [
        (OP.b1, {OP.Deviation, OP.TaskOriented})]
    v = report.violations[0]
    deviation_side = v.derivation_a if v.class_a == OP.Deviation else v.derivation_b
    assert [s.rule for s in deviation_side.steps] == ["R-Subsume"]
    assert deviation_side.replay(kb.abox)


def test_empty_abox_consistent():
    report = check_consistency(build_tbox())
    assert report.consistent and not report.violations


def test_entailment_via_subsumption():
    kb = with_abox(ClassAssertion(OP.b1, OP.Deviation), ObjectProp(OP.b1, OP.informs, OP.i1))
    assert is_entailed(kb, ClassAssertion(OP.i1, OP.Interpretation))
    assert not is_entailed(kb, ClassAssertion(OP.b1, OP.Deception))
    assert is_entailed(kb, ClassAssertion(OP.b1, OP.Deviation))


def test_explain_universal():
    kb = with_abox(ClassAssertion(OP.b1, OP.Deviation), ObjectProp(OP.b1, OP.informs, OP.i1))
    d = explain(kb, ClassAssertion(OP.i1, OP.Contradiction))
    assert [(s.rule, s.axiom) for s in d.steps] == [
        ("R-Universal", SubClassOf(OP.Deviation, Universal(OP.informs, OP.Contradiction)))]
    assert d.replay(kb.abox)


def test_explain_asserted_is_empty():
    kb = with_abox(ClassAssertion(OP.b1, OP.Deviation))
    assert explain(kb, ClassAssertion(OP.b1, OP.Deviation)).steps == []


def test_explain_two_hop_subsumption():
    kb = with_abox(ClassAssertion(OP.b1, OP.Slip))
    d = explain(kb, ClassAssertion(OP.b1, OP.Behavior))
    assert [s.rule for s in d.steps] == ["R-Subsume"] * shortest_subsumption(kb.tbox, OP.Slip, OP.Behavior)


def test_explain_not_entailed():
    with pytest.raises(NotEntailed):
        explain(build_tbox(), ClassAssertion(OP.b1, OP.Behavior))


@given(small_kbs())
@settings(max_examples=150, deadline=None)
def test_closure_equals_naive_oracle(kb):
    closed, report = materialize(kb)
    expected = naive_closure(kb.tbox, kb.abox)
    assert closed.abox == expected
    assert {(w.individual, w.axiom) for w in report.incomplete_witnesses} == naive_unmet(kb.tbox, expected)


@given(small_kbs())
@settings(max_examples=100, deadline=None)
def test_idempotent(kb):
    once, _ = materialize(kb)
    twice, _ = materialize(once)
    assert once == twice


@given(small_kbs(), st.one_of(class_assertions, edges))
@settings(max_examples=100, deadline=None)
def test_monotone(kb, extra):
    before, _ = materialize(kb)
    after, _ = materialize(kb.copy().add(extra))
    assert before.abox <= after.abox


@given(small_kbs())
@settings(max_examples=100, deadline=None)
def test_check_mode_bound(kb):
    closed, _ = materialize(kb)
    people = kb.individuals()
    n_class = sum(1 for a in closed.abox if isinstance(a, ClassAssertion))
    n_edge = sum(1 for a in closed.abox if isinstance(a, ObjectProp))
    n_edge_in = sum(1 for a in kb.abox if isinstance(a, ObjectProp))
    assert closed.individuals() == people
    assert n_class <= len(people) * len(CLASSES)
    inverse_axioms = sum(1 for ax in kb.tbox if isinstance(ax, InverseProperties))
    # each edge adds at most one reversed copy per inverse axiom
    assert n_edge <= (1 + inverse_axioms) * n_edge_in
    if inverse_axioms <= 1:
        assert n_edge <= 2 * n_edge_in


@given(small_kbs())
@settings(max_examples=100, deadline=None)
def test_explanations_replay(kb):
    m = Materialization(kb)
    for a in sorted(m.kb.abox - m.asserted, key=str)[:10]:
        d = m.explain(a)
        assert d.replay(m.asserted)


@given(small_kbs())
@settings(max_examples=100, deadline=None)
def test_violations_one_per_pair(kb):
    closed, _ = materialize(kb)
    expected = set()
    for ax in kb.tbox:
        if isinstance(ax, DisjointClasses):
            for x in closed.individuals():
                if ClassAssertion(x, ax.a) in closed.abox and ClassAssertion(x, ax.b) in closed.abox:
                    expected.add((x, ax.a, ax.b))
    report = check_consistency(kb)
    got = [(v.individual, *sorted((v.class_a, v.class_b))) for v in report.violations]
    assert len(got) == len(set(got))
    assert set(got) == expected
