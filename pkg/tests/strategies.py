"""Hypothesis strategies for small knowledge bases, documents, patterns and traces."""

from hypothesis import strategies as st

from ontopret.kb import (
    ClassAssertion,
    DataProp,
    DisjointClasses,
    Existential,
    InverseExistential,
    InverseProperties,
    KnowledgeBase,
    Literal,
    Namespace,
    ObjectProp,
    SubClassOf,
    Universal,
)
from ontopret.query import Filter, Pattern, Var

EX = Namespace("http://example.org/t#")
PREFIXES = {"ex": "http://example.org/t#"}

INDIVIDUALS = [EX.term(f"x{i}") for i in range(10)]
CLASSES = [EX.term(f"C{i}") for i in range(8)]
PROPS = [EX.term(f"p{i}") for i in range(3)]
DATA_PROPS = [EX.term(f"d{i}") for i in range(2)]

individuals = st.sampled_from(INDIVIDUALS)
classes = st.sampled_from(CLASSES)
props = st.sampled_from(PROPS)


@st.composite
def axioms(draw):
    kind = draw(st.sampled_from(["sub", "all", "some", "inv-some", "inverse", "disjoint"]))
    a, b = draw(classes), draw(classes)
    p = draw(props)
    if kind == "sub":
        return SubClassOf(a, b)
    if kind == "all":
        return SubClassOf(a, Universal(p, b))
    if kind == "some":
        return SubClassOf(a, Existential(p, b))
    if kind == "inv-some":
        return SubClassOf(a, InverseExistential(p, b))
    if kind == "inverse":
        q = draw(props.filter(lambda q: q != p))
        return InverseProperties(p, q)
    b = draw(classes.filter(lambda c: c != a))
    return DisjointClasses(a, b)


class_assertions = st.builds(ClassAssertion, individuals, classes)
edges = st.builds(ObjectProp, individuals, props, individuals)

literals = st.one_of(
    st.text(alphabet=st.characters(codec="utf-8", exclude_categories=("Cs",)), max_size=12).map(Literal),
    st.integers(-10**6, 10**6).map(Literal.of),
    st.booleans().map(Literal.of),
    st.decimals(min_value=-1000, max_value=1000, places=3, allow_nan=False, allow_infinity=False).map(Literal.decimal),
)
data_assertions = st.builds(DataProp, individuals, st.sampled_from(DATA_PROPS), literals)


@st.composite
def small_kbs(draw, max_axioms=5, with_data=False):
    kb = KnowledgeBase(prefixes=PREFIXES)
    kb.add_all(draw(st.lists(axioms(), max_size=max_axioms)))
    kb.add_all(draw(st.lists(class_assertions, max_size=12)))
    kb.add_all(draw(st.lists(edges, max_size=12)))
    if with_data:
        kb.add_all(draw(st.lists(data_assertions, max_size=6)))
    return kb


VARS = [Var(n) for n in "xyzw"]


@st.composite
def patterns(draw, kb_terms):
    """Up to 5 triples over ``VARS`` and terms drawn from ``kb_terms``."""
    from ontopret.kb import RDF_TYPE

    term = st.one_of(st.sampled_from(VARS), st.sampled_from(kb_terms))
    triples = []
    for _ in range(draw(st.integers(1, 5))):
        if draw(st.booleans()):
            triples.append((draw(term), RDF_TYPE, draw(st.one_of(st.sampled_from(VARS), classes))))
        else:
            triples.append((draw(term), draw(props), draw(term)))
    used = [t for tr in triples for t in tr if isinstance(t, Var)]
    filters = []
    if used and draw(st.booleans()):
        v = draw(st.sampled_from(used))
        if draw(st.booleans()):
            filters.append(Filter(v, "in", tuple(draw(st.lists(st.sampled_from(INDIVIDUALS + CLASSES), min_size=1, max_size=4)))))
        else:
            filters.append(Filter(v, draw(st.sampled_from(["=", "!="])), draw(st.sampled_from(INDIVIDUALS + CLASSES))))
    return Pattern(tuple(triples), tuple(filters))


# ---------------------------------------------------------------- seeded generators (fixed sample counts)


def random_axiom(rng):
    kind = rng.choice(["sub", "all", "some", "inv-some", "inverse", "disjoint"])
    a, b = rng.choice(CLASSES), rng.choice(CLASSES)
    p = rng.choice(PROPS)
    if kind == "sub":
        return SubClassOf(a, b)
    if kind == "all":
        return SubClassOf(a, Universal(p, b))
    if kind == "some":
        return SubClassOf(a, Existential(p, b))
    if kind == "inv-some":
        return SubClassOf(a, InverseExistential(p, b))
    if kind == "inverse":
        return InverseProperties(p, rng.choice([q for q in PROPS if q != p]))
    return DisjointClasses(a, rng.choice([c for c in CLASSES if c != a]))


def random_kb(rng, max_axioms=5, max_individuals=10):
    people = INDIVIDUALS[:max_individuals]
    kb = KnowledgeBase(prefixes=PREFIXES)
    kb.add_all(random_axiom(rng) for _ in range(rng.randint(0, max_axioms)))
    kb.add_all(ClassAssertion(rng.choice(people), rng.choice(CLASSES)) for _ in range(rng.randint(0, 12)))
    kb.add_all(ObjectProp(rng.choice(people), rng.choice(PROPS), rng.choice(people)) for _ in range(rng.randint(0, 12)))
    return kb


def random_pattern(rng, kb_terms):
    from ontopret.kb import RDF_TYPE

    def term():
        return rng.choice(VARS) if rng.random() < 0.6 else rng.choice(kb_terms)

    triples = []
    for _ in range(rng.randint(1, 5)):
        if rng.random() < 0.4:
            triples.append((term(), RDF_TYPE, rng.choice(VARS) if rng.random() < 0.3 else rng.choice(CLASSES)))
        else:
            triples.append((term(), rng.choice(PROPS), term()))
    used = [t for tr in triples for t in tr if isinstance(t, Var)]
    filters = []
    if used and rng.random() < 0.5:
        v = rng.choice(used)
        if rng.random() < 0.5:
            filters.append(Filter(v, "in", tuple(rng.sample(INDIVIDUALS + CLASSES, rng.randint(1, 4)))))
        else:
            filters.append(Filter(v, rng.choice(["=", "!="]), rng.choice(INDIVIDUALS + CLASSES)))
    return Pattern(tuple(triples), tuple(filters))


def random_literal(rng):
    kind = rng.choice(["string", "integer", "boolean", "decimal"])
    if kind == "string":
        return Literal("".join(rng.choice('ab "\\\n\té✓') for _ in range(rng.randint(0, 8))))
    if kind == "integer":
        return Literal.of(rng.randint(-1000, 1000))
    if kind == "boolean":
        return Literal.of(rng.random() < 0.5)
    return Literal.decimal(f"{rng.uniform(-100, 100):.3f}")


def random_document_kb(rng):
    kb = random_kb(rng)
    kb.add_all(DataProp(rng.choice(INDIVIDUALS), rng.choice(DATA_PROPS), random_literal(rng)) for _ in range(rng.randint(0, 6)))
    return kb
