"""In-memory knowledge base: IRIs, literals, TBox axioms, ABox assertions, indexes."""

from __future__ import annotations

import math
import re
from collections import defaultdict, deque
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Iterable, Iterator, Union

from .errors import FragmentError, UnknownPrefix

ONTOPRET = "https://w3id.org/ontopret#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"

DEFAULT_PREFIXES = {
    "ontopret": ONTOPRET,
    "rdf": RDF,
    "rdfs": RDFS,
    "owl": OWL,
    "xsd": XSD,
}


@dataclass(frozen=True, order=True, slots=True)
class Iri:
    value: str

    def __str__(self):
        return self.value

    def __repr__(self):
        return f"Iri({self.value!r})"

    @property
    def local(self) -> str:
        """Fragment or last path segment, used for display and fresh-name minting."""
        v = self.value
        for sep in ("#", "/", ":"):
            if sep in v:
                v = v.rsplit(sep, 1)[1]
                break
        return v

    @property
    def is_blank(self) -> bool:
        return self.value.startswith("_:")


class Namespace:
    """Attribute access mints IRIs: ``Namespace(ONTOPRET).Deviation``."""

    def __init__(self, base: str):
        self.base = base

    def __getattr__(self, name: str) -> Iri:
        if name.startswith("__"):
            raise AttributeError(name)
        return Iri(self.base + name)

    def term(self, name: str) -> Iri:
        return Iri(self.base + name)

    def __contains__(self, iri) -> bool:
        return isinstance(iri, Iri) and iri.value.startswith(self.base)


OP = Namespace(ONTOPRET)
RDF_TYPE = Iri(RDF + "type")
RDFS_LABEL = Iri(RDFS + "label")
OWL_CLASS = Iri(OWL + "Class")
OWL_OBJECT_PROPERTY = Iri(OWL + "ObjectProperty")
OWL_DATATYPE_PROPERTY = Iri(OWL + "DatatypeProperty")
DECLARATION_KINDS = (OWL_CLASS, OWL_OBJECT_PROPERTY, OWL_DATATYPE_PROPERTY)

DATATYPES = ("string", "integer", "decimal", "boolean")
_INTEGER_RE = re.compile(r"[+-]?\d+\Z")
_DECIMAL_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)\Z")


@dataclass(frozen=True, order=True, slots=True)
class Literal:
    lexical: str
    datatype: str = "string"

    def __post_init__(self):
        if self.datatype not in DATATYPES:
            raise ValueError(f"unsupported datatype {self.datatype!r}")
        if self.datatype == "integer" and not _INTEGER_RE.match(self.lexical):
            raise ValueError(f"bad integer lexical form {self.lexical!r}")
        if self.datatype == "decimal":
            if not _DECIMAL_RE.match(self.lexical):
                raise ValueError(f"bad decimal lexical form {self.lexical!r}")
            if not math.isfinite(float(self.lexical)):
                raise ValueError(f"decimal {self.lexical!r} is not finite")
        if self.datatype == "boolean" and self.lexical not in ("true", "false"):
            raise ValueError(f"bad boolean lexical form {self.lexical!r}")

    @classmethod
    def of(cls, value) -> "Literal":
        """Build a literal from a native Python value (floats become decimals)."""
        if isinstance(value, Literal):
            return value
        if isinstance(value, bool):
            return cls("true" if value else "false", "boolean")
        if isinstance(value, int):
            return cls(str(value), "integer")
        if isinstance(value, (float, Decimal)):
            return cls.decimal(value)
        if isinstance(value, str):
            return cls(value, "string")
        raise TypeError(f"cannot make a literal from {type(value).__name__}")

    @classmethod
    def decimal(cls, value) -> "Literal":
        try:
            d = Decimal(repr(value)) if isinstance(value, float) else Decimal(value)
        except InvalidOperation:
            raise ValueError(f"not a decimal: {value!r}") from None
        if not d.is_finite():
            raise ValueError(f"decimal {value!r} is not finite")
        text = format(d, "f")
        return cls(text, "decimal")

    @property
    def is_numeric(self) -> bool:
        return self.datatype in ("integer", "decimal")

    def to_python(self):
        if self.datatype == "integer":
            return int(self.lexical)
        if self.datatype == "decimal":
            return Decimal(self.lexical)
        if self.datatype == "boolean":
            return self.lexical == "true"
        return self.lexical


# ---------------------------------------------------------------- class expressions


def _require_named(value, what):
    if not isinstance(value, Iri):
        raise FragmentError(f"{what} must be a named class or property, got {value!r}; nested restrictions are not supported")


@dataclass(frozen=True, order=True, slots=True)
class Existential:
    property: Iri
    filler: Iri

    def __post_init__(self):
        _require_named(self.property, "restriction property")
        _require_named(self.filler, "restriction filler")

    def __str__(self):
        return f"∃{self.property.local}.{self.filler.local}"


@dataclass(frozen=True, order=True, slots=True)
class InverseExistential:
    property: Iri
    filler: Iri

    def __post_init__(self):
        _require_named(self.property, "restriction property")
        _require_named(self.filler, "restriction filler")

    def __str__(self):
        return f"∃{self.property.local}⁻.{self.filler.local}"


@dataclass(frozen=True, order=True, slots=True)
class Universal:
    property: Iri
    filler: Iri

    def __post_init__(self):
        _require_named(self.property, "restriction property")
        _require_named(self.filler, "restriction filler")

    def __str__(self):
        return f"∀{self.property.local}.{self.filler.local}"


Restriction = Union[Existential, InverseExistential, Universal]
ClassExpr = Union[Iri, Existential, InverseExistential, Universal]


# ---------------------------------------------------------------- TBox axioms


@dataclass(frozen=True, slots=True)
class SubClassOf:
    sub: Iri
    sup: ClassExpr

    def __post_init__(self):
        if not isinstance(self.sub, Iri):
            raise FragmentError(f"subclass side must be a named class, got {self.sub!r}")
        if not isinstance(self.sup, (Iri, Existential, InverseExistential, Universal)):
            raise FragmentError(f"unsupported superclass expression {self.sup!r}")

    @property
    def subject(self) -> Iri:
        return self.sub

    def __str__(self):
        sup = self.sup.local if isinstance(self.sup, Iri) else str(self.sup)
        return f"{self.sub.local} ⊑ {sup}"


@dataclass(frozen=True, slots=True)
class DisjointClasses:
    """Stored with its two classes in sorted order, so (a, b) and (b, a) coincide."""

    a: Iri
    b: Iri

    def __post_init__(self):
        _require_named(self.a, "disjoint class")
        _require_named(self.b, "disjoint class")
        if self.b < self.a:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @property
    def subject(self) -> Iri:
        return self.a

    def __str__(self):
        return f"{self.a.local} ⊥ {self.b.local}"


@dataclass(frozen=True, slots=True)
class InverseProperties:
    p: Iri
    q: Iri

    def __post_init__(self):
        _require_named(self.p, "property")
        _require_named(self.q, "property")
        if self.q < self.p:
            p, q = self.q, self.p
            object.__setattr__(self, "p", p)
            object.__setattr__(self, "q", q)

    @property
    def subject(self) -> Iri:
        return self.p

    def __str__(self):
        return f"{self.p.local} ≡ {self.q.local}⁻"


@dataclass(frozen=True, slots=True)
class Declaration:
    """Vocabulary registration: ``x a owl:Class`` and friends."""

    iri: Iri
    kind: Iri

    def __post_init__(self):
        if self.kind not in DECLARATION_KINDS:
            raise FragmentError(f"unsupported declaration kind {self.kind!r}")

    @property
    def subject(self) -> Iri:
        return self.iri

    def __str__(self):
        return f"{self.iri.local} : {self.kind.local}"


TBoxAxiom = Union[SubClassOf, DisjointClasses, InverseProperties, Declaration]


# ---------------------------------------------------------------- ABox assertions


@dataclass(frozen=True, order=True, slots=True)
class ClassAssertion:
    individual: Iri
    concept: Iri

    def triple(self):
        return (self.individual, RDF_TYPE, self.concept)

    def __str__(self):
        return f"{self.individual.local} : {self.concept.local}"


@dataclass(frozen=True, order=True, slots=True)
class ObjectProp:
    subject: Iri
    property: Iri
    object: Iri

    def triple(self):
        return (self.subject, self.property, self.object)

    def __str__(self):
        return f"{self.property.local}({self.subject.local}, {self.object.local})"


@dataclass(frozen=True, order=True, slots=True)
class DataProp:
    subject: Iri
    property: Iri
    value: Literal

    def triple(self):
        return (self.subject, self.property, self.value)

    def __str__(self):
        return f"{self.property.local}({self.subject.local}, {self.value.lexical!r})"


Assertion = Union[ClassAssertion, ObjectProp, DataProp]

_TBOX_TYPES = (SubClassOf, DisjointClasses, InverseProperties, Declaration)
_ABOX_TYPES = (ClassAssertion, ObjectProp, DataProp)


def is_tbox(statement) -> bool:
    return isinstance(statement, _TBOX_TYPES)


def is_abox(statement) -> bool:
    return isinstance(statement, _ABOX_TYPES)


def term_key(term):
    """Total order over IRIs and literals (IRIs first)."""
    if isinstance(term, Iri):
        return (0, term.value, "")
    return (1, term.lexical, term.datatype)


def assertion_key(a):
    s, p, o = a.triple()
    return (term_key(s), term_key(p), term_key(o))


# ---------------------------------------------------------------- the store


class KnowledgeBase:
    """Prefix table, TBox, ABox and lookup indexes over them.

    Writes go through :meth:`add_axiom` / :meth:`add_assertion`; there is no
    removal, so every index only ever grows in step with the statement sets.
    """

    def __init__(self, prefixes=None):
        self.prefixes: dict[str, str] = dict(DEFAULT_PREFIXES if prefixes is None else prefixes)
        self.tbox: set = set()
        self.abox: set = set()
        # tbox indexes
        self._supers = defaultdict(set)
        self._subs = defaultdict(set)
        self._restrictions = defaultdict(set)
        self._disjoint = defaultdict(set)
        self._inverse = defaultdict(set)
        # abox indexes
        self._by_subject = defaultdict(set)
        self._by_property = defaultdict(set)
        self._by_object = defaultdict(set)
        self._by_class = defaultdict(set)
        self._types = defaultdict(set)

    # -- construction

    def add_axiom(self, ax) -> "KnowledgeBase":
        if not isinstance(ax, _TBOX_TYPES):
            raise TypeError(f"not a TBox axiom: {ax!r}")
        if ax in self.tbox:
            return self
        self.tbox.add(ax)
        if isinstance(ax, SubClassOf):
            if isinstance(ax.sup, Iri):
                self._supers[ax.sub].add(ax.sup)
                self._subs[ax.sup].add(ax.sub)
            else:
                self._restrictions[ax.sub].add(ax.sup)
        elif isinstance(ax, DisjointClasses):
            self._disjoint[ax.a].add(ax.b)
            self._disjoint[ax.b].add(ax.a)
        elif isinstance(ax, InverseProperties):
            self._inverse[ax.p].add(ax.q)
            self._inverse[ax.q].add(ax.p)
        return self

    def add_assertion(self, a) -> "KnowledgeBase":
        if not isinstance(a, _ABOX_TYPES):
            raise TypeError(f"not an assertion: {a!r}")
        if a in self.abox:
            return self
        self.abox.add(a)
        if isinstance(a, ClassAssertion):
            self._by_subject[a.individual].add(a)
            self._by_property[RDF_TYPE].add(a)
            self._by_class[a.concept].add(a.individual)
            self._types[a.individual].add(a.concept)
        else:
            self._by_subject[a.subject].add(a)
            self._by_property[a.property].add(a)
            if isinstance(a, ObjectProp):
                self._by_object[a.object].add(a)
        return self

    def add(self, statement) -> "KnowledgeBase":
        if isinstance(statement, _TBOX_TYPES):
            return self.add_axiom(statement)
        return self.add_assertion(statement)

    def add_all(self, statements: Iterable) -> "KnowledgeBase":
        for s in statements:
            self.add(s)
        return self

    def copy(self) -> "KnowledgeBase":
        kb = KnowledgeBase(self.prefixes)
        kb.add_all(self.tbox)
        kb.add_all(self.abox)
        return kb

    def merge(self, other: "KnowledgeBase") -> "KnowledgeBase":
        for p, ns in other.prefixes.items():
            self.prefixes.setdefault(p, ns)
        self.add_all(other.tbox)
        self.add_all(other.abox)
        return self

    def __eq__(self, other):
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return self.tbox == other.tbox and self.abox == other.abox

    __hash__ = None

    def __len__(self):
        return len(self.tbox) + len(self.abox)

    def __repr__(self):
        return f"<KnowledgeBase tbox={len(self.tbox)} abox={len(self.abox)}>"

    # -- names

    def expand(self, name: str) -> Iri:
        """Expand ``prefix:local`` (or ``<absolute>``) into an IRI."""
        if name.startswith("<") and name.endswith(">"):
            return Iri(name[1:-1])
        if name.startswith("_:"):
            return Iri(name)
        if "://" in name:
            return Iri(name)
        prefix, sep, local = name.partition(":")
        if not sep:
            raise UnknownPrefix("")
        if prefix not in self.prefixes:
            raise UnknownPrefix(prefix)
        return Iri(self.prefixes[prefix] + local)

    def compact(self, iri: Iri) -> str:
        return compact_iri(iri, self.prefixes)

    # -- tbox lookups

    def superclasses(self, c: Iri) -> set:
        return set(self._supers.get(c, ()))

    def restrictions(self, c: Iri) -> set:
        return set(self._restrictions.get(c, ()))

    def restricted_classes(self) -> list:
        return sorted(self._restrictions)

    def disjoint(self, a: Iri, b: Iri) -> bool:
        return b in self._disjoint.get(a, ())

    def disjoint_with(self, a: Iri) -> set:
        return set(self._disjoint.get(a, ()))

    def inverses(self, p: Iri) -> set:
        return set(self._inverse.get(p, ()))

    def subclass_closure(self, c: Iri) -> set:
        """Reflexive-transitive named superclasses of ``c``."""
        seen = {c}
        todo = deque([c])
        while todo:
            for sup in self._supers.get(todo.popleft(), ()):
                if sup not in seen:
                    seen.add(sup)
                    todo.append(sup)
        return seen

    def subclasses_closure(self, c: Iri) -> set:
        seen = {c}
        todo = deque([c])
        while todo:
            for sub in self._subs.get(todo.popleft(), ()):
                if sub not in seen:
                    seen.add(sub)
                    todo.append(sub)
        return seen

    def classes(self) -> set:
        """Every named class mentioned anywhere in the TBox or in a class assertion."""
        out = set(self._by_class)
        for ax in self.tbox:
            if isinstance(ax, SubClassOf):
                out.add(ax.sub)
                out.add(ax.sup if isinstance(ax.sup, Iri) else ax.sup.filler)
            elif isinstance(ax, DisjointClasses):
                out.update((ax.a, ax.b))
            elif isinstance(ax, Declaration) and ax.kind == OWL_CLASS:
                out.add(ax.iri)
        return out

    # -- abox lookups

    def individuals_of(self, c: Iri, mode: str = "direct") -> set:
        if mode == "direct":
            return set(self._by_class.get(c, ()))
        if mode not in ("inferred", "inferred-view"):
            raise ValueError(f"unknown mode {mode!r}")
        out = set()
        for sub in self.subclasses_closure(c):
            out.update(self._by_class.get(sub, ()))
        return out

    def types(self, x: Iri, mode: str = "direct") -> set:
        direct = set(self._types.get(x, ()))
        if mode == "direct":
            return direct
        out = set()
        for t in direct:
            out |= self.subclass_closure(t)
        return out

    def has_type(self, x: Iri, c: Iri) -> bool:
        return c in self._types.get(x, ())

    def objects(self, s: Iri, p: Iri) -> set:
        return {a.object for a in self._by_subject.get(s, ()) if isinstance(a, ObjectProp) and a.property == p}

    def subjects(self, p: Iri, o: Iri) -> set:
        return {a.subject for a in self._by_object.get(o, ()) if a.property == p}

    def values(self, s: Iri, p: Iri) -> set:
        return {a.value for a in self._by_subject.get(s, ()) if isinstance(a, DataProp) and a.property == p}

    def about(self, s: Iri) -> set:
        return set(self._by_subject.get(s, ()))

    def incoming(self, o: Iri) -> set:
        return set(self._by_object.get(o, ()))

    def with_property(self, p: Iri) -> set:
        return set(self._by_property.get(p, ()))

    def individuals(self) -> set:
        out = set(self._by_subject)
        out.update(self._by_object)
        return out

    def abox_sorted(self) -> list:
        return sorted(self.abox, key=assertion_key)

    def iter_edges(self) -> Iterator[ObjectProp]:
        for a in self.abox:
            if isinstance(a, ObjectProp):
                yield a

    def check_indexes(self) -> bool:
        """True iff every index entry is backed by a stored assertion and vice versa."""
        indexed = set()
        for group in self._by_subject.values():
            indexed |= group
        if indexed != self.abox:
            return False
        by_prop = set()
        for group in self._by_property.values():
            by_prop |= group
        if by_prop != self.abox:
            return False
        memberships = {ClassAssertion(x, c) for c, xs in self._by_class.items() for x in xs}
        if memberships != {a for a in self.abox if isinstance(a, ClassAssertion)}:
            return False
        typed = {ClassAssertion(x, c) for x, cs in self._types.items() for c in cs}
        incoming = set()
        for group in self._by_object.values():
            incoming |= group
        edges = {a for a in self.abox if isinstance(a, ObjectProp)}
        return typed == memberships and incoming == edges


_PN_LOCAL_RE = re.compile(r"[A-Za-z_0-9](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?\Z")


def compact_iri(iri: Iri, prefixes: dict) -> str:
    """Prefixed name if one of ``prefixes`` covers the IRI cleanly, else ``<iri>``."""
    if iri.is_blank:
        return iri.value
    best = None
    for prefix, ns in prefixes.items():
        if iri.value.startswith(ns):
            local = iri.value[len(ns):]
            if local == "" or _PN_LOCAL_RE.match(local):
                if best is None or len(ns) > len(best[1]) or (len(ns) == len(best[1]) and prefix < best[0]):
                    best = (prefix, ns, local)
    if best is None:
        return f"<{iri.value}>"
    return f"{best[0]}:{best[2]}"
