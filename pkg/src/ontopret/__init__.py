"""Knowledge-representation engine for interpreting human behavior in human-machine interaction."""

__version__ = "0.1.0"

from .kb import (  # noqa: E402
    OP,
    ClassAssertion,
    DataProp,
    DisjointClasses,
    Existential,
    InverseExistential,
    InverseProperties,
    Iri,
    KnowledgeBase,
    Literal,
    Namespace,
    ObjectProp,
    SubClassOf,
    Universal,
)
from .reasoner import check_consistency, explain, is_entailed, materialize  # noqa: E402
from .schema import build_tbox, module_tags, validate_schema  # noqa: E402
from .turtle import load_kb, parse, serialize  # noqa: E402

__all__ = [
    "OP", "ClassAssertion", "DataProp", "DisjointClasses", "Existential", "InverseExistential",
    "InverseProperties", "Iri", "KnowledgeBase", "Literal", "Namespace", "ObjectProp", "SubClassOf",
    "Universal", "check_consistency", "explain", "is_entailed", "materialize", "build_tbox",
    "module_tags", "validate_schema", "load_kb", "parse", "serialize",
]
