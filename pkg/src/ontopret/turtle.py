"""Parse and serialize the Turtle subset used for OntoPret schemas and scenario ABoxes.

Accepted: ``@prefix`` directives, triples with ``;`` / ``,`` continuation, the
``a`` keyword, ``rdfs:subClassOf`` / ``owl:disjointWith`` / ``owl:inverseOf``,
OWL restriction blank nodes (``owl:onProperty`` plus one of
``owl:someValuesFrom`` / ``owl:allValuesFrom``, the property optionally wrapped
as ``[ owl:inverseOf p ]``), plain strings, integers, ``true``/``false``,
``"..."^^xsd:decimal`` and ``#`` comments.  Anything else that is legal Turtle
raises :class:`UnsupportedConstruct`; anything illegal raises :class:`ParseError`.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .errors import ParseError, UnknownPrefix, UnsupportedConstruct
from .kb import (
    DECLARATION_KINDS,
    OWL,
    RDF,
    RDF_TYPE,
    RDFS,
    XSD,
    ClassAssertion,
    DataProp,
    Declaration,
    DisjointClasses,
    Existential,
    InverseExistential,
    InverseProperties,
    Iri,
    KnowledgeBase,
    Literal,
    ObjectProp,
    SubClassOf,
    Universal,
    assertion_key,
    compact_iri,
    is_abox,
    is_tbox,
)

RDFS_SUBCLASS = Iri(RDFS + "subClassOf")
OWL_DISJOINT = Iri(OWL + "disjointWith")
OWL_INVERSE = Iri(OWL + "inverseOf")
OWL_RESTRICTION = Iri(OWL + "Restriction")
OWL_ON_PROPERTY = Iri(OWL + "onProperty")
OWL_SOME = Iri(OWL + "someValuesFrom")
OWL_ALL = Iri(OWL + "allValuesFrom")
ALLOWED_RDFS_DATA = {Iri(RDFS + "label"), Iri(RDFS + "comment")}

_XSD_TYPES = {XSD + "string": "string", XSD + "integer": "integer", XSD + "decimal": "decimal", XSD + "boolean": "boolean"}


# ---------------------------------------------------------------- lexer


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    value: object = None


_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\n]*"),
    ("LONGSTRING", r'"""|\'\'\''),
    ("IRIREF", r'<([^<>"{}|^`\\\x00-\x20]*)>'),
    ("STRING", r'"((?:[^"\\\n\r]|\\.)*)"'),
    ("SQSTRING", r"'((?:[^'\\\n\r]|\\.)*)'"),
    ("DTYPE", r"\^\^"),
    ("LANGTAG", r"@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*"),
    ("BNODE", r"_:([A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)"),
    ("DOUBLE", r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)"),
    ("DECIMAL", r"[+-]?\d*\.\d+"),
    ("INTEGER", r"[+-]?\d+"),
    ("PNAME", r"((?:[A-Za-z][A-Za-z0-9_\-]*(?:\.[A-Za-z0-9_\-]+)*)?):((?:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?)"),
    ("VAR", r"[?$]([A-Za-z_][A-Za-z0-9_]*)"),
    ("WORD", r"[A-Za-z][A-Za-z0-9_]*"),
    ("PUNCT", r"[.;,\[\]()]"),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _TOKEN_SPEC))
_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(raw: str, line: int, column: int) -> str:
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = raw[i + 1]
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        elif nxt in "uU":
            width = 4 if nxt == "u" else 8
            digits = raw[i + 2:i + 2 + width]
            if len(digits) != width or not all(c in "0123456789abcdefABCDEF" for c in digits):
                raise ParseError(line, column + 1 + i, "bad unicode escape")
            out.append(chr(int(digits, 16)))
            i += 2 + width
        else:
            raise ParseError(line, column + 1 + i, f"bad escape sequence \\{nxt}")
    return "".join(out)


def tokenize(text: str, allow_vars: bool = False) -> list:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _MASTER.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            if ch == '"':
                raise ParseError(line, col, "unterminated string literal")
            raise ParseError(line, col, f"unexpected character {ch!r}")
        kind = m.lastgroup
        raw = m.group()
        if kind == "WS" or kind == "COMMENT":
            pass
        elif kind == "LONGSTRING":
            raise UnsupportedConstruct(line, col, "long (triple-quoted) string literals")
        elif kind == "SQSTRING":
            raise UnsupportedConstruct(line, col, "single-quoted string literals")
        elif kind == "STRING":
            tokens.append(Token("STRING", raw, line, col, _unescape(m.group("STRING")[1:-1], line, col)))
        elif kind == "IRIREF":
            tokens.append(Token("IRIREF", raw, line, col, raw[1:-1]))
        elif kind == "PNAME":
            prefix, _, local = raw.partition(":")
            tokens.append(Token("PNAME", raw, line, col, (prefix, local)))
        elif kind == "BNODE":
            tokens.append(Token("BNODE", raw, line, col, raw))
        elif kind == "VAR":
            if not allow_vars:
                raise ParseError(line, col, f"unexpected variable {raw!r}")
            tokens.append(Token("VAR", raw, line, col, raw[1:]))
        elif kind == "LANGTAG":
            if raw == "@prefix":
                tokens.append(Token("PREFIX", raw, line, col))
            elif raw == "@base":
                raise UnsupportedConstruct(line, col, "@base directive")
            else:
                raise UnsupportedConstruct(line, col, "language-tagged literals")
        elif kind == "WORD":
            if raw in ("a", "true", "false"):
                tokens.append(Token(raw, raw, line, col))
            elif raw.upper() in ("PREFIX", "BASE"):
                raise UnsupportedConstruct(line, col, f"SPARQL-style {raw.upper()} directive")
            elif allow_vars and raw.upper() == "FILTER":
                tokens.append(Token("FILTER", raw, line, col))
            else:
                raise ParseError(line, col, f"unexpected bare word {raw!r}")
        else:
            tokens.append(Token(kind, raw, line, col))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            line_start = pos + raw.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------- document


Statement = Union[SubClassOf, DisjointClasses, InverseProperties, Declaration, ClassAssertion, ObjectProp, DataProp]


@dataclass(eq=False)
class Document:
    prefixes: list = field(default_factory=list)
    statements: list = field(default_factory=list)

    def tbox(self) -> list:
        return [s for s in self.statements if is_tbox(s)]

    def abox(self) -> list:
        return [s for s in self.statements if is_abox(s)]

    def prefix_map(self) -> dict:
        return dict(self.prefixes)

    def __eq__(self, other):
        if not isinstance(other, Document):
            return NotImplemented
        return self.prefix_map() == other.prefix_map() and Counter(self.statements) == Counter(other.statements)

    def __len__(self):
        return len(self.statements)


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.prefixes: dict = {}
        self.doc = Document()

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect_punct(self, ch: str) -> Token:
        t = self.tok
        if t.kind == "PUNCT" and t.text == ch:
            return self.advance()
        raise ParseError(t.line, t.column, f"unexpected {self._describe(t)}", expected=repr(ch))

    def at_punct(self, ch: str) -> bool:
        return self.tok.kind == "PUNCT" and self.tok.text == ch

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == "EOF" else repr(t.text)

    # grammar
    def parse(self) -> Document:
        while self.tok.kind != "EOF":
            if self.tok.kind == "PREFIX":
                self.prefix_directive()
            else:
                self.triples()
        return self.doc

    def prefix_directive(self):
        self.advance()
        t = self.advance()
        if t.kind != "PNAME" or t.value[1] != "":
            raise ParseError(t.line, t.column, f"unexpected {self._describe(t)}", expected="prefix name ending in ':'")
        ns = self.advance()
        if ns.kind != "IRIREF":
            raise ParseError(ns.line, ns.column, f"unexpected {self._describe(ns)}", expected="<namespace IRI>")
        self.expect_punct(".")
        prefix = t.value[0]
        self.prefixes[prefix] = ns.value
        self.doc.prefixes = [(p, n) for p, n in self.doc.prefixes if p != prefix] + [(prefix, ns.value)]

    def resolve(self, t: Token) -> Iri:
        if t.kind == "IRIREF":
            return Iri(t.value)
        if t.kind == "BNODE":
            return Iri(t.value)
        prefix, local = t.value
        if prefix not in self.prefixes:
            raise UnknownPrefix(prefix, t.line, t.column)
        return Iri(self.prefixes[prefix] + local)

    def iri_term(self, what: str) -> Iri:
        t = self.tok
        if t.kind in ("IRIREF", "PNAME"):
            self.advance()
            return self.resolve(t)
        self._reject(t, what)

    def _reject(self, t: Token, what: str):
        if t.kind == "PUNCT" and t.text == "(":
            raise UnsupportedConstruct(t.line, t.column, "RDF collections")
        if t.kind == "PUNCT" and t.text == "[":
            raise UnsupportedConstruct(t.line, t.column, "blank nodes outside restriction patterns")
        raise ParseError(t.line, t.column, f"unexpected {self._describe(t)}", expected=what)

    def triples(self):
        t = self.tok
        if t.kind in ("IRIREF", "PNAME", "BNODE"):
            self.advance()
            subject = self.resolve(t)
        else:
            self._reject(t, "subject IRI")
        self.predicate_object_list(subject, t)
        self.expect_punct(".")

    def predicate_object_list(self, subject: Iri, subject_tok: Token):
        while True:
            verb_tok = self.tok
            if verb_tok.kind == "a":
                self.advance()
                verb = RDF_TYPE
            else:
                verb = self.iri_term("predicate")
            self.object_list(subject, subject_tok, verb, verb_tok)
            if not self.at_punct(";"):
                return
            while self.at_punct(";"):
                self.advance()
            if self.at_punct(".") or self.at_punct("]"):
                return

    def object_list(self, subject, subject_tok, verb, verb_tok):
        while True:
            self.statement(subject, subject_tok, verb, verb_tok)
            if not self.at_punct(","):
                return
            self.advance()

    def literal(self):
        t = self.tok
        if t.kind == "STRING":
            self.advance()
            if self.tok.kind == "DTYPE":
                self.advance()
                dt_tok = self.tok
                dt = self.iri_term("datatype IRI")
                kind = _XSD_TYPES.get(dt.value)
                if kind is None:
                    raise UnsupportedConstruct(dt_tok.line, dt_tok.column, f"datatype {dt.value}")
                try:
                    return Literal(t.value, kind)
                except ValueError as exc:
                    raise ParseError(t.line, t.column, str(exc)) from None
            return Literal(t.value, "string")
        if t.kind == "INTEGER":
            self.advance()
            return Literal(t.text, "integer")
        if t.kind in ("true", "false"):
            self.advance()
            return Literal(t.kind, "boolean")
        if t.kind == "DECIMAL":
            raise UnsupportedConstruct(t.line, t.column, "bare decimal literals (write \"...\"^^xsd:decimal)")
        if t.kind == "DOUBLE":
            raise UnsupportedConstruct(t.line, t.column, "double literals")
        return None

    def statement(self, subject, subject_tok, verb, verb_tok):
        t = self.tok
        blank_subject = subject.is_blank
        if verb == RDFS_SUBCLASS:
            if blank_subject:
                raise UnsupportedConstruct(subject_tok.line, subject_tok.column, "blank-node subject in a TBox axiom")
            if self.at_punct("["):
                sup = self.restriction()
            else:
                sup = self.iri_term("class IRI or restriction")
            self.doc.statements.append(SubClassOf(subject, sup))
            return
        if verb in (OWL_DISJOINT, OWL_INVERSE):
            if blank_subject:
                raise UnsupportedConstruct(subject_tok.line, subject_tok.column, "blank-node subject in a TBox axiom")
            obj = self.iri_term("named class or property")
            cls = DisjointClasses if verb == OWL_DISJOINT else InverseProperties
            self.doc.statements.append(cls(subject, obj))
            return
        if verb == RDF_TYPE:
            obj = self.iri_term("class IRI")
            if obj in DECLARATION_KINDS:
                if blank_subject:
                    raise UnsupportedConstruct(subject_tok.line, subject_tok.column, "blank-node subject in a declaration")
                self.doc.statements.append(Declaration(subject, obj))
            elif obj.value.startswith(OWL):
                raise UnsupportedConstruct(t.line, t.column, f"rdf:type {obj.value}")
            else:
                self.doc.statements.append(ClassAssertion(subject, obj))
            return
        if verb.value.startswith(OWL) or (verb.value.startswith(RDFS) and verb not in ALLOWED_RDFS_DATA) or verb.value.startswith(RDF):
            raise UnsupportedConstruct(verb_tok.line, verb_tok.column, f"predicate {verb.value}")
        lit = self.literal()
        if lit is not None:
            self.doc.statements.append(DataProp(subject, verb, lit))
            return
        if t.kind == "BNODE":
            self.advance()
            self.doc.statements.append(ObjectProp(subject, verb, self.resolve(t)))
            return
        obj = self.iri_term("object")
        self.doc.statements.append(ObjectProp(subject, verb, obj))

    def restriction(self):
        open_tok = self.expect_punct("[")
        prop = None
        inverse = False
        fillers = []
        while not self.at_punct("]"):
            vt = self.tok
            if vt.kind == "a":
                self.advance()
                kind = self.iri_term("owl:Restriction")
                if kind != OWL_RESTRICTION:
                    raise UnsupportedConstruct(vt.line, vt.column, f"blank node typed {kind.value}")
            else:
                verb = self.iri_term("restriction predicate")
                if verb == OWL_ON_PROPERTY:
                    if prop is not None:
                        raise UnsupportedConstruct(vt.line, vt.column, "restriction with several owl:onProperty")
                    if self.at_punct("["):
                        self.advance()
                        inner = self.iri_term("owl:inverseOf")
                        if inner != OWL_INVERSE:
                            raise UnsupportedConstruct(vt.line, vt.column, "property expression other than owl:inverseOf")
                        prop = self.iri_term("property IRI")
                        inverse = True
                        self.expect_punct("]")
                    else:
                        prop = self.iri_term("property IRI")
                elif verb in (OWL_SOME, OWL_ALL):
                    ft = self.tok
                    if self.at_punct("["):
                        raise UnsupportedConstruct(ft.line, ft.column, "nested class expressions in a restriction")
                    fillers.append((verb, self.iri_term("filler class IRI")))
                else:
                    raise UnsupportedConstruct(vt.line, vt.column, f"restriction predicate {verb.value}")
            if self.at_punct(";"):
                while self.at_punct(";"):
                    self.advance()
            elif not self.at_punct("]"):
                t = self.tok
                raise ParseError(t.line, t.column, f"unexpected {self._describe(t)}", expected="';' or ']'")
        self.expect_punct("]")
        if prop is None or len(fillers) != 1:
            raise UnsupportedConstruct(
                open_tok.line, open_tok.column,
                "restriction needs owl:onProperty and exactly one of owl:someValuesFrom / owl:allValuesFrom",
            )
        kind, filler = fillers[0]
        if kind == OWL_SOME:
            return InverseExistential(prop, filler) if inverse else Existential(prop, filler)
        if inverse:
            raise UnsupportedConstruct(open_tok.line, open_tok.column, "universal restriction on an inverse property")
        return Universal(prop, filler)


def parse(text: str) -> Document:
    """Parse Turtle text into a :class:`Document`, preserving statement order."""
    if text.startswith("\ufeff"):
        text = text[1:]
    return _Parser(text).parse()


# ---------------------------------------------------------------- serializer


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")


def _term(term, prefixes) -> str:
    if isinstance(term, Iri):
        return compact_iri(term, prefixes)
    if term.datatype == "string":
        return f'"{_escape(term.lexical)}"'
    if term.datatype in ("integer", "boolean"):
        return term.lexical
    return f'"{term.lexical}"^^{compact_iri(Iri(XSD + term.datatype), prefixes)}'


def _restriction(expr, prefixes) -> str:
    t = lambda x: _term(x, prefixes)  # noqa: E731
    if isinstance(expr, InverseExistential):
        prop = f"[ {t(OWL_INVERSE)} {t(expr.property)} ]"
    else:
        prop = t(expr.property)
    which = OWL_ALL if isinstance(expr, Universal) else OWL_SOME
    return f"[ a {t(OWL_RESTRICTION)} ; {t(OWL_ON_PROPERTY)} {prop} ; {t(which)} {t(expr.filler)} ]"


def statement_line(st, prefixes) -> str:
    t = lambda x: _term(x, prefixes)  # noqa: E731
    if isinstance(st, SubClassOf):
        sup = t(st.sup) if isinstance(st.sup, Iri) else _restriction(st.sup, prefixes)
        return f"{t(st.sub)} {t(RDFS_SUBCLASS)} {sup} ."
    if isinstance(st, DisjointClasses):
        return f"{t(st.a)} {t(OWL_DISJOINT)} {t(st.b)} ."
    if isinstance(st, InverseProperties):
        return f"{t(st.p)} {t(OWL_INVERSE)} {t(st.q)} ."
    if isinstance(st, Declaration):
        return f"{t(st.iri)} a {t(st.kind)} ."
    if isinstance(st, ClassAssertion):
        return f"{t(st.individual)} a {t(st.concept)} ."
    s, p, o = st.triple()
    return f"{t(s)} {t(p)} {t(o)} ."


def serialize(doc: Document) -> str:
    """Deterministic text: prefixes, TBox by subject, ABox by (subject, predicate, object)."""
    prefixes = doc.prefix_map()
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in doc.prefixes]
    tbox = sorted(((st.subject.value, statement_line(st, prefixes)) for st in doc.tbox()))
    abox = sorted(doc.abox(), key=assertion_key)
    if tbox:
        lines.append("")
        lines.extend(line for _, line in tbox)
    if abox:
        lines.append("")
        lines.extend(statement_line(st, prefixes) for st in abox)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- KB bridge


def load_kb(doc: Union[Document, str]) -> KnowledgeBase:
    """KnowledgeBase holding exactly the document's axioms and assertions.

    Text is parsed first; :class:`UnknownPrefix` surfaces from there with the
    position of the offending name.
    """
    if isinstance(doc, str):
        doc = parse(doc)
    kb = KnowledgeBase(prefixes=doc.prefix_map())
    kb.add_all(doc.statements)
    return kb


def document_from_kb(kb: KnowledgeBase, tbox: bool = True, abox: bool = True) -> Document:
    statements = []
    if tbox:
        statements.extend(kb.tbox)
    if abox:
        statements.extend(kb.abox)
    return Document(prefixes=list(kb.prefixes.items()), statements=statements)


def dumps_kb(kb: KnowledgeBase, tbox: bool = True, abox: bool = True) -> str:
    return serialize(document_from_kb(kb, tbox=tbox, abox=abox))


def read_kb(path) -> KnowledgeBase:
    return load_kb(Path(path).read_text(encoding="utf-8"))


def write_kb(kb: KnowledgeBase, path, tbox: bool = True, abox: bool = True):
    Path(path).write_text(dumps_kb(kb, tbox=tbox, abox=abox), encoding="utf-8", newline="\n")
