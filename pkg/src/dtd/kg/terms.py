"""Terms and triples: the atoms of every graph and pattern."""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, Iterable, Mapping, NamedTuple, Optional

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"
DTD = "urn:dtd:ns#"

# Reserved namespaces for engine-minted individuals; parsers refuse them.
SKOLEM_NS = "urn:dtd:skolem:"
PLAN_NS = "urn:dtd:plan:"
RESERVED_NAMESPACES = (SKOLEM_NS, PLAN_NS)

STANDARD_PREFIXES: Dict[str, str] = {
    "rdf": RDF,
    "rdfs": RDFS,
    "owl": OWL,
    "xsd": XSD,
    "dtd": DTD,
}

TIME_VARIABLE_NAME = "?_T"


class TermKind(IntEnum):
    IRI = 0
    SKOLEM = 1
    LITERAL = 2
    VARIABLE = 3
    BNODE = 4  # fresh-individual placeholder, CONSTRUCT templates only


@dataclass(frozen=True, order=True)
class Term:
    kind: TermKind
    lexical: str
    datatype: str = ""

    @property
    def is_variable(self) -> bool:
        return self.kind is TermKind.VARIABLE

    @property
    def is_ground(self) -> bool:
        return self.kind not in (TermKind.VARIABLE, TermKind.BNODE)

    @property
    def is_literal(self) -> bool:
        return self.kind is TermKind.LITERAL

    @property
    def is_skolem(self) -> bool:
        return self.kind is TermKind.SKOLEM

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"Term({render(self)})"


def iri(value: str) -> Term:
    return Term(TermKind.IRI, value)


def literal(value: str, datatype: str = "") -> Term:
    return Term(TermKind.LITERAL, value, datatype)


def var(name: str) -> Term:
    if not name.startswith("?"):
        name = "?" + name
    return Term(TermKind.VARIABLE, name)


def bnode(label: str) -> Term:
    return Term(TermKind.BNODE, label)


class Triple(NamedTuple):
    subject: Term
    predicate: Term
    object: Term

    @property
    def is_ground(self) -> bool:
        return self.subject.is_ground and self.predicate.is_ground and self.object.is_ground

    def variables(self) -> Iterable[Term]:
        return (t for t in self if t.is_variable)

    def substitute(self, binding: Mapping[Term, Term]) -> "Triple":
        return Triple(*(binding.get(t, t) for t in self))

    def __str__(self) -> str:
        return f"{render(self.subject)} {render(self.predicate)} {render(self.object)} ."


# Vocabulary
TYPE = iri(RDF + "type")
SUBCLASS_OF = iri(RDFS + "subClassOf")
SUBPROPERTY_OF = iri(RDFS + "subPropertyOf")
DOMAIN = iri(RDFS + "domain")
RANGE = iri(RDFS + "range")
RDFS_CLASS = iri(RDFS + "Class")
OWL_CLASS = iri(OWL + "Class")
OWL_OBJECT_PROPERTY = iri(OWL + "ObjectProperty")
OWL_DATATYPE_PROPERTY = iri(OWL + "DatatypeProperty")
OWL_TRANSITIVE = iri(OWL + "TransitiveProperty")
DISJOINT_WITH = iri(OWL + "disjointWith")
COMPLEMENT_OF = iri(OWL + "complementOf")
XSD_DATETIME = XSD + "dateTime"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"

TIME_POINT = iri(DTD + "TimePoint")
BEFORE = iri(DTD + "before")
NEXT = iri(DTD + "next")
AT_DATETIME = iri(DTD + "atDateTime")
HAS_TIME = iri(DTD + "hasTime")
HAS_START = iri(DTD + "hasStart")
HAS_END = iri(DTD + "hasEnd")
AGENT = iri(DTD + "agent")
TIME_RELATIONS = frozenset({HAS_TIME, HAS_START, HAS_END})
TIME_VAR = var(TIME_VARIABLE_NAME)


class SkolemRegistry:
    """Mints globally fresh skolem individuals; safe to share across threads."""

    def __init__(self) -> None:
        self._counter = itertools.count(1)
        self._lock = threading.Lock()
        self._issued: set = set()

    def fresh(self) -> Term:
        with self._lock:
            term = Term(TermKind.SKOLEM, f"{SKOLEM_NS}{next(self._counter)}")
            self._issued.add(term)
        return term

    def issued(self) -> frozenset:
        with self._lock:
            return frozenset(self._issued)


SKOLEMS = SkolemRegistry()


def fresh_skolem() -> Term:
    return SKOLEMS.fresh()


def skolem_number(term: Term) -> int:
    return int(term.lexical[len(SKOLEM_NS):])


def compact(value: str, prefixes: Optional[Mapping[str, str]] = None) -> str:
    prefixes = STANDARD_PREFIXES if prefixes is None else prefixes
    best = None
    for prefix, ns in prefixes.items():
        if value.startswith(ns) and len(value) > len(ns):
            local = value[len(ns):]
            if _is_local_name(local) and (best is None or len(ns) > len(best[1])):
                best = (prefix, ns, local)
    if best is None:
        return f"<{value}>"
    return f"{best[0]}:{best[2]}"


def _is_local_name(local: str) -> bool:
    return all(c.isalnum() or c in "_-." for c in local) and not local.endswith(".")


def render(term: Term, prefixes: Optional[Mapping[str, str]] = None) -> str:
    if term.kind is TermKind.IRI:
        if term.lexical.startswith(PLAN_NS):
            return "plan:" + term.lexical[len(PLAN_NS):]
        return compact(term.lexical, prefixes)
    if term.kind is TermKind.SKOLEM:
        return f"_:sk{skolem_number(term)}"
    if term.kind is TermKind.LITERAL:
        text = '"' + term.lexical.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
        if term.datatype:
            text += "^^" + compact(term.datatype, prefixes)
        return text
    if term.kind is TermKind.BNODE:
        return f"_:{term.lexical}"
    return term.lexical


def local_name(term: Term) -> str:
    text = term.lexical
    for sep in ("#", "/", ":"):
        if sep in text:
            text = text.rsplit(sep, 1)[1]
    return text
