"""TBox axioms, ontologies, and the Turtle-subset ontology text format."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from dtd.kg.state import State
from dtd.kg.syntax import ParseError, TokenStream, tokenize
from dtd.kg.terms import (
    COMPLEMENT_OF,
    DISJOINT_WITH,
    DOMAIN,
    OWL_CLASS,
    OWL_DATATYPE_PROPERTY,
    OWL_OBJECT_PROPERTY,
    OWL_TRANSITIVE,
    RANGE,
    RDFS_CLASS,
    STANDARD_PREFIXES,
    SUBCLASS_OF,
    SUBPROPERTY_OF,
    TIME_POINT,
    TYPE,
    Term,
    TermKind,
    Triple,
    render,
)

SUBCLASS = "subClassOf"
DISJOINT = "disjointWith"
COMPLEMENT = "complementOf"
DOMAIN_AX = "domain"
RANGE_AX = "range"
SUBPROPERTY = "subPropertyOf"
TRANSITIVE = "transitiveProperty"

AXIOM_KINDS = (SUBCLASS, DISJOINT, COMPLEMENT, DOMAIN_AX, RANGE_AX, SUBPROPERTY, TRANSITIVE)
SYMMETRIC_KINDS = (DISJOINT, COMPLEMENT)

_AXIOM_PREDICATES = {
    SUBCLASS_OF: SUBCLASS,
    DISJOINT_WITH: DISJOINT,
    COMPLEMENT_OF: COMPLEMENT,
    DOMAIN: DOMAIN_AX,
    RANGE: RANGE_AX,
    SUBPROPERTY_OF: SUBPROPERTY,
}
_KIND_PREDICATES = {v: k for k, v in _AXIOM_PREDICATES.items()}

# operand roles per axiom kind: "c" class, "p" property
_ROLES = {
    SUBCLASS: "cc",
    DISJOINT: "cc",
    COMPLEMENT: "cc",
    DOMAIN_AX: "pc",
    RANGE_AX: "pc",
    SUBPROPERTY: "pp",
    TRANSITIVE: "p",
}

_CLASS_DECLS = (OWL_CLASS, RDFS_CLASS)
_PROPERTY_DECLS = (OWL_OBJECT_PROPERTY, OWL_DATATYPE_PROPERTY)


@dataclass(frozen=True, order=True)
class TBoxAxiom:
    kind: str
    operands: Tuple[Term, ...]

    def __post_init__(self) -> None:
        if self.kind not in AXIOM_KINDS:
            raise ValueError(f"unknown axiom kind {self.kind!r}")
        if len(self.operands) != len(_ROLES[self.kind]):
            raise ValueError(f"{self.kind} takes {len(_ROLES[self.kind])} operand(s)")

    @property
    def symmetric(self) -> bool:
        return self.kind in SYMMETRIC_KINDS

    def normalized(self) -> "TBoxAxiom":
        """Canonical operand order for symmetric axioms."""
        if self.symmetric:
            return TBoxAxiom(self.kind, tuple(sorted(self.operands)))
        return self

    def entails(self, other: "TBoxAxiom") -> bool:
        return self.normalized() == other.normalized()

    def render(self, prefixes: Optional[Mapping[str, str]] = None) -> str:
        if self.kind == TRANSITIVE:
            return f"{render(self.operands[0], prefixes)} rdf:type owl:TransitiveProperty"
        pred = render(_KIND_PREDICATES[self.kind], prefixes)
        return f"{render(self.operands[0], prefixes)} {pred} {render(self.operands[1], prefixes)}"

    def __str__(self) -> str:
        return self.render()


def subclass(a: Term, b: Term) -> TBoxAxiom:
    return TBoxAxiom(SUBCLASS, (a, b))


def disjoint(a: Term, b: Term) -> TBoxAxiom:
    return TBoxAxiom(DISJOINT, (a, b))


@dataclass(frozen=True)
class Ontology:
    tbox: FrozenSet[TBoxAxiom] = frozenset()
    abox: State = field(default_factory=State)
    time_points: FrozenSet[Term] = frozenset()
    classes: FrozenSet[Term] = frozenset()
    properties: FrozenSet[Term] = frozenset()
    prefixes: Mapping[str, str] = field(default_factory=lambda: dict(STANDARD_PREFIXES), compare=False, hash=False)

    def has_axiom(self, axiom: TBoxAxiom) -> bool:
        """Membership test that honours symmetry of disjointWith/complementOf."""
        return any(a.entails(axiom) for a in self.tbox)

    def axioms(self, kind: str) -> List[TBoxAxiom]:
        return sorted(a for a in self.tbox if a.kind == kind)

    def with_abox(self, abox: State) -> "Ontology":
        points = frozenset(t.subject for t in abox if t.predicate == TYPE and t.object == TIME_POINT)
        return Ontology(self.tbox, abox, points, self.classes, self.properties, self.prefixes)

    def extend(self, other: "Ontology") -> "Ontology":
        """Union of two ontologies (used to layer task-specific ABox files)."""
        prefixes = dict(self.prefixes)
        prefixes.update(other.prefixes)
        abox = State(self.abox.triples | other.abox.triples)
        return Ontology(
            self.tbox | other.tbox,
            abox,
            self.time_points | other.time_points,
            self.classes | other.classes,
            self.properties | other.properties,
            prefixes,
        )


class _Declarations:
    def __init__(self, source: str) -> None:
        self.roles: Dict[Term, str] = {}
        self.explicit: set = set()
        self.source = source

    def declare(self, term: Term, role: str, tok, explicit: bool) -> None:
        if term.kind is not TermKind.IRI:
            raise ParseError(f"{render(term)} cannot be declared as a {_role_name(role)}", tok.line, tok.column, self.source)
        prior = self.roles.get(term)
        if explicit:
            if term in self.explicit:
                raise ParseError(f"duplicate declaration of {render(term)}", tok.line, tok.column, self.source)
            self.explicit.add(term)
        if prior is not None and prior != role:
            raise ParseError(
                f"{render(term)} declared as both class and property", tok.line, tok.column, self.source
            )
        self.roles[term] = role


def _role_name(role: str) -> str:
    return "class" if role == "c" else "property"


def parse_ontology(text: str, source: str = "", prefixes: Optional[Mapping[str, str]] = None) -> Ontology:
    """Parse the Turtle-subset ontology format.

    Raises ParseError (with line/column) on syntax errors, unknown prefixes,
    and duplicate or conflicting declarations.
    """
    base = dict(STANDARD_PREFIXES)
    base.update(prefixes or {})
    stream = TokenStream(tokenize(text, source), base, source)
    decls = _Declarations(source)
    tbox: set = set()
    abox: set = set()
    points: set = set()
    while not stream.at_end():
        if stream.prefix_directive():
            continue
        for triple, tok in stream.triples_block(allow_vars=False, allow_bnodes=False, stop=()):
            s, p, o = triple
            if p == TYPE and o in _CLASS_DECLS:
                decls.declare(s, "c", tok, explicit=True)
            elif p == TYPE and o in _PROPERTY_DECLS:
                decls.declare(s, "p", tok, explicit=True)
            elif p == TYPE and o == OWL_TRANSITIVE:
                decls.declare(s, "p", tok, explicit=False)
                tbox.add(TBoxAxiom(TRANSITIVE, (s,)))
            elif p in _AXIOM_PREDICATES:
                kind = _AXIOM_PREDICATES[p]
                for operand, role in zip((s, o), _ROLES[kind]):
                    decls.declare(operand, role, tok, explicit=False)
                tbox.add(TBoxAxiom(kind, (s, o)))
            else:
                if s.kind is TermKind.LITERAL:
                    raise ParseError("literal in subject position", tok.line, tok.column, source)
                abox.add(triple)
                if p == TYPE and o == TIME_POINT:
                    points.add(s)
    classes = frozenset(t for t, r in decls.roles.items() if r == "c")
    properties = frozenset(t for t, r in decls.roles.items() if r == "p")
    return Ontology(frozenset(tbox), State(frozenset(abox)), frozenset(points), classes, properties, stream.prefixes)


def serialize_ontology(ontology: Ontology) -> str:
    prefixes = ontology.prefixes
    lines: List[str] = []
    for name in sorted(prefixes):
        lines.append(f"@prefix {name}: <{prefixes[name]}> .")
    lines.append("")
    for c in sorted(ontology.classes):
        lines.append(f"{render(c, prefixes)} rdf:type owl:Class .")
    for p in sorted(ontology.properties):
        lines.append(f"{render(p, prefixes)} rdf:type owl:ObjectProperty .")
    lines.append("")
    for ax in sorted(ontology.tbox):
        lines.append(ax.render(prefixes) + " .")
    lines.append("")
    for t in ontology.abox.sorted():
        lines.append(f"{render(t.subject, prefixes)} {render(t.predicate, prefixes)} {render(t.object, prefixes)} .")
    return "\n".join(lines) + "\n"
