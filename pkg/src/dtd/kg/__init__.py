"""Knowledge-graph substrate: terms, triples, states, patterns, ontologies."""

from dtd.kg.ontology import (
    AXIOM_KINDS,
    COMPLEMENT,
    DISJOINT,
    DOMAIN_AX,
    RANGE_AX,
    SUBCLASS,
    SUBPROPERTY,
    TRANSITIVE,
    Ontology,
    TBoxAxiom,
    parse_ontology,
    serialize_ontology,
)
from dtd.kg.state import Binding, NonGroundTripleError, State, embeds, match_pattern, merge
from dtd.kg.syntax import ParseError
from dtd.kg.terms import Term, TermKind, Triple, bnode, iri, literal, var

__all__ = [
    "AXIOM_KINDS",
    "Binding",
    "COMPLEMENT",
    "DISJOINT",
    "DOMAIN_AX",
    "NonGroundTripleError",
    "Ontology",
    "ParseError",
    "RANGE_AX",
    "SUBCLASS",
    "SUBPROPERTY",
    "State",
    "TBoxAxiom",
    "TRANSITIVE",
    "Term",
    "TermKind",
    "Triple",
    "bnode",
    "embeds",
    "iri",
    "literal",
    "match_pattern",
    "merge",
    "parse_ontology",
    "serialize_ontology",
    "var",
]
