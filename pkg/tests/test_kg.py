import itertools

import pytest

from dtd.kg import (
    NonGroundTripleError,
    ParseError,
    State,
    TBoxAxiom,
    match_pattern,
    merge,
    parse_ontology,
    serialize_ontology,
)
from dtd.kg.ontology import DISJOINT, SUBCLASS, disjoint, subclass
from dtd.kg.terms import (
    SKOLEM_NS,
    TIME_VAR,
    TYPE,
    TermKind,
    Triple,
    fresh_skolem,
    iri,
    literal,
    var,
)

from conftest import CORPUS
from helpers import PREFIX, ex, onto, t
from oracles import brute_force_match


def test_subclass_axiom_parsed():
    o = onto(":EligibleBank rdfs:subClassOf :Human .")
    assert o.tbox == frozenset({subclass(ex("EligibleBank"), ex("Human"))})
    assert {ex("EligibleBank"), ex("Human")} <= o.classes


def test_empty_text_gives_empty_ontology():
    o = parse_ontology("")
    assert not o.tbox and not o.abox.triples and not o.time_points


def test_unknown_prefix_rejected():
    with pytest.raises(ParseError) as err:
        parse_ontology(":a rdf:type :B .")
    assert err.value.line == 1


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as err:
        parse_ontology(PREFIX + ":a :p \n :b :c .")
    assert err.value.line >= 6 and err.value.column > 0


def test_duplicate_declaration_rejected():
    with pytest.raises(ParseError, match="declar"):
        onto(":A rdf:type owl:Class .\n:A rdf:type owl:Class .")


def test_class_property_conflict_rejected():
    with pytest.raises(ParseError):
        onto(":A rdf:type owl:Class .\n:A rdf:type owl:ObjectProperty .")


def test_reserved_namespace_rejected():
    with pytest.raises(ParseError):
        parse_ontology(f"<{SKOLEM_NS}1> <urn:x:p> <urn:x:o> .")


def test_disjointness_is_symmetric_on_query():
    o = onto(":A owl:disjointWith :B .")
    assert o.has_axiom(disjoint(ex("A"), ex("B")))
    assert o.has_axiom(disjoint(ex("B"), ex("A")))
    assert not o.has_axiom(subclass(ex("A"), ex("B")))


def test_time_points_and_transitive_marker():
    o = onto(":t0 a dtd:TimePoint .\n:t1 a dtd:TimePoint .\n:p a owl:TransitiveProperty .")
    assert o.time_points == frozenset({ex("t0"), ex("t1")})
    assert any(ax.kind == "transitiveProperty" for ax in o.tbox)


def test_semicolon_and_comma_abbreviations():
    o = onto(":a :p :b , :c ; :q :d .")
    assert o.abox.triples == {t("a", "p", "b"), t("a", "p", "c"), t("a", "q", "d")}


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*/*.ttl")), ids=lambda p: f"{p.parent.name}/{p.name}")
def test_round_trip_corpus_files(path):
    base = {}
    if path.name != "ontology.ttl":
        base = parse_ontology((path.parent / "ontology.ttl").read_text()).prefixes
    first = parse_ontology(path.read_text(), prefixes=base)
    again = parse_ontology(serialize_ontology(first))
    assert again.tbox == first.tbox
    assert again.abox.triples == first.abox.triples
    assert again.time_points == first.time_points


def test_term_ordering_is_total_and_kind_first():
    terms = [var("?z"), literal("x"), iri("urn:b"), iri("urn:a"), fresh_skolem()]
    ordered = sorted(terms)
    assert [x.kind for x in ordered] == sorted(x.kind for x in ordered)
    assert ordered[0] == iri("urn:a")


def test_skolems_are_fresh_and_reserved():
    a, b = fresh_skolem(), fresh_skolem()
    assert a != b and a.kind is TermKind.SKOLEM
    assert a.lexical.startswith(SKOLEM_NS)


def test_time_variable_name():
    assert TIME_VAR == var("?_T")
    assert var("x").lexical == "?x"


# -- matching --

STATE3 = State(frozenset({t("a", "p", "b"), t("b", "p", "c"), t("a", "q", "c")}))


def _as_sets(bindings):
    return {frozenset(b.items()) for b in bindings}


def test_empty_conjunction_gives_one_binding():
    assert match_pattern(STATE3, []) == [{}]


def test_any_pattern_over_empty_state():
    assert match_pattern(State(frozenset()), [t("?x", "p", "?y")]) == []


def test_three_triples_two_vars_against_oracle():
    pats = [t("?x", "p", "?y")]
    assert _as_sets(match_pattern(STATE3, pats)) == brute_force_match(STATE3.triples, pats)


def test_join_and_negation_against_oracle():
    pats = [t("?x", "p", "?y"), t("?y", "p", "?z")]
    assert _as_sets(match_pattern(STATE3, pats)) == brute_force_match(STATE3.triples, pats)
    neg = [[t("?x", "q", "?w")]]
    got = match_pattern(STATE3, [t("?x", "p", "?y")], neg)
    assert _as_sets(got) == brute_force_match(STATE3.triples, [t("?x", "p", "?y")], neg)
    assert got == [{var("?x"): ex("b"), var("?y"): ex("c")}]


def test_bindings_sorted_deterministically():
    got = match_pattern(STATE3, [t("?x", "?p", "?y")])
    keys = [tuple(sorted(b.items())) for b in got]
    assert keys == sorted(keys)


def test_variable_predicate_and_repeated_variable():
    s = State(frozenset({t("a", "p", "a"), t("a", "p", "b")}))
    assert match_pattern(s, [t("?x", "p", "?x")]) == [{var("?x"): ex("a")}]


def test_initial_binding_restricts():
    got = match_pattern(STATE3, [t("?x", "p", "?y")], initial={var("?x"): ex("b")})
    assert got == [{var("?x"): ex("b"), var("?y"): ex("c")}]


# -- merge --

def test_merge_identity_and_idempotence():
    assert merge(STATE3, set()) == STATE3
    assert len(merge(STATE3, {t("a", "p", "b")})) == len(STATE3)


def test_merge_does_not_mutate():
    before = set(STATE3.triples)
    new = merge(STATE3, {t("z", "p", "z")})
    assert STATE3.triples == before and t("z", "p", "z") in new


def test_merge_rejects_non_ground():
    with pytest.raises(NonGroundTripleError):
        merge(STATE3, {t("?x", "p", "b")})


def test_merge_associates():
    a, b = {t("x", "p", "y")}, {t("y", "p", "z")}
    assert merge(merge(STATE3, a), b) == merge(STATE3, a | b)
