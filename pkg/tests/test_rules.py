import pytest

from dtd.kg import ParseError, State
from dtd.kg.terms import TIME_VAR, TermKind, Triple, bnode, iri, var
from dtd.reasoner import materialize
from dtd.rules import (
    MISSING_TIME,
    UNSAFE,
    RuleError,
    RuleFiring,
    apply_firing,
    find_firings,
    parse_rules,
    serialize_rules,
    validate_rule,
    validate_rules,
)

from conftest import scenario
from dtd.scenario import corpus_names
from helpers import ex, onto, rules, t
from oracles import brute_force_match

BANK_NS = "http://example.org/bank#"


def b(name):
    return iri(BANK_NS + name)


def _bank_rule(bank, name):
    return next(r for r in bank.rules if r.name == name)


def test_no_credit_rule_split(bank):
    r = _bank_rule(bank, "OpeningB_acc_no_credit")
    x, p, o, l = var("?x"), var("?p"), var("?o"), var("?l")
    TYPE = iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
    assert {Triple(x, TYPE, b("EligibleBank")), Triple(x, b("holds"), p), Triple(p, TYPE, b("ProofAddress"))} <= set(r.prerequisites)
    assert r.negatives == ((Triple(x, b("holds"), l), Triple(l, TYPE, b("Letter"))),)
    ph = bnode("b")
    assert set(r.effects) == {Triple(ph, TYPE, b("B_acc")), Triple(x, b("holds"), ph), Triple(ph, TYPE, b("B_acc_no_credit"))}
    assert r.action_var == o and r.agent_var == x and r.action == b("OpeningB_acc")


def test_empty_rules_text():
    assert parse_rules("") == []


def test_duplicate_rule_name():
    text = "RULE r ACTION <urn:A> CONSTRUCT { ?a <urn:p> ?a } WHERE { ?a <urn:hasTime> ?_T }\n"
    with pytest.raises(ParseError, match="duplicate"):
        parse_rules(text * 2)


def test_syntax_error_reports_line():
    with pytest.raises(ParseError) as err:
        parse_rules("RULE r ACTION <urn:A>\nCONSTRUCT { ?a <urn:p> ?a }\nWERE { }")
    assert err.value.line == 3


@pytest.mark.parametrize("name", corpus_names())
def test_rules_round_trip(name):
    sc = scenario(name)
    again = parse_rules(serialize_rules(sc.rules, sc.prefixes))
    assert again == sc.rules


def test_missing_time_binding():
    r = rules("RULE r ACTION :A CONSTRUCT { ?x :p ?x . } WHERE { ?x a :B . }")[0]
    assert [v.kind for v in validate_rule(r)] == [MISSING_TIME]


def test_unsafe_variable():
    r = rules("RULE r ACTION :A CONSTRUCT { ?x :p ?z . } WHERE { ?a dtd:hasTime ?_T . ?a dtd:agent ?x . }")[0]
    vs = validate_rule(r)
    assert [v.kind for v in vs] == [UNSAFE] and "?z" in vs[0].detail


def test_start_and_end_relations_accepted():
    rs = rules(
        "RULE s ACTION :A CONSTRUCT { ?a :p :q . } WHERE { ?a dtd:hasStart ?_T . }\n"
        "RULE e ACTION :A CONSTRUCT { ?a :p :q . } WHERE { ?a dtd:hasEnd ?_T . }"
    )
    assert validate_rules(rs) == []


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_rules_valid(name):
    assert validate_rules(scenario(name).rules) == []


def _bank_state(bank, with_letter=False):
    o = bank.ontology_for(bank.task("project"))
    extra = set()
    if with_letter:
        extra = {Triple(b("a"), b("holds"), b("l")), Triple(b("l"), iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), b("Letter"))}
    return o, materialize(State(o.abox.triples | extra), o)


def test_bank_firing_at_t0(bank):
    o, inf = _bank_state(bank)
    fs = find_firings(inf, bank.rules, b("t0"))
    assert [f.rule.name for f in fs] == ["OpeningB_acc_no_credit"]
    assert fs[0].binding[var("?x")] == b("a") and fs[0].binding[TIME_VAR] == b("t0")


def test_no_action_no_firing(bank):
    o, inf = _bank_state(bank)
    assert find_firings(inf, bank.rules, b("t1")) == []


def test_letter_switches_rule(bank):
    o, inf = _bank_state(bank, with_letter=True)
    fs = find_firings(inf, bank.rules, b("t0"))
    assert [f.rule.name for f in fs] == ["OpeningB_acc_credit"]
    for rule in bank.rules:
        seed = {TIME_VAR: b("t0")}
        got = {frozenset(f.binding.items()) for f in fs if f.rule is rule}
        pos = [Triple(*(seed.get(x, x) for x in tr)) for tr in rule.prerequisites]
        neg = [[Triple(*(seed.get(x, x) for x in tr)) for tr in g] for g in rule.negatives]
        expected = {frozenset(set(s) | set(seed.items())) for s in brute_force_match(inf.view.triples, pos, neg)}
        assert got == expected


def test_apply_no_credit(bank):
    o, inf = _bank_state(bank)
    (f,) = find_firings(inf, bank.rules, b("t0"))
    out = apply_firing(f)
    (sk,) = f.skolems.values()
    TYPE = iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
    assert out == {Triple(sk, TYPE, b("B_acc")), Triple(b("a"), b("holds"), sk), Triple(sk, TYPE, b("B_acc_no_credit"))}
    assert sk.kind is TermKind.SKOLEM


def test_apply_without_placeholders_is_substitution():
    r = rules("RULE r ACTION :A CONSTRUCT { ?x :p :q . } WHERE { ?a dtd:hasTime ?_T . ?a dtd:agent ?x . }")[0]
    f = RuleFiring(r, {var("?x"): ex("k"), var("?a"): ex("e"), TIME_VAR: ex("t")}, ex("t"))
    assert apply_firing(f) == {t("k", "p", "q")}


def test_two_firings_get_disjoint_skolems(bank):
    o, inf = _bank_state(bank)
    f1 = find_firings(inf, bank.rules, b("t0"))[0]
    f2 = find_firings(inf, bank.rules, b("t0"))[0]
    assert not set(f1.skolems.values()) & set(f2.skolems.values())
    assert not {x for tr in apply_firing(f1) for x in tr if x.is_skolem} & {x for tr in apply_firing(f2) for x in tr if x.is_skolem}


def test_unbound_effect_variable_raises():
    r = rules("RULE r ACTION :A CONSTRUCT { ?x :p ?z . } WHERE { ?a dtd:hasTime ?_T . ?a dtd:agent ?x . }")[0]
    with pytest.raises(RuleError):
        apply_firing(RuleFiring(r, {var("?x"): ex("k")}, ex("t")))


def test_empty_rule_list_never_fires(bank):
    o, inf = _bank_state(bank)
    for p in (b("tm1"), b("t0"), b("t2")):
        assert find_firings(inf, [], p) == []


def test_firings_satisfy_prerequisites_post_hoc(bank):
    o, inf = _bank_state(bank)
    view = inf.view
    for f in find_firings(inf, bank.rules, b("t0")):
        assert all(tr.substitute(f.binding) in view for tr in f.rule.prerequisites)
        for g in f.rule.negatives:
            assert not brute_force_match(view.triples, [tr.substitute(f.binding) for tr in g])
