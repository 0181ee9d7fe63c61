"""Small builders shared by the test modules."""

from dtd.kg.ontology import parse_ontology
from dtd.kg.terms import TYPE, Triple, iri, var
from dtd.rules import parse_rules

EX = "http://example.org/t#"
PREFIX = f"@prefix : <{EX}> .\n@prefix dtd: <urn:dtd:ns#> .\n@prefix owl: <http://www.w3.org/2002/07/owl#> .\n@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"


def ex(name: str):
    return iri(EX + name)


def onto(body: str):
    return parse_ontology(PREFIX + body)


def rules(body: str):
    return parse_rules(PREFIX + body)


def t(s, p, o) -> Triple:
    def conv(x):
        if not isinstance(x, str):
            return x
        return var(x) if x.startswith("?") else ex(x)
    return Triple(conv(s), TYPE if p == "a" else conv(p), conv(o))


def canonical(triples):
    """Sorted triples with skolems replaced by neighbourhood-refined colours,
    so graphs equal up to skolem renaming compare equal."""
    from collections import Counter

    triples = list(triples)
    skolems = {x for tr in triples for x in tr if x.is_skolem}
    colour = {s: "sk" for s in skolems}
    for _ in range(len(skolems) + 1):
        def show(x, self_=None):
            if x == self_:
                return "@"
            return f"<{colour[x]}>" if x in colour else repr(x)

        new = {}
        for s in skolems:
            around = sorted(" ".join(show(x, s) for x in tr) for tr in triples if s in tr)
            new[s] = str(hash((colour[s], tuple(around))))
        if len(set(new.values())) == len(set(colour.values())):
            colour = new
            break
        colour = new
    render_ = lambda x: f"<{colour[x]}>" if x in colour else repr(x)  # noqa: E731
    return Counter(" ".join(render_(x) for x in tr) for tr in triples)
