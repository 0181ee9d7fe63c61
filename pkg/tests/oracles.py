"""Slow, obviously-correct reference implementations used as test oracles.

None of these import the engine's matching, reasoning or ordering code; they
share only the Term/Triple value types and vocabulary constants.
"""

from __future__ import annotations

import itertools
from datetime import datetime, timezone
from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple

from dtd.kg.terms import (
    AT_DATETIME,
    BEFORE,
    NEXT,
    TIME_POINT,
    TIME_RELATIONS,
    TYPE,
    XSD_DATETIME,
    Term,
    Triple,
)


def _subst(t: Triple, sigma: Dict[Term, Term]) -> Triple:
    return Triple(*(sigma.get(x, x) for x in t))


def _vars(patterns: Iterable[Triple]) -> List[Term]:
    seen: List[Term] = []
    for t in patterns:
        for x in t:
            if x.is_variable and x not in seen:
                seen.append(x)
    return seen


def brute_force_match(triples: FrozenSet[Triple], positives: Sequence[Triple],
                      negatives: Sequence[Sequence[Triple]] = ()) -> Set[FrozenSet]:
    """Every assignment of positive variables to state terms, filtered."""
    domain = sorted({x for t in triples for x in t})
    pvars = _vars(positives)
    out = set()
    for values in itertools.product(domain, repeat=len(pvars)):
        sigma = dict(zip(pvars, values))
        if not all(_subst(t, sigma) in triples for t in positives):
            continue
        blocked = False
        for group in negatives:
            local = [v for v in _vars(group) if v not in sigma]
            for extra in itertools.product(domain, repeat=len(local)):
                full = {**sigma, **dict(zip(local, extra))}
                if all(_subst(t, full) in triples for t in group):
                    blocked = True
                    break
            if blocked:
                break
        if not blocked:
            out.add(frozenset(sigma.items()))
    return out


def warshall(nodes: Iterable[Term], edges: Iterable[Tuple[Term, Term]]) -> Set[Tuple[Term, Term]]:
    """Reflexive-transitive closure by Floyd-Warshall over an adjacency matrix."""
    nodes = sorted(set(nodes) | {x for e in edges for x in e})
    idx = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    reach = [[i == j for j in range(n)] for i in range(n)]
    for a, b in edges:
        reach[idx[a]][idx[b]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return {(nodes[i], nodes[j]) for i in range(n) for j in range(n) if reach[i][j]}


def _when(text: str):
    text = text.strip().replace("Z", "+00:00")
    try:
        v = datetime.fromisoformat(text)
    except ValueError:
        return None
    return v if v.tzinfo else v.replace(tzinfo=timezone.utc)


def naive_fixpoint(triples: Iterable[Triple], subclass: Iterable[Tuple[Term, Term]],
                   subprop: Iterable[Tuple[Term, Term]], domains: Iterable[Tuple[Term, Term]],
                   ranges: Iterable[Tuple[Term, Term]], transitive: Iterable[Term]) -> Set[Triple]:
    """Reapply every inference rule to the whole set until nothing changes."""
    subclass, subprop = list(subclass), list(subprop)
    domains, ranges = list(domains), list(ranges)
    trans = set(transitive) | {BEFORE}
    kb = set(triples)
    while True:
        new = set()
        for s, p, o in kb:
            if p == TYPE:
                new.update(Triple(s, TYPE, d) for c, d in subclass if c == o)
                continue
            new.update(Triple(s, q, o) for sub, q in subprop if sub == p)
            new.update(Triple(s, TYPE, c) for prop, c in domains if prop == p)
            if not o.is_literal:
                new.update(Triple(o, TYPE, c) for prop, c in ranges if prop == p)
            if p in trans:
                new.update(Triple(s, p, z) for s2, p2, z in kb if p2 == p and s2 == o)
            if p == NEXT:
                new.add(Triple(s, BEFORE, o))
            if p in (BEFORE, NEXT):
                new.update({Triple(s, TYPE, TIME_POINT), Triple(o, TYPE, TIME_POINT)})
            elif p in TIME_RELATIONS and not o.is_literal:
                new.add(Triple(o, TYPE, TIME_POINT))
        stamps = [(s, _when(o.lexical)) for s, p, o in kb
                  if p == AT_DATETIME and o.is_literal and o.datatype == XSD_DATETIME]
        stamps = [(s, w) for s, w in stamps if w is not None]
        for s, _ in stamps:
            new.add(Triple(s, TYPE, TIME_POINT))
        for (a, wa), (b, wb) in itertools.product(stamps, repeat=2):
            if a != b and wa < wb:
                new.add(Triple(a, BEFORE, b))
        if new <= kb:
            return kb
        kb |= new


def expanded_types(triples: Iterable[Triple], closure: Set[Tuple[Term, Term]]) -> Dict[Term, Set[Term]]:
    types: Dict[Term, Set[Term]] = {}
    for s, p, o in triples:
        if p == TYPE:
            types.setdefault(s, set()).update({o} | {sup for sub, sup in closure if sub == o})
    return types


def clash_oracle(triples: Iterable[Triple], closure: Set[Tuple[Term, Term]],
                 disjoint_pairs: Iterable[Tuple[Term, Term]]) -> Set[Tuple[Term, FrozenSet[Term]]]:
    """Expand all types first, then scan every individual against every pair."""
    pairs = {frozenset(p) for p in disjoint_pairs}
    out = set()
    for x, ts in expanded_types(triples, closure).items():
        for pair in pairs:
            if pair <= ts and len(pair) == 2:
                out.add((x, pair))
    return out


def toposort_oracle(points: Iterable[Term], before: Iterable[Tuple[Term, Term]]) -> List[Term]:
    """Close ``before`` and rank each point by how many points precede it."""
    points = sorted(set(points))
    closure = warshall(points, before)
    strict = {(a, b) for a, b in closure if a != b}
    if any((b, a) in strict for a, b in strict):
        raise ValueError("cycle")
    ranked = sorted(points, key=lambda p: (sum((q, p) in strict for q in points), p))
    for a, b in zip(ranked, ranked[1:]):
        if (a, b) not in strict:
            raise ValueError("not total")
    return ranked
