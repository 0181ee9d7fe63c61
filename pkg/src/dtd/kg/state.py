"""Immutable states and basic-graph-pattern matching over them."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from dtd.kg.terms import Term, Triple

Binding = Dict[Term, Term]


class NonGroundTripleError(ValueError):
    pass


@dataclass(frozen=True)
class State:
    """A set of ground triples, one knowledge snapshot."""

    triples: FrozenSet[Triple] = frozenset()
    label: str = "initial"

    def __post_init__(self) -> None:
        if not isinstance(self.triples, frozenset):
            object.__setattr__(self, "triples", frozenset(self.triples))

    def __contains__(self, triple: object) -> bool:
        return triple in self.triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.triples)

    def __len__(self) -> int:
        return len(self.triples)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return self.triples == other.triples

    def __hash__(self) -> int:
        return hash(self.triples)

    def sorted(self) -> List[Triple]:
        return sorted(self.triples)

    @cached_property
    def index(self) -> "_Index":
        return _Index(self.triples)


class _Index:
    def __init__(self, triples: Iterable[Triple]) -> None:
        self.all: List[Triple] = []
        self.by_p: Dict[Term, List[Triple]] = defaultdict(list)
        self.by_ps: Dict[Tuple[Term, Term], List[Triple]] = defaultdict(list)
        self.by_po: Dict[Tuple[Term, Term], List[Triple]] = defaultdict(list)
        self.by_s: Dict[Term, List[Triple]] = defaultdict(list)
        self.by_o: Dict[Term, List[Triple]] = defaultdict(list)
        for t in triples:
            self.all.append(t)
            self.by_p[t.predicate].append(t)
            self.by_ps[(t.predicate, t.subject)].append(t)
            self.by_po[(t.predicate, t.object)].append(t)
            self.by_s[t.subject].append(t)
            self.by_o[t.object].append(t)
        self.triples = frozenset(self.all)

    def candidates(self, s: Optional[Term], p: Optional[Term], o: Optional[Term]) -> Sequence[Triple]:
        if s is not None and p is not None and o is not None:
            t = Triple(s, p, o)
            return (t,) if t in self.triples else ()
        if p is not None:
            if s is not None:
                return self.by_ps.get((p, s), ())
            if o is not None:
                return self.by_po.get((p, o), ())
            return self.by_p.get(p, ())
        if s is not None:
            return self.by_s.get(s, ())
        if o is not None:
            return self.by_o.get(o, ())
        return self.all


def merge(state: State, additions: Iterable[Triple], label: Optional[str] = None) -> State:
    """Return ``state`` extended with ground ``additions``; ``state`` is untouched."""
    additions = frozenset(additions)
    for t in additions:
        if not t.is_ground:
            raise NonGroundTripleError(f"cannot merge non-ground triple {t}")
    if not additions or additions <= state.triples:
        if label is None or label == state.label:
            return state
        return State(state.triples, label)
    return State(state.triples | additions, state.label if label is None else label)


def pattern_variables(patterns: Iterable[Triple]) -> List[Term]:
    seen: Dict[Term, None] = {}
    for p in patterns:
        for t in p.variables():
            seen.setdefault(t, None)
    return list(seen)


def _resolve(term: Term, binding: Mapping[Term, Term]) -> Optional[Term]:
    if term.is_variable:
        return binding.get(term)
    return term


def _embeddings(index: _Index, patterns: Sequence[Triple], binding: Binding) -> Iterator[Binding]:
    if not patterns:
        yield binding
        return
    # most-bound pattern first keeps the join small
    best_i, best_n = 0, -1
    for i, p in enumerate(patterns):
        n = sum(1 for t in p if not t.is_variable or t in binding)
        if n > best_n:
            best_i, best_n = i, n
    pattern = patterns[best_i]
    rest = patterns[:best_i] + patterns[best_i + 1:]
    s = _resolve(pattern.subject, binding)
    p = _resolve(pattern.predicate, binding)
    o = _resolve(pattern.object, binding)
    for cand in index.candidates(s, p, o):
        extended = binding
        ok = True
        for pt, ct in zip(pattern, cand):
            if pt.is_variable:
                bound = extended.get(pt)
                if bound is None:
                    if extended is binding:
                        extended = dict(binding)
                    extended[pt] = ct
                elif bound != ct:
                    ok = False
                    break
            elif pt != ct:
                ok = False
                break
        if ok:
            yield from _embeddings(index, rest, extended)


def embeds(state: State, patterns: Sequence[Triple], binding: Optional[Binding] = None) -> bool:
    """True iff some extension of ``binding`` maps every pattern into ``state``."""
    for _ in _embeddings(state.index, list(patterns), dict(binding or {})):
        return True
    return False


def binding_sort_key(binding: Mapping[Term, Term]) -> Tuple:
    return tuple((v, binding[v]) for v in sorted(binding))


def match_pattern(
    state: State,
    positives: Sequence[Triple],
    negatives: Sequence[Sequence[Triple]] = (),
    initial: Optional[Binding] = None,
) -> List[Binding]:
    """Every substitution embedding ``positives`` into ``state`` that no negative
    group can be extended to embed (closed-world ``FILTER NOT EXISTS``).

    Results are distinct and ordered lexicographically by variable name, then term.
    """
    seed: Binding = dict(initial or {})
    found: Dict[Tuple, Binding] = {}
    for b in _embeddings(state.index, list(positives), seed):
        if any(embeds(state, group, b) for group in negatives):
            continue
        key = binding_sort_key(b)
        if key not in found:
            found[key] = dict(b)
    return [found[k] for k in sorted(found)]
