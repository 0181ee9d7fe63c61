"""Per-state classical reasoning.

The fragment is forward-chaining materialization over subClassOf, domain,
range, subPropertyOf and transitive properties, plus the time-flow axioms of
the ``dtd:`` vocabulary, with disjointWith/complementOf clash detection on the
fixpoint. No tableau: class expressions are atomic.
"""

from __future__ import annotations

import heapq
from collections import defaultdict, deque
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from dtd.kg.ontology import (
    COMPLEMENT,
    DISJOINT,
    DOMAIN_AX,
    RANGE_AX,
    SUBCLASS,
    SUBPROPERTY,
    TRANSITIVE,
    Ontology,
    TBoxAxiom,
)
from dtd.kg.state import State
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
    render,
)


class TimeFlowError(ValueError):
    """The declared/inferred time points do not form a strict linear order."""


class ReasonerStats:
    """Call counters, used to check how often each reasoning phase runs."""

    def __init__(self) -> None:
        self.classify = 0
        self.materialize = 0

    def reset(self) -> None:
        self.classify = 0
        self.materialize = 0


STATS = ReasonerStats()


@dataclass(frozen=True)
class ClassHierarchy:
    subsumptions: FrozenSet[Tuple[Term, Term]]
    property_subsumptions: FrozenSet[Tuple[Term, Term]] = frozenset()
    unsatisfiable: FrozenSet[Term] = frozenset()

    @cached_property
    def _supers(self) -> Dict[Term, FrozenSet[Term]]:
        out: Dict[Term, Set[Term]] = defaultdict(set)
        for sub, sup in self.subsumptions:
            out[sub].add(sup)
        return {k: frozenset(v) for k, v in out.items()}

    @cached_property
    def _subs(self) -> Dict[Term, FrozenSet[Term]]:
        out: Dict[Term, Set[Term]] = defaultdict(set)
        for sub, sup in self.subsumptions:
            out[sup].add(sub)
        return {k: frozenset(v) for k, v in out.items()}

    @cached_property
    def _superprops(self) -> Dict[Term, FrozenSet[Term]]:
        out: Dict[Term, Set[Term]] = defaultdict(set)
        for sub, sup in self.property_subsumptions:
            out[sub].add(sup)
        return {k: frozenset(v) for k, v in out.items()}

    @property
    def classes(self) -> FrozenSet[Term]:
        return frozenset(self._supers)

    def superclasses(self, cls: Term) -> FrozenSet[Term]:
        return self._supers.get(cls, frozenset((cls,)))

    def subclasses(self, cls: Term) -> FrozenSet[Term]:
        return self._subs.get(cls, frozenset((cls,)))

    def superproperties(self, prop: Term) -> FrozenSet[Term]:
        return self._superprops.get(prop, frozenset((prop,)))

    def is_subclass(self, sub: Term, sup: Term) -> bool:
        return sub == sup or (sub, sup) in self.subsumptions

    def is_subproperty(self, sub: Term, sup: Term) -> bool:
        return sub == sup or (sub, sup) in self.property_subsumptions

    @property
    def satisfiable(self) -> bool:
        return not self.unsatisfiable


def _closure(edges: Iterable[Tuple[Term, Term]], nodes: Iterable[Term]) -> FrozenSet[Tuple[Term, Term]]:
    succ: Dict[Term, Set[Term]] = defaultdict(set)
    universe: Set[Term] = set(nodes)
    for a, b in edges:
        succ[a].add(b)
        universe.update((a, b))
    pairs: Set[Tuple[Term, Term]] = set()
    for start in universe:
        seen = {start}
        stack = [start]
        while stack:
            n = stack.pop()
            for m in succ.get(n, ()):
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        pairs.update((start, m) for m in seen)
    return frozenset(pairs)


def _disjoint_pairs(tbox: Iterable[TBoxAxiom]) -> List[TBoxAxiom]:
    return sorted({a.normalized() for a in tbox if a.kind in (DISJOINT, COMPLEMENT)})


def classify(tbox: Iterable[TBoxAxiom], classes: Iterable[Term] = ()) -> ClassHierarchy:
    """Reflexive-transitive closure of subClassOf (and subPropertyOf).

    A class is reported unsatisfiable when its superclasses include both sides
    of a disjointWith or complementOf axiom; this is a report, never an error.
    """
    STATS.classify += 1
    return _classify(tbox, classes)


def _classify(tbox: Iterable[TBoxAxiom], classes: Iterable[Term] = ()) -> ClassHierarchy:
    tbox = list(tbox)
    class_nodes: Set[Term] = set(classes)
    prop_nodes: Set[Term] = set()
    for ax in tbox:
        if ax.kind in (SUBCLASS, DISJOINT, COMPLEMENT):
            class_nodes.update(ax.operands)
        elif ax.kind in (DOMAIN_AX, RANGE_AX):
            prop_nodes.add(ax.operands[0])
            class_nodes.add(ax.operands[1])
        else:
            prop_nodes.update(ax.operands)
    subs = _closure((ax.operands for ax in tbox if ax.kind == SUBCLASS), class_nodes)
    props = _closure((ax.operands for ax in tbox if ax.kind == SUBPROPERTY), prop_nodes)
    supers: Dict[Term, Set[Term]] = defaultdict(set)
    for a, b in subs:
        supers[a].add(b)
    unsat = set()
    for ax in _disjoint_pairs(tbox):
        c, d = ax.operands
        for cls, sup in supers.items():
            if c in sup and d in sup:
                unsat.add(cls)
    return ClassHierarchy(subs, props, frozenset(unsat))


def classify_ontology(ontology: Ontology) -> ClassHierarchy:
    return classify(ontology.tbox, ontology.classes)


@dataclass(frozen=True, order=True)
class Clash:
    individual: Term
    axiom: TBoxAxiom
    supporting: Tuple[Triple, ...]

    def summary(self, prefixes: Optional[Mapping[str, str]] = None) -> str:
        c, d = self.axiom.operands
        return (
            f"{render(self.individual, prefixes)} in {render(c, prefixes)} and {render(d, prefixes)} "
            f"({self.axiom.kind})"
        )


@dataclass(frozen=True)
class InferredState:
    base: State
    derived: FrozenSet[Triple]
    clashes: Tuple[Clash, ...]
    tbox: FrozenSet[TBoxAxiom] = frozenset()

    @cached_property
    def view(self) -> State:
        return State(self.base.triples | self.derived, self.base.label)

    @property
    def consistent(self) -> bool:
        return not self.clashes


class _Rules:
    """Lookup tables compiled from a TBox and its hierarchy."""

    def __init__(self, tbox: Iterable[TBoxAxiom], hierarchy: ClassHierarchy) -> None:
        self.hierarchy = hierarchy
        self.domains: Dict[Term, Set[Term]] = defaultdict(set)
        self.ranges: Dict[Term, Set[Term]] = defaultdict(set)
        self.transitive: Set[Term] = {BEFORE}
        for ax in tbox:
            if ax.kind == DOMAIN_AX:
                self.domains[ax.operands[0]].add(ax.operands[1])
            elif ax.kind == RANGE_AX:
                self.ranges[ax.operands[0]].add(ax.operands[1])
            elif ax.kind == TRANSITIVE:
                self.transitive.add(ax.operands[0])


def _parse_datetime(text: str) -> Optional[datetime]:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        value = datetime.fromisoformat(text)
    except ValueError:
        return None
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value


def _saturate(triples: Iterable[Triple], rules: _Rules) -> Set[Triple]:
    """Semi-naive worklist closure; returns the full fixpoint."""
    h = rules.hierarchy
    view: Set[Triple] = set()
    by_ps: Dict[Tuple[Term, Term], Set[Term]] = defaultdict(set)
    by_po: Dict[Tuple[Term, Term], Set[Term]] = defaultdict(set)
    stamps: Dict[Term, List[datetime]] = defaultdict(list)
    queue = deque(sorted(set(triples)))
    view.update(queue)
    for t in queue:
        by_ps[(t.predicate, t.subject)].add(t.object)
        by_po[(t.predicate, t.object)].add(t.subject)

    def add(t: Triple) -> None:
        if t not in view:
            view.add(t)
            by_ps[(t.predicate, t.subject)].add(t.object)
            by_po[(t.predicate, t.object)].add(t.subject)
            queue.append(t)

    while queue:
        s, p, o = queue.popleft()
        if p == TYPE:
            for sup in h.superclasses(o):
                if sup != o:
                    add(Triple(s, TYPE, sup))
            continue
        for q in h.superproperties(p):
            if q != p:
                add(Triple(s, q, o))
        for c in rules.domains.get(p, ()):
            add(Triple(s, TYPE, c))
        if not o.is_literal:
            for c in rules.ranges.get(p, ()):
                add(Triple(o, TYPE, c))
        if p in rules.transitive:
            for z in list(by_ps.get((p, o), ())):
                add(Triple(s, p, z))
            for w in list(by_po.get((p, s), ())):
                add(Triple(w, p, o))
        if p == NEXT:
            add(Triple(s, BEFORE, o))
        if p in (BEFORE, NEXT):
            add(Triple(s, TYPE, TIME_POINT))
            add(Triple(o, TYPE, TIME_POINT))
        elif p in TIME_RELATIONS and not o.is_literal:
            add(Triple(o, TYPE, TIME_POINT))
        elif p == AT_DATETIME and o.is_literal and o.datatype == XSD_DATETIME:
            when = _parse_datetime(o.lexical)
            if when is None:
                continue
            add(Triple(s, TYPE, TIME_POINT))
            for other, values in list(stamps.items()):
                if other == s:
                    continue
                for v in values:
                    if v < when:
                        add(Triple(other, BEFORE, s))
                    elif when < v:
                        add(Triple(s, BEFORE, other))
            stamps[s].append(when)
    return view


def find_clashes(view: State, tbox: Iterable[TBoxAxiom]) -> List[Clash]:
    pairs = _disjoint_pairs(tbox)
    if not pairs:
        return []
    index = view.index
    clashes = []
    for ax in pairs:
        c, d = ax.operands
        with_c = {t.subject for t in index.by_po.get((TYPE, c), ())}
        for t in index.by_po.get((TYPE, d), ()):
            x = t.subject
            if x in with_c:
                clashes.append(Clash(x, ax, (Triple(x, TYPE, c), Triple(x, TYPE, d))))
    return sorted(clashes)


def materialize(state: State, ontology: Ontology, hierarchy: Optional[ClassHierarchy] = None) -> InferredState:
    """Least fixpoint of the supported rules over ``state``, with clashes."""
    STATS.materialize += 1
    if hierarchy is None:
        hierarchy = _classify(ontology.tbox, ontology.classes)
    return _materialize(state, ontology.tbox, hierarchy)


def _materialize(state: State, tbox: FrozenSet[TBoxAxiom], hierarchy: ClassHierarchy) -> InferredState:
    view = _saturate(state.triples, _Rules(tbox, hierarchy))
    derived = frozenset(view - state.triples)
    inferred = InferredState(state, derived, (), tbox)
    clashes = tuple(find_clashes(inferred.view, tbox))
    return InferredState(state, derived, clashes, tbox)


def extend(inferred: InferredState, additions: Iterable[Triple], hierarchy: ClassHierarchy) -> InferredState:
    """Add triples to an already-materialized state and re-close it.

    The base keeps its asserted triples plus ``additions``; this is the
    incremental path used for engine-injected time structure.
    """
    additions = frozenset(additions) - inferred.view.triples
    if not additions:
        return inferred
    base = State(inferred.base.triples | additions, inferred.base.label)
    view = _saturate(inferred.view.triples | additions, _Rules(inferred.tbox, hierarchy))
    derived = frozenset(view - base.triples)
    tmp = InferredState(base, derived, (), inferred.tbox)
    return InferredState(base, derived, tuple(find_clashes(tmp.view, inferred.tbox)), inferred.tbox)


def check_consistency(inferred: InferredState) -> List[Clash]:
    """Every individual typed by both sides of a disjointWith/complementOf axiom."""
    return find_clashes(inferred.view, inferred.tbox)


@dataclass(frozen=True)
class TimeFlow:
    points: Tuple[Term, ...]

    @cached_property
    def _position(self) -> Dict[Term, int]:
        return {p: i for i, p in enumerate(self.points)}

    def __contains__(self, point: object) -> bool:
        return point in self._position

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def position(self, point: Term) -> int:
        return self._position[point]

    def precedes(self, a: Term, b: Term) -> bool:
        return self._position[a] < self._position[b]

    def successor(self, point: Term) -> Optional[Term]:
        i = self._position[point] + 1
        return self.points[i] if i < len(self.points) else None

    def structure_triples(self) -> List[Triple]:
        """``dtd:next`` and ``dtd:before`` between consecutive points."""
        out = []
        for a, b in zip(self.points, self.points[1:]):
            out.append(Triple(a, NEXT, b))
            out.append(Triple(a, BEFORE, b))
        return out


def infer_time_flow(inferred: InferredState) -> TimeFlow:
    """Order the time points of a materialized state into a strict linear flow.

    Raises TimeFlowError on a cycle in ``dtd:before`` or when two points used
    by action instances are incomparable.
    """
    view = inferred.view
    index = view.index
    points = sorted({t.subject for t in index.by_po.get((TYPE, TIME_POINT), ())})
    point_set = set(points)
    after: Dict[Term, Set[Term]] = defaultdict(set)
    for t in index.by_p.get(BEFORE, ()):
        if t.subject == t.object:
            raise TimeFlowError(f"time point {render(t.subject)} precedes itself (cycle in dtd:before)")
        if t.subject in point_set and t.object in point_set:
            after[t.subject].add(t.object)
    # the view is transitively closed, so a 2-cycle witnesses any cycle
    for a, succs in after.items():
        for b in succs:
            if a in after.get(b, ()):
                raise TimeFlowError(f"cycle in dtd:before between {render(a)} and {render(b)}")

    indegree = {p: 0 for p in points}
    for a in points:
        for b in after[a]:
            indegree[b] += 1
    heap = [p for p in points if indegree[p] == 0]
    heapq.heapify(heap)
    order: List[Term] = []
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for m in after[n]:
            indegree[m] -= 1
            if indegree[m] == 0:
                heapq.heappush(heap, m)

    referenced = sorted({t.object for rel in TIME_RELATIONS for t in index.by_p.get(rel, ()) if t.object in point_set})
    for i, a in enumerate(referenced):
        for b in referenced[i + 1:]:
            if b not in after[a] and a not in after[b]:
                raise TimeFlowError(
                    f"time points {render(a)} and {render(b)} are incomparable; the flow of time must be linear"
                )
    return TimeFlow(tuple(order))
