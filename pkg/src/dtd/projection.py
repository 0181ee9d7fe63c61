"""Projection: alternate DL materialization and rule execution along the flow of time."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from dtd.kg.ontology import Ontology
from dtd.kg.state import State, merge
from dtd.kg.terms import Term, Triple, render
from dtd.reasoner import (
    ClassHierarchy,
    InferredState,
    TimeFlow,
    classify,
    extend,
    infer_time_flow,
    materialize,
)
from dtd.rules import ActionRule, RuleFiring, apply_firing, find_firings, validate_rules

log = logging.getLogger(__name__)


class ProjectionError(ValueError):
    pass


class UnsatisfiableTBoxError(ProjectionError):
    def __init__(self, classes: FrozenSet[Term]) -> None:
        self.classes = classes
        names = ", ".join(render(c) for c in sorted(classes))
        super().__init__(f"TBox has unsatisfiable classes: {names}")


class RuleValidationError(ProjectionError):
    def __init__(self, violations) -> None:
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Timeline:
    """Point-based temporal model: one inferred state per time point."""

    flow: TimeFlow
    states: Dict[Term, InferredState]
    initial: InferredState
    firings: Dict[Term, Tuple[RuleFiring, ...]] = field(default_factory=dict)
    inconsistent_at: Optional[Term] = None
    warnings: Tuple[str, ...] = ()

    @property
    def truncated(self) -> bool:
        return self.inconsistent_at is not None or not self.initial.consistent

    def view(self, point: Term) -> State:
        return self.states[point].view

    def final(self) -> InferredState:
        if not self.states:
            return self.initial
        return self.states[list(self.states)[-1]]

    def previous(self, point: Term) -> InferredState:
        points = list(self.states)
        i = points.index(point)
        return self.initial if i == 0 else self.states[points[i - 1]]

    def added(self, point: Term) -> FrozenSet[Triple]:
        return self.states[point].view.triples - self.previous(point).view.triples


def _fire(current: InferredState, now: Term, rules: Sequence[ActionRule]) -> Tuple[List[RuleFiring], FrozenSet[Triple]]:
    firings = find_firings(current, rules, now)
    effects: set = set()
    for f in firings:
        effects |= apply_firing(f)
    return firings, frozenset(effects)


def step(
    current: InferredState,
    now: Term,
    rules: Sequence[ActionRule],
    ontology: Ontology,
    hierarchy: Optional[ClassHierarchy] = None,
) -> InferredState:
    """Fire every rule at ``now`` and re-materialize; all effects land as one union."""
    _, effects = _fire(current, now, rules)
    return materialize(merge(current.view, effects, label=now.lexical), ontology, hierarchy)


def _retro_references(effects: FrozenSet[Triple], now: Term, flow: TimeFlow) -> List[str]:
    out = []
    for t in sorted(effects):
        for term in (t.subject, t.object):
            if term in flow and flow.precedes(term, now):
                out.append(f"effect {t} at {render(now)} refers to earlier time point {render(term)}")
    return out


def project(ontology: Ontology, rules: Sequence[ActionRule]) -> Timeline:
    """Project the ABox through every declared time point.

    The TBox is classified once; the ABox is materialized once for the
    initial state and once per time point. Projection stops at the first
    inconsistent state, which is kept in the timeline with its clashes.
    """
    violations = validate_rules(rules)
    if violations:
        raise RuleValidationError(violations)
    hierarchy = classify(ontology.tbox, ontology.classes)
    if not hierarchy.satisfiable:
        raise UnsatisfiableTBoxError(hierarchy.unsatisfiable)

    preliminary = materialize(ontology.abox, ontology, hierarchy)
    flow = infer_time_flow(preliminary)
    initial = extend(preliminary, flow.structure_triples(), hierarchy)

    states: Dict[Term, InferredState] = {}
    fired: Dict[Term, Tuple[RuleFiring, ...]] = {}
    warnings: List[str] = []
    if not initial.consistent:
        return Timeline(flow, states, initial, fired, None, ())

    current = initial
    inconsistent_at = None
    for now in flow:
        firings, effects = _fire(current, now, rules)
        for w in _retro_references(effects, now, flow):
            log.warning(w)
            warnings.append(w)
        result = materialize(merge(current.view, effects, label=now.lexical), ontology, hierarchy)
        states[now] = result
        fired[now] = tuple(firings)
        if not result.consistent:
            inconsistent_at = now
            break
        current = result
    return Timeline(flow, states, initial, fired, inconsistent_at, tuple(warnings))
