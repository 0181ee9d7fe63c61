"""Realizability and executability: per-rule consistency against the basic model."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from dtd.kg.ontology import Ontology
from dtd.kg.state import merge
from dtd.kg.terms import Term, Triple, fresh_skolem
from dtd.reasoner import Clash, ClassHierarchy, InferredState, classify, materialize
from dtd.rules import ActionRule

OK = "ok"
UNSAT = "unsatisfiable"


@dataclass(frozen=True)
class CheckReport:
    rule: str
    verdict: str
    clashes: Tuple[Clash, ...] = ()

    @property
    def ok(self) -> bool:
        return self.verdict == OK

    def line(self, prefixes: Optional[Mapping[str, str]] = None) -> str:
        summary = "; ".join(c.summary(prefixes) for c in self.clashes)
        return f"{self.rule}\t{'ok' if self.ok else 'UNSAT'}\t{summary}"


def skolemize_patterns(patterns: Iterable[Triple], skolems: Optional[Dict[Term, Term]] = None) -> FrozenSet[Triple]:
    """Ground patterns by giving every variable and placeholder its own fresh individual."""
    mapping: Dict[Term, Term] = {} if skolems is None else skolems
    out = set()
    for pattern in patterns:
        terms = []
        for term in pattern:
            if not term.is_ground:
                if term not in mapping:
                    mapping[term] = fresh_skolem()
                term = mapping[term]
            terms.append(term)
        out.add(Triple(*terms))
    return frozenset(out)


def _check(patterns: Sequence[Triple], ontology: Ontology, hierarchy: ClassHierarchy) -> InferredState:
    grounded = skolemize_patterns(patterns)
    return materialize(merge(ontology.abox, grounded), ontology, hierarchy)


def _report(rule: ActionRule, inferred: InferredState) -> CheckReport:
    return CheckReport(rule.name, OK if inferred.consistent else UNSAT, inferred.clashes)


def check_realizability(
    rules: Sequence[ActionRule], ontology: Ontology, hierarchy: Optional[ClassHierarchy] = None
) -> List[CheckReport]:
    """Per rule: are the skolemized effects consistent with the basic model?"""
    hierarchy = hierarchy or classify(ontology.tbox, ontology.classes)
    return [_report(rule, _check(rule.effects, ontology, hierarchy)) for rule in rules]


def check_executability(
    rules: Sequence[ActionRule], ontology: Ontology, hierarchy: Optional[ClassHierarchy] = None
) -> List[CheckReport]:
    """Per rule: are the skolemized positive prerequisites mutually consistent?

    NOT EXISTS groups assert absence and cannot produce a clash here.
    """
    hierarchy = hierarchy or classify(ontology.tbox, ontology.classes)
    return [_report(rule, _check(rule.prerequisites, ontology, hierarchy)) for rule in rules]
