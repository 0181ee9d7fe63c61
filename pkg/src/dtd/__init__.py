"""Temporal-dynamic reasoning over knowledge graphs with action rules."""

from dtd.checkers import CheckReport, check_executability, check_realizability, skolemize_patterns
from dtd.kg import Ontology, State, Term, Triple, iri, literal, match_pattern, merge, parse_ontology, var
from dtd.planner import (
    ConditionPartition,
    Plan,
    PlanningProblem,
    PlanStep,
    check_actionbox,
    classify_conditions,
    forward_search_oracle,
    plan,
)
from dtd.projection import Timeline, project, step
from dtd.reasoner import check_consistency, classify, infer_time_flow, materialize
from dtd.rules import ActionRule, apply_firing, find_firings, parse_rules, validate_rule
from dtd.scenario import Scenario, load_scenario

__version__ = "0.1.0"

__all__ = [
    "ActionRule",
    "CheckReport",
    "ConditionPartition",
    "Ontology",
    "Plan",
    "PlanStep",
    "PlanningProblem",
    "Scenario",
    "State",
    "Term",
    "Timeline",
    "Triple",
    "apply_firing",
    "check_actionbox",
    "check_consistency",
    "check_executability",
    "check_realizability",
    "classify",
    "classify_conditions",
    "find_firings",
    "forward_search_oracle",
    "infer_time_flow",
    "iri",
    "literal",
    "load_scenario",
    "match_pattern",
    "materialize",
    "merge",
    "parse_ontology",
    "parse_rules",
    "plan",
    "project",
    "skolemize_patterns",
    "step",
    "validate_rule",
    "var",
]
