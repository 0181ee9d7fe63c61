"""Action rules: parsing, validation, matching and application.

A rule pairs WHERE prerequisites (positive patterns plus ``FILTER NOT EXISTS``
groups) with CONSTRUCT effects. One prerequisite ties the action instance to
the reserved time variable ``?_T``; CONSTRUCT may mint fresh individuals via
``_:label`` placeholders.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from dtd.kg.state import Binding, State, binding_sort_key, match_pattern, pattern_variables
from dtd.kg.syntax import ParseError, TokenStream, tokenize
from dtd.kg.terms import (
    AGENT,
    STANDARD_PREFIXES,
    TIME_RELATIONS,
    TIME_VAR,
    TYPE,
    Term,
    TermKind,
    Triple,
    fresh_skolem,
    render,
)
from dtd.reasoner import InferredState


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class ActionRule:
    name: str
    action: Term
    effects: Tuple[Triple, ...]
    prerequisites: Tuple[Triple, ...]
    negatives: Tuple[Tuple[Triple, ...], ...] = ()

    @property
    def time_bindings(self) -> List[Triple]:
        return [t for t in self.prerequisites if t.predicate in TIME_RELATIONS and t.object == TIME_VAR]

    @property
    def time_binding(self) -> Optional[Triple]:
        found = self.time_bindings
        return found[0] if len(found) == 1 else None

    @property
    def action_var(self) -> Optional[Term]:
        tb = self.time_binding
        return tb.subject if tb is not None and tb.subject.is_variable else None

    @property
    def agent_var(self) -> Optional[Term]:
        av = self.action_var
        for t in self.prerequisites:
            if t.subject == av and t.predicate == AGENT and t.object.is_variable:
                return t.object
        return None

    def action_triples(self) -> List[Triple]:
        """Prerequisites describing the action instance itself."""
        av = self.action_var
        return [t for t in self.prerequisites if av is not None and t.subject == av]

    def world_conditions(self) -> List[Triple]:
        """Prerequisites about the world rather than the action instance."""
        av = self.action_var
        return [t for t in self.prerequisites if av is None or t.subject != av]

    def placeholders(self) -> List[Term]:
        seen: Dict[Term, None] = {}
        for t in self.effects:
            for term in t:
                if term.kind is TermKind.BNODE:
                    seen.setdefault(term, None)
        return list(seen)

    def variables(self) -> List[Term]:
        return pattern_variables(self.prerequisites + self.effects + tuple(t for g in self.negatives for t in g))


# -- text format --------------------------------------------------------------

def parse_rules(text: str, prefixes: Optional[Mapping[str, str]] = None, source: str = "") -> List[ActionRule]:
    """Parse the rule format; raises ParseError on syntax errors and duplicate names."""
    base = dict(STANDARD_PREFIXES)
    base.update(prefixes or {})
    stream = TokenStream(tokenize(text, source), base, source)
    rules: List[ActionRule] = []
    names: Set[str] = set()
    while not stream.at_end():
        if stream.prefix_directive():
            continue
        head = stream.peek()
        if not stream.is_keyword("RULE"):
            raise stream.error(f"expected 'RULE', found {head.value!r}")
        stream.next()
        name_tok = stream.next()
        if name_tok.kind not in ("WORD", "PNAME"):
            raise stream.error("expected rule name", name_tok)
        if name_tok.value in names:
            raise stream.error(f"duplicate rule name {name_tok.value!r}", name_tok)
        names.add(name_tok.value)
        if not stream.is_keyword("ACTION"):
            raise stream.error("expected 'ACTION'")
        stream.next()
        action = stream.term(False, False, "subject")

        if not stream.is_keyword("CONSTRUCT"):
            raise stream.error("expected 'CONSTRUCT'")
        stream.next()
        stream.expect("PUNCT", "{")
        effects = [t for t, _ in stream.triples_block(True, True, stop=("}",))]
        stream.expect("PUNCT", "}")

        if not stream.is_keyword("WHERE"):
            raise stream.error("expected 'WHERE'")
        stream.next()
        stream.expect("PUNCT", "{")
        positives: List[Triple] = []
        negatives: List[Tuple[Triple, ...]] = []
        while True:
            positives.extend(t for t, _ in stream.triples_block(True, False, stop=("}", "FILTER")))
            if stream.is_keyword("FILTER"):
                stream.next()
                for word in ("NOT", "EXISTS"):
                    if not stream.is_keyword(word):
                        raise stream.error(f"expected {word!r}")
                    stream.next()
                stream.expect("PUNCT", "{")
                group = tuple(t for t, _ in stream.triples_block(True, False, stop=("}",)))
                stream.expect("PUNCT", "}")
                stream.accept("PUNCT", ".")
                negatives.append(group)
                continue
            break
        stream.expect("PUNCT", "}")
        rules.append(ActionRule(name_tok.value, action, tuple(effects), tuple(positives), tuple(negatives)))
    return rules


def _pattern_text(patterns: Iterable[Triple], prefixes: Mapping[str, str], indent: str) -> List[str]:
    return [f"{indent}{render(s, prefixes)} {render(p, prefixes)} {render(o, prefixes)} ." for s, p, o in patterns]


def serialize_rules(rules: Sequence[ActionRule], prefixes: Optional[Mapping[str, str]] = None) -> str:
    prefixes = dict(STANDARD_PREFIXES if prefixes is None else prefixes)
    lines = [f"@prefix {k}: <{prefixes[k]}> ." for k in sorted(prefixes)]
    for rule in rules:
        lines.append("")
        lines.append(f"RULE {rule.name} ACTION {render(rule.action, prefixes)}")
        lines.append("CONSTRUCT {")
        lines.extend(_pattern_text(rule.effects, prefixes, "  "))
        lines.append("}")
        lines.append("WHERE {")
        lines.extend(_pattern_text(rule.prerequisites, prefixes, "  "))
        for group in rule.negatives:
            lines.append("  FILTER NOT EXISTS {")
            lines.extend(_pattern_text(group, prefixes, "    "))
            lines.append("  }")
        lines.append("}")
    return "\n".join(lines) + "\n"


# -- validation ---------------------------------------------------------------

MISSING_TIME = "missing time binding"
MULTIPLE_TIME = "multiple time bindings"
UNSAFE = "unsafe variable"
NO_EFFECTS = "empty effects"


@dataclass(frozen=True)
class Violation:
    rule: str
    kind: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.rule}: {self.kind}" + (f" ({self.detail})" if self.detail else "")


def validate_rule(rule: ActionRule) -> List[Violation]:
    out: List[Violation] = []
    n = len(rule.time_bindings)
    if n == 0:
        out.append(Violation(rule.name, MISSING_TIME, "no '?a <time-relation> ?_T' prerequisite"))
    elif n > 1:
        out.append(Violation(rule.name, MULTIPLE_TIME, f"{n} time-binding triples"))
    bound = {t for p in rule.prerequisites for t in p.variables()}
    for v in pattern_variables(rule.effects):
        if v not in bound:
            out.append(Violation(rule.name, UNSAFE, f"{v.lexical} occurs in CONSTRUCT but not in WHERE"))
    if not rule.effects:
        out.append(Violation(rule.name, NO_EFFECTS))
    return out


def validate_rules(rules: Iterable[ActionRule]) -> List[Violation]:
    return [v for r in rules for v in validate_rule(r)]


# -- execution ----------------------------------------------------------------

@dataclass(frozen=True)
class RuleFiring:
    rule: ActionRule
    binding: Mapping[Term, Term]
    time: Term
    skolems: Mapping[Term, Term] = field(default_factory=dict)

    def sort_key(self) -> Tuple:
        return (self.rule.name, binding_sort_key(self.binding))


def find_firings(inferred: InferredState, rules: Sequence[ActionRule], now: Term) -> List[RuleFiring]:
    """All rule firings at time point ``now`` over the materialized view."""
    view = inferred.view if isinstance(inferred, InferredState) else inferred
    firings: List[RuleFiring] = []
    for rule in rules:
        for binding in match_pattern(view, rule.prerequisites, rule.negatives, {TIME_VAR: now}):
            skolems = {p: fresh_skolem() for p in rule.placeholders()}
            firings.append(RuleFiring(rule, binding, now, skolems))
    return firings


def apply_firing(firing: RuleFiring) -> FrozenSet[Triple]:
    """Ground the rule's effects under the firing's binding and skolem map."""
    subst: Dict[Term, Term] = dict(firing.binding)
    for placeholder in firing.rule.placeholders():
        if placeholder not in firing.skolems:
            raise RuleError(f"rule {firing.rule.name}: no skolem for placeholder _:{placeholder.lexical}")
        subst[placeholder] = firing.skolems[placeholder]
    out = set()
    for pattern in firing.rule.effects:
        t = pattern.substitute(subst)
        if not t.is_ground:
            missing = [x.lexical for x in t if not x.is_ground]
            raise RuleError(f"rule {firing.rule.name}: unbound effect variable(s) {', '.join(missing)}")
        out.add(t)
    return frozenset(out)


def rule_index(rules: Iterable[ActionRule]) -> Dict[str, ActionRule]:
    return {r.name: r for r in rules}
