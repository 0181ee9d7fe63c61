"""Backward-chaining, TBox-aware planning and the ActionBox checker.

Plans are found by regressing goal triples through rule effects. Each
candidate is then replayed forward through the same state-transition model
the projection uses, which filters out candidates whose NOT EXISTS guards
fail (backward unification cannot see them). ``forward_search_oracle``
enumerates the same model breadth-first and is kept as an independent check.
"""

from __future__ import annotations

import itertools
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple

from dtd.kg.ontology import COMPLEMENT, DISJOINT, DOMAIN_AX, RANGE_AX, Ontology, TBoxAxiom
from dtd.kg.state import Binding, State, binding_sort_key, embeds, match_pattern, merge
from dtd.kg.terms import (
    AGENT,
    BEFORE,
    NEXT,
    PLAN_NS,
    TIME_POINT,
    TIME_RELATIONS,
    TIME_VAR,
    TYPE,
    Term,
    TermKind,
    Triple,
    iri,
    render,
    var,
)
from dtd.projection import _fire
from dtd.reasoner import ClassHierarchy, InferredState, classify, extend, infer_time_flow, materialize
from dtd.rules import ActionRule, RuleFiring

DEFAULT_MAX_DEPTH = 8
ORACLE_MAX_DEPTH = 6
DEFAULT_NODE_CAP = 100_000


class GoalError(ValueError):
    pass


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PlanningProblem:
    initial: State
    goals: Tuple[Triple, ...]
    agent: Optional[Term] = None
    actions: Optional[FrozenSet[Term]] = None
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self) -> None:
        object.__setattr__(self, "goals", tuple(self.goals))
        if not self.goals:
            raise GoalError("planning needs at least one goal triple")
        for g in self.goals:
            if g.predicate.kind is not TermKind.IRI:
                raise GoalError(f"goal {g} must have an IRI predicate")
            if g.subject.is_literal:
                raise GoalError(f"goal {g} has a literal subject")
        if self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        if self.agent is not None and not any(self.agent in (t.subject, t.object) for t in self.initial):
            raise GoalError(f"agent {render(self.agent)} is not an individual of the knowledge base")


@dataclass(frozen=True)
class PlanStep:
    rule: str
    action: Term
    binding: Mapping[Term, Term]
    t: int

    def label(self) -> str:
        return f"{self.rule}@{self.t}"


@dataclass(frozen=True)
class Plan:
    steps: Tuple[PlanStep, ...]
    final: Optional[InferredState] = field(default=None, compare=False, repr=False)
    key: Tuple = field(default=(), compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def rules(self) -> Tuple[str, ...]:
        return tuple(s.rule for s in self.steps)


# categories of prerequisites during backward analysis
GOAL_BOUND = "goal"
AGENT_BOUND = "agent"
ACTION = "action"
EXISTING = "individual"
TIME = "time"


@dataclass(frozen=True)
class ConditionPartition:
    satisfied: Tuple[Tuple[Triple, str], ...]
    pending: Tuple[Triple, ...]
    time: Tuple[Triple, ...]

    def category(self, condition: Triple) -> str:
        for c, cat in self.satisfied:
            if c == condition:
                return cat
        if condition in self.time:
            return TIME
        return "pending"


def _allowed(rule: ActionRule, actions: Optional[FrozenSet[Term]], hierarchy: Optional[ClassHierarchy]) -> bool:
    if actions is None:
        return True
    if hierarchy is None:
        return rule.action in actions
    return any(hierarchy.is_subclass(rule.action, a) for a in actions)


def classify_conditions(
    rule: ActionRule,
    goal_binding: Mapping[Term, Term],
    problem: PlanningProblem,
    inferred_initial: InferredState,
    hierarchy: Optional[ClassHierarchy] = None,
) -> ConditionPartition:
    """Sort a rule's prerequisites into satisfied / pending / time.

    Satisfied conditions are bound by the goal and true initially, bound to
    the agent, produced by creating the action instance, or instantiable from
    individuals of the initial inferred state. Everything else is pending and
    becomes a subgoal.
    """
    view = inferred_initial.view
    av = rule.action_var
    binding: Dict[Term, Term] = {k: v for k, v in goal_binding.items() if v.is_ground}
    goal_vars = set(binding)
    agent_var = rule.agent_var
    if problem.agent is not None and agent_var is not None:
        binding.setdefault(agent_var, problem.agent)
    action_ok = _allowed(rule, problem.actions, hierarchy)
    satisfied: List[Tuple[Triple, str]] = []
    pending: List[Triple] = []
    time: List[Triple] = []
    for cond in rule.prerequisites:
        if cond.predicate in TIME_RELATIONS and cond.object == TIME_VAR:
            time.append(cond)
        elif av is not None and cond.subject == av:
            if cond.predicate == AGENT and problem.agent is not None:
                satisfied.append((cond, AGENT_BOUND))
            elif action_ok:
                satisfied.append((cond, ACTION))
            else:
                pending.append(cond)
        else:
            cvars = set(cond.variables())
            if cvars and cvars <= goal_vars:
                if cond.substitute(binding) in view:
                    satisfied.append((cond, GOAL_BOUND))
                else:
                    pending.append(cond)
            elif embeds(view, [cond], binding):
                satisfied.append((cond, EXISTING))
            else:
                pending.append(cond)
    return ConditionPartition(tuple(satisfied), tuple(pending), tuple(time))


# -- forward model ----------------------------------------------------------------

class _Fresh(NamedTuple):
    """Reference to an individual minted by an earlier plan step."""

    step: object
    rule: str
    placeholder: Term


class _Applied(NamedTuple):
    rule: ActionRule
    binding: Mapping[Term, Term]  # full firing binding
    created: Mapping[Tuple[str, Term], Term]  # (rule, placeholder) -> skolem, every firing at this step


class _Node(NamedTuple):
    state: InferredState
    steps: Tuple[_Applied, ...]


def plan_time_point(k: int) -> Term:
    return iri(f"{PLAN_NS}T{k}")


def plan_action(k: int) -> Term:
    return iri(f"{PLAN_NS}act{k}")


def action_params(rule: ActionRule) -> List[Term]:
    """Variables fixed by the action instance (agent and other parameters)."""
    av = rule.action_var
    return sorted({v for t in rule.action_triples() for v in t.variables()} - {av, TIME_VAR})


class _World:
    """State-transition model shared by the backward replay and the oracle."""

    def __init__(self, problem: PlanningProblem, ontology: Ontology, rules: Sequence[ActionRule],
                 hierarchy: Optional[ClassHierarchy] = None) -> None:
        self.problem = problem
        self.ontology = ontology
        self.rules = list(rules)
        self.hierarchy = hierarchy or classify(ontology.tbox, ontology.classes)
        self.allowed = [r for r in self.rules if r.action_var is not None
                        and _allowed(r, problem.actions, self.hierarchy)]
        self.initial = materialize(problem.initial, ontology, self.hierarchy)
        flow = infer_time_flow(self.initial)
        self.last_declared = flow.points[-1] if len(flow) else None
        self.action_classes = {r.action for r in self.rules}

    def individuals(self, view: State) -> List[Term]:
        out = set()
        for t in view.index.by_p.get(TYPE, ()):
            s = t.subject
            if t.object == TIME_POINT or t.object in self.action_classes:
                continue
            if s.kind is TermKind.IRI and s.lexical.startswith(PLAN_NS):
                continue
            out.add(s)
        points = {t.subject for t in view.index.by_po.get((TYPE, TIME_POINT), ())}
        actions = {t.subject for rel in TIME_RELATIONS for t in view.index.by_p.get(rel, ())}
        return sorted(out - points - actions)

    def options(self, rule: ActionRule, state: InferredState, k: int,
                seed: Optional[Mapping[Term, Term]] = None) -> List[Binding]:
        """Bindings under which ``rule`` is a candidate step ``k`` (guards unchecked)."""
        av = rule.action_var
        if av is None:
            return []
        start: Binding = dict(seed or {})
        start[TIME_VAR] = plan_time_point(k)
        start[av] = plan_action(k)
        agent_var = rule.agent_var
        if self.problem.agent is not None and agent_var is not None:
            if start.get(agent_var, self.problem.agent) != self.problem.agent:
                return []
            start[agent_var] = self.problem.agent
        view = state.view
        params = action_params(rule)
        out: Dict[Tuple, Binding] = {}
        for b in match_pattern(view, rule.world_conditions(), (), start):
            free = [v for v in params if v not in b]
            for combo in itertools.product(self.individuals(view), repeat=len(free)):
                extended = dict(b)
                extended.update(zip(free, combo))
                out.setdefault(tuple(extended[v] for v in params), extended)
        return list(out.values())

    def apply(self, state: InferredState, k: int, rule: ActionRule, binding: Mapping[Term, Term]) -> Optional[_Node]:
        """Execute step ``k``; None when the state is inconsistent or the rule does not fire."""
        if not state.consistent:
            return None
        now = plan_time_point(k)
        full = dict(binding)
        full[TIME_VAR] = now
        full[rule.action_var] = plan_action(k)
        instance = [Triple(plan_action(k), TYPE, rule.action)]
        for t in rule.action_triples():
            g = t.substitute(full)
            if not g.is_ground:
                return None
            instance.append(g)
        after = plan_time_point(k + 1)
        prev = plan_time_point(k - 1) if k > 1 else self.last_declared
        structure = [Triple(now, TYPE, TIME_POINT), Triple(after, TYPE, TIME_POINT),
                     Triple(now, NEXT, after), Triple(now, BEFORE, after)]
        if prev is not None:
            structure += [Triple(prev, NEXT, now), Triple(prev, BEFORE, now)]
        pre = extend(state, instance + structure, self.hierarchy)
        firings, effects = _fire(pre, now, self.rules)
        intended = None
        keys = action_params(rule) + [rule.action_var, TIME_VAR]
        for f in firings:
            if f.rule.name == rule.name and all(f.binding.get(v) == full[v] for v in keys):
                intended = f
                break
        if intended is None:
            return None
        created: Dict[Tuple[str, Term], Term] = {}
        for f in [intended] + [f for f in firings if f is not intended]:
            for ph, sk in f.skolems.items():
                created.setdefault((f.rule.name, ph), sk)
        result = materialize(merge(pre.view, effects, label=now.lexical), self.ontology, self.hierarchy)
        return _Node(result, (_Applied(rule, dict(intended.binding), created),))

    def goal_reached(self, state: InferredState) -> bool:
        return embeds(state.view, list(self.problem.goals))

    def replay(self, steps: Sequence[Tuple[object, ActionRule, Mapping[Term, object]]]) -> List[_Node]:
        """Run a step list whose bindings may reference individuals minted by
        earlier steps; unbound variables are enumerated. Returns every
        complete execution."""
        results: List[_Node] = []

        def go(i: int, node: _Node, created: Dict[object, Mapping[Tuple[str, Term], Term]]) -> None:
            if i == len(steps):
                results.append(node)
                return
            step_id, rule, partial = steps[i]
            seed: Binding = {}
            for v, val in partial.items():
                if isinstance(val, _Fresh):
                    made = created.get(val.step, {}).get((val.rule, val.placeholder))
                    if made is None:
                        return
                    seed[v] = made
                else:
                    seed[v] = val
            k = i + 1
            for option in self.options(rule, node.state, k, seed):
                nxt = self.apply(node.state, k, rule, option)
                if nxt is None:
                    continue
                applied = nxt.steps[0]
                go(i + 1, _Node(nxt.state, node.steps + (applied,)), {**created, step_id: applied.created})

        go(0, _Node(self.initial, ()), {})
        return results


def _value_key(term: Term, creators: Mapping[Term, Tuple]) -> Tuple:
    if term in creators:
        return ("new",) + creators[term]
    return ("term", term)


def _trace_keys(steps: Sequence[_Applied]) -> Tuple:
    """Name-independent identity of a step sequence: individuals minted during
    the plan are identified by the step that created them."""
    creators: Dict[Term, Tuple] = {}
    keys = []
    for applied in steps:
        rule = applied.rule
        items = tuple((v, _value_key(applied.binding[v], creators)) for v in action_params(rule))
        key = (rule.name, items)
        keys.append(key)
        for (rname, ph), sk in applied.created.items():
            creators.setdefault(sk, (key, rname, ph))
    return tuple(keys)


def _as_references(steps: Sequence[_Applied]) -> List[Tuple[object, ActionRule, Dict[Term, object]]]:
    """Turn an executed trace back into a replayable step list."""
    creators: Dict[Term, _Fresh] = {}
    out = []
    for i, applied in enumerate(steps):
        rule = applied.rule
        partial: Dict[Term, object] = {}
        for v in action_params(rule):
            t = applied.binding[v]
            partial[v] = creators.get(t, t)
        out.append((i, rule, partial))
        for (rname, ph), sk in applied.created.items():
            creators.setdefault(sk, _Fresh(i, rname, ph))
    return out


def _is_subsequence(short: Sequence, long: Sequence) -> bool:
    it = iter(long)
    return all(any(x == y for y in it) for x in short)


def _to_plan(node: _Node, key: Tuple) -> Plan:
    steps = tuple(
        PlanStep(a.rule.name, a.rule.action, dict(sorted(a.binding.items())), i + 1)
        for i, a in enumerate(node.steps)
    )
    return Plan(steps, node.state, key)


def _plan_order(plan: Plan) -> Tuple:
    return (len(plan.steps), plan.rules, plan.key)


# -- forward oracle ----------------------------------------------------------------

def forward_search_oracle(
    problem: PlanningProblem,
    ontology: Ontology,
    rules: Sequence[ActionRule],
    node_cap: Optional[int] = None,
    hierarchy: Optional[ClassHierarchy] = None,
) -> List[Plan]:
    """Breadth-first enumeration of firing sequences up to ``max_depth``.

    Returns the goal-reaching sequences that have no goal-reaching proper
    subsequence (redundant detours are dropped), deduplicated and ordered.
    """
    if problem.max_depth > ORACLE_MAX_DEPTH:
        raise ValueError(f"oracle search is limited to depth {ORACLE_MAX_DEPTH}")
    if node_cap is None:
        node_cap = int(os.environ.get("DTD_NODE_CAP", DEFAULT_NODE_CAP))
    world = _World(problem, ontology, rules, hierarchy)
    frontier = deque([_Node(world.initial, ())])
    found: Dict[Tuple, _Node] = {}
    nodes = 0
    while frontier:
        node = frontier.popleft()
        nodes += 1
        if nodes > node_cap:
            raise SearchBudgetExceeded(f"forward search exceeded {node_cap} nodes")
        if world.goal_reached(node.state):
            found.setdefault(_trace_keys(node.steps), node)
            continue
        depth = len(node.steps)
        if depth >= problem.max_depth or not node.state.consistent:
            continue
        k = depth + 1
        for rule in world.allowed:
            for option in world.options(rule, node.state, k):
                nxt = world.apply(node.state, k, rule, option)
                if nxt is not None:
                    frontier.append(_Node(nxt.state, node.steps + nxt.steps))
    keys = list(found)
    plans = []
    for key in keys:
        if any(other != key and len(other) < len(key) and _is_subsequence(other, key) for other in keys):
            continue
        plans.append(_to_plan(found[key], key))
    return sorted(plans, key=_plan_order)


# -- backward planner ---------------------------------------------------------------

@dataclass
class PlanStats:
    expansions: int = 0
    candidates: int = 0
    replays: int = 0


class _Instance(NamedTuple):
    index: int
    rule: ActionRule
    rename: Mapping[Term, Term]  # original variable/placeholder -> search variable
    fresh: Mapping[Term, Term]  # search variable -> original placeholder


def _rename(rule: ActionRule, index: int) -> _Instance:
    mapping: Dict[Term, Term] = {}
    fresh: Dict[Term, Term] = {}
    for v in rule.variables():
        mapping[v] = var(f"{v.lexical}~{index}")
    for ph in rule.placeholders():
        nv = var(f"?!{ph.lexical}~{index}")
        mapping[ph] = nv
        fresh[nv] = ph
    return _Instance(index, rule, mapping, fresh)


def _walk(term: Term, subst: Mapping[Term, Term]) -> Term:
    while term.is_variable and term in subst:
        term = subst[term]
    return term


def _unify_term(a: Term, b: Term, subst: Dict[Term, Term]) -> Optional[Dict[Term, Term]]:
    a, b = _walk(a, subst), _walk(b, subst)
    if a == b:
        return subst
    if a.is_variable:
        return {**subst, a: b}
    if b.is_variable:
        return {**subst, b: a}
    return None


def _unify_all(pairs: Iterable[Tuple[Term, Term]], subst: Dict[Term, Term]) -> Optional[Dict[Term, Term]]:
    for a, b in pairs:
        subst = _unify_term(a, b, subst)
        if subst is None:
            return None
    return subst


def _resolve(term: Term, subst: Mapping[Term, Term]) -> Term:
    return _walk(term, subst)


def _apply(t: Triple, subst: Mapping[Term, Term]) -> Triple:
    return Triple(_resolve(t.subject, subst), _resolve(t.predicate, subst), _resolve(t.object, subst))


def _pattern_key(t: Triple) -> Tuple:
    names: Dict[Term, int] = {}
    out = []
    for term in t:
        if term.is_variable:
            out.append(("var", names.setdefault(term, len(names))))
        else:
            out.append(("term", term))
    return tuple(out)


class _Backward:
    def __init__(self, problem: PlanningProblem, ontology: Ontology, rules: Sequence[ActionRule],
                 hierarchy: Optional[ClassHierarchy]) -> None:
        self.problem = problem
        self.world = _World(problem, ontology, rules, hierarchy)
        self.hierarchy = self.world.hierarchy
        self.view = self.world.initial.view
        self.domains: Dict[Term, Set[Term]] = {}
        self.ranges: Dict[Term, Set[Term]] = {}
        for ax in ontology.tbox:
            if ax.kind == DOMAIN_AX:
                self.domains.setdefault(ax.operands[0], set()).add(ax.operands[1])
            elif ax.kind == RANGE_AX:
                self.ranges.setdefault(ax.operands[0], set()).add(ax.operands[1])
        self.stats = PlanStats()
        self.candidates: Dict[Tuple, List[Tuple[object, ActionRule, Dict[Term, object]]]] = {}

    # unification of a condition with an effect, consulting the TBox
    def unify(self, cond: Triple, effect: Triple, subst: Dict[Term, Term]) -> List[Dict[Term, Term]]:
        cs, cp, co = (_walk(x, subst) for x in cond)
        es, ep, eo = (_walk(x, subst) for x in effect)
        h = self.hierarchy
        out: List[Dict[Term, Term]] = []
        if cp == TYPE and ep == TYPE:
            if not co.is_variable and not eo.is_variable:
                if h.is_subclass(eo, co):
                    s = _unify_term(cs, es, subst)
                    if s is not None:
                        out.append(s)
            else:
                s = _unify_all([(cs, es), (co, eo)], subst)
                if s is not None:
                    out.append(s)
            return out
        if cp == TYPE and not co.is_variable and not ep.is_variable and ep != TYPE:
            for d in sorted(self.domains.get(ep, ())):
                if h.is_subclass(d, co):
                    s = _unify_term(cs, es, subst)
                    if s is not None:
                        out.append(s)
            if not eo.is_literal:
                for r in sorted(self.ranges.get(ep, ())):
                    if h.is_subclass(r, co):
                        s = _unify_term(cs, eo, subst)
                        if s is not None:
                            out.append(s)
            return out
        if not cp.is_variable and not ep.is_variable:
            if cp == TYPE or ep == TYPE or not h.is_subproperty(ep, cp):
                return out
            s = _unify_all([(cs, es), (co, eo)], subst)
        else:
            s = _unify_all([(cs, es), (cp, ep), (co, eo)], subst)
        if s is not None:
            out.append(s)
        return out

    def achieved(self, cond: Triple, effects: Sequence[Triple]) -> bool:
        h = self.hierarchy
        for e in effects:
            if e == cond:
                return True
            if cond.subject == e.subject and cond.object == e.object and cond.predicate.is_ground \
                    and e.predicate.is_ground and cond.predicate != TYPE and e.predicate != TYPE \
                    and h.is_subproperty(e.predicate, cond.predicate):
                return True
            if cond.predicate == TYPE == e.predicate and cond.subject == e.subject \
                    and cond.object.is_ground and e.object.is_ground and h.is_subclass(e.object, cond.object):
                return True
        return False

    def producible(self, cond: Triple) -> bool:
        """Could any allowed rule's effect yield this condition?"""
        for rule in self.world.allowed:
            inst = _rename(rule, 0)
            for e in rule.effects:
                if self.unify(cond, e.substitute(inst.rename), {}):
                    return True
        return False

    def run(self) -> None:
        self.search(list(dict.fromkeys(self.problem.goals)), {}, (), frozenset())

    def search(self, goals: List[Triple], subst: Dict[Term, Term], insts: Tuple[_Instance, ...],
               path: FrozenSet[Tuple]) -> None:
        self.stats.expansions += 1
        pending = [c for c in goals if not embeds(self.view, [c])]
        if not pending:
            solutions = match_pattern(self.view, goals)
            for theta in solutions:
                self.emit(insts, {**subst, **theta})
            if solutions:
                return
            targets = goals
        else:
            targets = pending
        if len(insts) >= self.problem.max_depth:
            return
        # a pending condition no rule can produce closes the path
        if any(not self.producible(c) for c in pending):
            return
        index = len(insts) + 1
        for cond in targets:
            key = _pattern_key(cond)
            if key in path:
                continue
            for rule in self.world.allowed:
                inst = _rename(rule, index)
                effects = [e.substitute(inst.rename) for e in rule.effects]
                for effect in effects:
                    for s in self.unify(cond, effect, subst):
                        s = self.bind_agent(inst, s)
                        if s is None:
                            continue
                        self.regress(goals, cond, inst, effects, s, insts, path | {key})

    def bind_agent(self, inst: _Instance, subst: Dict[Term, Term]) -> Optional[Dict[Term, Term]]:
        agent_var = inst.rule.agent_var
        if self.problem.agent is None or agent_var is None:
            return subst
        return _unify_term(inst.rename[agent_var], self.problem.agent, subst)

    def regress(self, goals, cond, inst, effects, subst, insts, path) -> None:
        rule = inst.rule
        made = [_apply(e, subst) for e in effects]
        rest = []
        for g in goals:
            if g is cond:
                continue
            g2 = _apply(g, subst)
            if self.achieved(g2, made):
                continue
            if any(t in inst.fresh for t in g2):
                return  # the minted individual cannot satisfy it before it exists
            rest.append(g2)
        goal_binding = {v: _resolve(nv, subst) for v, nv in inst.rename.items() if v.is_variable}
        partition = classify_conditions(rule, goal_binding, self.problem, self.world.initial, self.hierarchy)
        if partition.pending and any(c.subject == rule.action_var for c in partition.pending):
            return
        new = [_apply(c.substitute(inst.rename), subst) for c in rule.world_conditions()]
        merged = list(dict.fromkeys(rest + new))
        self.search(merged, subst, insts + (inst,), path)

    def emit(self, insts: Tuple[_Instance, ...], subst: Mapping[Term, Term]) -> None:
        fresh_owner: Dict[Term, _Instance] = {}
        for inst in insts:
            for nv in inst.fresh:
                fresh_owner[nv] = inst
        steps = []
        for inst in reversed(insts):
            rule = inst.rule
            skip = {rule.action_var, TIME_VAR}
            partial: Dict[Term, object] = {}
            for v, nv in inst.rename.items():
                if not v.is_variable or v in skip:
                    continue
                val = _resolve(nv, subst)
                if val in fresh_owner:
                    owner = fresh_owner[val]
                    partial[v] = _Fresh(owner.index, owner.rule.name, owner.fresh[val])
                elif val.is_ground:
                    partial[v] = val
            steps.append((inst.index, rule, partial))
        key = tuple((rule.name, tuple(sorted(p.items(), key=lambda kv: kv[0]))) for _, rule, p in steps)
        self.stats.candidates += 1
        self.candidates.setdefault(key, steps)


def _irredundant(world: _World, node: _Node) -> bool:
    """No proper subsequence of the executed steps also reaches the goal."""
    steps = _as_references(node.steps)
    n = len(steps)
    for size in range(n):
        for keep in itertools.combinations(range(n), size):
            sub = [steps[i] for i in keep]
            for result in world.replay(sub):
                if world.goal_reached(result.state):
                    return False
    return True


def plan(
    problem: PlanningProblem,
    ontology: Ontology,
    rules: Sequence[ActionRule],
    hierarchy: Optional[ClassHierarchy] = None,
    stats: Optional[PlanStats] = None,
) -> List[Plan]:
    """All plans reaching the goals from the initial state within ``max_depth`` steps.

    Time indices in each plan run 1..k. A goal already entailed initially
    yields a single empty plan.
    """
    backward = _Backward(problem, ontology, rules, hierarchy)
    backward.run()
    world = backward.world
    found: Dict[Tuple, _Node] = {}
    for steps in backward.candidates.values():
        backward.stats.replays += 1
        for node in world.replay(steps):
            if world.goal_reached(node.state):
                found.setdefault(_trace_keys(node.steps), node)
    plans = [_to_plan(node, key) for key, node in found.items() if _irredundant(world, node)]
    if stats is not None:
        stats.expansions += backward.stats.expansions
        stats.candidates += backward.stats.candidates
        stats.replays += backward.stats.replays
    return sorted(plans, key=_plan_order)


def plan_replay_ontology(problem: PlanningProblem, ontology: Ontology, plan_: Plan, rules: Sequence[ActionRule]) -> Ontology:
    """An ontology whose projection re-enacts ``plan_`` at fresh time points T1..Tk+1."""
    rule_map = {r.name: r for r in rules}
    initial = materialize(problem.initial, ontology)
    flow = infer_time_flow(initial)
    prev = flow.points[-1] if len(flow) else None
    extra: List[Triple] = []
    k = len(plan_.steps)
    for i in range(1, k + 2):
        t = plan_time_point(i)
        extra.append(Triple(t, TYPE, TIME_POINT))
        if prev is not None:
            extra.append(Triple(prev, BEFORE, t))
        prev = t
    for step_ in plan_.steps:
        rule = rule_map[step_.rule]
        act = plan_action(step_.t)
        extra.append(Triple(act, TYPE, rule.action))
        for t in rule.action_triples():
            g = t.substitute(step_.binding)
            if any(x.is_skolem for x in g):
                raise ValueError(f"step {step_.label()} refers to an individual minted during planning")
            extra.append(g)
    return ontology.with_abox(State(problem.initial.triples | frozenset(extra)))


# -- ActionBox checker ----------------------------------------------------------------

@dataclass(frozen=True)
class ActionBoxFinding:
    axiom: TBoxAxiom
    goal: Tuple[Triple, ...]
    plans: Tuple[Plan, ...]

    @property
    def inconsistent(self) -> bool:
        return bool(self.plans)


def inconsistency_axioms(ontology: Ontology) -> List[TBoxAxiom]:
    return sorted({a.normalized() for a in ontology.tbox if a.kind in (DISJOINT, COMPLEMENT)})


def check_actionbox(
    ontology: Ontology,
    rules: Sequence[ActionRule],
    max_depth: int = 4,
    agent: Optional[Term] = None,
    initial: Optional[State] = None,
    actions: Optional[FrozenSet[Term]] = None,
) -> List[ActionBoxFinding]:
    """Plan toward every disjointness/complement clash from the initial state.

    Each returned plan has been replayed forward and verified to produce the
    targeted clash.
    """
    hierarchy = classify(ontology.tbox, ontology.classes)
    start = ontology.abox if initial is None else initial
    x = var("?x")
    findings = []
    for axiom in inconsistency_axioms(ontology):
        c, d = axiom.operands
        goal = (Triple(x, TYPE, c), Triple(x, TYPE, d))
        problem = PlanningProblem(start, goal, agent, actions, max_depth)
        witnesses = []
        for p in plan(problem, ontology, rules, hierarchy):
            if p.final is not None and any(cl.axiom == axiom for cl in p.final.clashes):
                witnesses.append(p)
        findings.append(ActionBoxFinding(axiom, goal, tuple(witnesses)))
    return findings
