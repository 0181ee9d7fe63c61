"""Deterministic JSON and tab-delimited renderings of engine results.

Skolem individuals are renumbered ``_:b1, _:b2, ...`` in creation order so
two runs over the same input produce byte-identical output.
"""

from __future__ import annotations

import json
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from dtd.checkers import CheckReport
from dtd.kg.terms import TIME_VAR, Term, Triple, render, skolem_number
from dtd.planner import ActionBoxFinding, Plan
from dtd.projection import Timeline
from dtd.reasoner import Clash
from dtd.rules import Violation


class Renderer:
    """Term rendering with prefix compaction and canonical skolem names."""

    def __init__(self, prefixes: Optional[Mapping[str, str]] = None, skolems: Iterable[Term] = ()) -> None:
        self.prefixes = dict(prefixes or {})
        ordered = sorted(set(skolems), key=skolem_number)
        self.names = {s: f"_:b{i}" for i, s in enumerate(ordered, 1)}

    def term(self, t: Term) -> str:
        if t in self.names:
            return self.names[t]
        return render(t, self.prefixes)

    def triple(self, t: Triple) -> str:
        return " ".join(self.term(x) for x in t)

    def triples(self, triples: Iterable[Triple]) -> List[str]:
        return sorted(self.triple(t) for t in triples)

    def clash(self, c: Clash) -> Dict[str, Any]:
        return {
            "individual": self.term(c.individual),
            "axiom": c.axiom.render(self.prefixes),
            "support": self.triples(c.supporting),
        }

    def binding(self, binding: Mapping[Term, Term]) -> Dict[str, str]:
        return {v.lexical: self.term(val) for v, val in binding.items() if v != TIME_VAR}


def _skolems(triples: Iterable[Triple]) -> List[Term]:
    return [x for t in triples for x in t if x.is_skolem]


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- projection --

def timeline_data(timeline: Timeline, prefixes: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    every = list(timeline.initial.view) + [t for s in timeline.states.values() for t in s.view]
    r = Renderer(prefixes, _skolems(every))
    states = {}
    for point, state in timeline.states.items():
        states[r.term(point)] = {
            "added": r.triples(timeline.added(point)),
            "clashes": [r.clash(c) for c in state.clashes],
            "fired": sorted(f.rule.name for f in timeline.firings.get(point, ())),
        }
    init = timeline.initial
    return {
        "flow": [r.term(p) for p in timeline.flow.points],
        "initial": {
            "asserted": r.triples(init.base),
            "derived": r.triples(init.derived),
            "clashes": [r.clash(c) for c in init.clashes],
        },
        "states": states,
        "inconsistent_at": r.term(timeline.inconsistent_at) if timeline.inconsistent_at is not None else None,
        "warnings": list(timeline.warnings),
    }


def emit_timeline_json(timeline: Timeline, prefixes: Optional[Mapping[str, str]] = None) -> str:
    return dumps(timeline_data(timeline, prefixes))


def emit_timeline_text(timeline: Timeline, prefixes: Optional[Mapping[str, str]] = None) -> str:
    data = timeline_data(timeline, prefixes)
    lines = []
    for point in data["flow"]:
        entry = data["states"].get(point)
        if entry is None:
            continue
        for t in entry["added"]:
            lines.append(f"{point}\t+\t{t}")
        for c in entry["clashes"]:
            lines.append(f"{point}\tCLASH\t{c['individual']} {c['axiom']}")
    if data["inconsistent_at"]:
        lines.append(f"{data['inconsistent_at']}\tSTOP\tinconsistent state")
    return "".join(line + "\n" for line in lines)


# -- planning --

def _plan_skolems(plans: Sequence[Plan]) -> List[Term]:
    return [v for p in plans for s in p.steps for v in s.binding.values() if v.is_skolem]


def plan_data(plan: Plan, r: Renderer) -> Dict[str, Any]:
    return {
        "steps": [
            {"rule": s.rule, "action": r.term(s.action), "binding": r.binding(s.binding), "t": s.t}
            for s in plan.steps
        ]
    }


def plans_data(goal: Sequence[Triple], plans: Sequence[Plan], prefixes: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    r = Renderer(prefixes, _plan_skolems(plans))
    return {"goal": " . ".join(r.triple(g) for g in goal), "plans": [plan_data(p, r) for p in plans]}


def emit_plans_json(goal, plans, prefixes=None) -> str:
    return dumps(plans_data(goal, plans, prefixes))


def _step_text(step: Mapping[str, Any]) -> str:
    args = ",".join(f"{k}={v}" for k, v in sorted(step["binding"].items()))
    return f"{step['rule']}({args})"


def emit_plans_text(goal, plans, prefixes=None) -> str:
    data = plans_data(goal, plans, prefixes)
    lines = []
    for i, p in enumerate(data["plans"], 1):
        if not p["steps"]:
            lines.append(f"{i}\t0\t(empty plan)")
        for s in p["steps"]:
            lines.append(f"{i}\t{s['t']}\t{_step_text(s)}")
    return "".join(line + "\n" for line in lines)


# -- checks --

def reports_data(reports: Sequence[CheckReport], prefixes=None) -> Dict[str, Any]:
    r = Renderer(prefixes, [x for rep in reports for c in rep.clashes for x in _skolems(c.supporting)])
    return {
        "reports": [
            {"rule": rep.rule, "verdict": rep.verdict, "clashes": [r.clash(c) for c in rep.clashes]}
            for rep in reports
        ]
    }


def emit_reports_text(reports: Sequence[CheckReport], prefixes=None) -> str:
    return "".join(rep.line(prefixes) + "\n" for rep in reports)


def actionbox_data(findings: Sequence[ActionBoxFinding], prefixes=None) -> Dict[str, Any]:
    r = Renderer(prefixes, _plan_skolems([p for f in findings for p in f.plans]))
    return {
        "inconsistent": any(f.inconsistent for f in findings),
        "findings": [
            {
                "axiom": f.axiom.render(prefixes),
                "goal": " . ".join(r.triple(g) for g in f.goal),
                "plans": [plan_data(p, r) for p in f.plans],
            }
            for f in findings
        ],
    }


def emit_actionbox_text(findings: Sequence[ActionBoxFinding], prefixes=None) -> str:
    data = actionbox_data(findings, prefixes)
    lines = []
    for f in data["findings"]:
        verdict = "UNSAT" if f["plans"] else "ok"
        lines.append(f"{f['axiom']}\t{verdict}\t{len(f['plans'])} witness plan(s)")
        for i, p in enumerate(f["plans"], 1):
            lines.append(f"\t{i}\t" + " ; ".join(f"{_step_text(s)}@{s['t']}" for s in p["steps"]))
    return "".join(line + "\n" for line in lines)


def violations_data(violations: Sequence[Violation]) -> Dict[str, Any]:
    return {"violations": [{"rule": v.rule, "kind": v.kind, "detail": v.detail} for v in violations]}


def emit_violations_text(violations: Sequence[Violation], rule_names: Sequence[str]) -> str:
    bad = {v.rule for v in violations}
    lines = [f"{v.rule}\t{v.kind}\t{v.detail}" for v in violations]
    lines += [f"{name}\tok\t" for name in rule_names if name not in bad]
    return "".join(line + "\n" for line in lines)
