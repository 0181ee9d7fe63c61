"""``dtd`` command line: projection, planning and static checks over scenario bundles.

Exit status: 0 success, 2 semantic negative (clash, unsatisfiable rule, no
plan), 1 usage or input error.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from dtd.checkers import check_executability, check_realizability
from dtd.kg.syntax import ParseError
from dtd.output import (
    actionbox_data,
    dumps,
    emit_actionbox_text,
    emit_plans_json,
    emit_plans_text,
    emit_reports_text,
    emit_timeline_json,
    emit_timeline_text,
    emit_violations_text,
    reports_data,
    violations_data,
)
from dtd.planner import DEFAULT_MAX_DEPTH, GoalError, PlanningProblem, SearchBudgetExceeded, check_actionbox, plan
from dtd.projection import ProjectionError, UnsatisfiableTBoxError, project
from dtd.reasoner import TimeFlowError
from dtd.rules import validate_rules
from dtd.scenario import Scenario, ScenarioError, Task, load_scenario

OK, USAGE, NEGATIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 rather than argparse's 2
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _common(p: argparse.ArgumentParser, fmt: str) -> None:
    p.add_argument("-s", "--scenario", required=True, help="scenario directory (or corpus/<name>)")
    p.add_argument("-o", "--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default=fmt)
    p.add_argument("--task", help="manifest section to take parameters from")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dtd", description="Temporal action reasoning over knowledge graphs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("project", help="project states along the flow of time")
    _common(p, "json")
    p.add_argument("--figure", help="also render a PNG/PDF/SVG chart of the timeline")

    p = sub.add_parser("plan", help="search action plans toward a goal triple")
    _common(p, "json")
    p.add_argument("--goal", help='single goal triple, e.g. "?y rdf:type :B_acc_credit"')
    p.add_argument("--agent", help="performing agent IRI")
    p.add_argument("--actions", help="comma-separated allowed action classes")
    p.add_argument("--max-depth", type=int)
    p.add_argument("--figure", help="also render a chart of the plans")

    p = sub.add_parser("check", help="static rule checks and the ActionBox checker")
    p.add_argument("kind", choices=("realizability", "executability", "actionbox"))
    _common(p, "text")
    p.add_argument("--agent", help="restrict witnesses to one performing agent")
    p.add_argument("--actions", help="comma-separated allowed action classes")
    p.add_argument("--max-depth", type=int)

    p = sub.add_parser("validate", help="check rules for time binding, safety and effects")
    _common(p, "text")
    return parser


def _task(scenario: Scenario, kind: str, name: Optional[str]) -> Optional[Task]:
    if name is None:
        return scenario.task(kind)
    task = scenario.task(kind, name)
    if task is None:
        raise UsageError(f"no [{name}] task of kind {kind} in {scenario.path}")
    return task


def _actions(scenario: Scenario, text: Optional[str]):
    if not text:
        return None
    return frozenset(scenario.term(a) for a in text.split(",") if a.strip())


def _depth(args, task: Optional[Task], default: int) -> int:
    if args.max_depth is not None:
        depth = args.max_depth
    elif task is not None and task.get("max_depth"):
        depth = int(task.params["max_depth"])
    else:
        depth = default
    if depth < 0:
        raise UsageError("--max-depth must be non-negative")
    return depth


def _cmd_project(args, scenario: Scenario) -> Tuple[int, str]:
    task = _task(scenario, "project", args.task)
    timeline = project(scenario.ontology_for(task), scenario.rules_for(task))
    if args.figure:
        from dtd.plotting import plot_timeline

        plot_timeline(timeline, args.figure, scenario.prefixes, title=scenario.name)
    text = emit_timeline_json(timeline, scenario.prefixes) if args.format == "json" else emit_timeline_text(timeline, scenario.prefixes)
    return (NEGATIVE if timeline.truncated else OK), text


def _cmd_plan(args, scenario: Scenario) -> Tuple[int, str]:
    task = _task(scenario, "plan", args.task)
    if args.goal:
        goal = scenario.goal(args.goal)
        if len(goal) != 1:
            raise UsageError("--goal takes exactly one triple pattern")
    elif task is not None and task.get("goal"):
        goal = scenario.goal(task.params["goal"])
    else:
        raise UsageError("no goal: pass --goal or add a [plan] task to the manifest")
    agent_text = args.agent or (task.get("agent") if task else None)
    agent = scenario.term(agent_text) if agent_text else None
    actions = _actions(scenario, args.actions or (task.get("actions") if task else None))
    ontology = scenario.ontology_for(task)
    problem = PlanningProblem(ontology.abox, goal, agent, actions, _depth(args, task, DEFAULT_MAX_DEPTH))
    plans = plan(problem, ontology, scenario.rules_for(task))
    if args.figure:
        from dtd.plotting import plot_plans

        plot_plans(plans, args.figure, title=f"{scenario.name}: {len(plans)} plan(s)")
    emit = emit_plans_json if args.format == "json" else emit_plans_text
    return (OK if plans else NEGATIVE), emit(goal, plans, scenario.prefixes)


def _cmd_check(args, scenario: Scenario) -> Tuple[int, str]:
    task = _task(scenario, args.kind, args.task)
    ontology = scenario.ontology_for(task)
    rules = scenario.rules_for(task)
    if args.kind == "actionbox":
        agent_text = args.agent or (task.get("agent") if task else None)
        agent = scenario.term(agent_text) if agent_text else None
        actions = _actions(scenario, args.actions or (task.get("actions") if task else None))
        findings = check_actionbox(ontology, rules, _depth(args, task, 4), agent=agent, actions=actions)
        status = NEGATIVE if any(f.inconsistent for f in findings) else OK
        if args.format == "json":
            return status, dumps(actionbox_data(findings, scenario.prefixes))
        return status, emit_actionbox_text(findings, scenario.prefixes)
    check = check_realizability if args.kind == "realizability" else check_executability
    reports = check(rules, ontology)
    status = OK if all(r.ok for r in reports) else NEGATIVE
    if args.format == "json":
        return status, dumps(reports_data(reports, scenario.prefixes))
    return status, emit_reports_text(reports, scenario.prefixes)


def _cmd_validate(args, scenario: Scenario) -> Tuple[int, str]:
    rules = scenario.rules_for(_task(scenario, "project", args.task) if args.task else None)
    violations = validate_rules(rules)
    status = NEGATIVE if violations else OK
    if args.format == "json":
        return status, dumps(violations_data(violations))
    return status, emit_violations_text(violations, [r.name for r in rules])


COMMANDS = {"project": _cmd_project, "plan": _cmd_plan, "check": _cmd_check, "validate": _cmd_validate}


def run_command(argv: Sequence[str]) -> Tuple[int, str]:
    """Run one invocation; returns (exit status, output text).

    With ``-o`` the output goes to the file and the returned text is empty.
    """
    parser = build_parser()
    captured = io.StringIO()
    try:
        with contextlib.redirect_stdout(captured):
            args = parser.parse_args(list(argv))
    except UsageError as exc:
        return USAGE, str(exc)
    except SystemExit as exc:  # --help
        return (OK if not exc.code else USAGE), captured.getvalue()
    if not args.command:
        return USAGE, parser.format_help()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        scenario = load_scenario(args.scenario)
        status, text = COMMANDS[args.command](args, scenario)
    except UsageError as exc:
        return USAGE, f"dtd: error: {exc}\n"
    except UnsatisfiableTBoxError as exc:
        return NEGATIVE, f"dtd: {exc}\n"
    except (ParseError, ScenarioError, GoalError, TimeFlowError, ProjectionError, SearchBudgetExceeded, OSError) as exc:
        return USAGE, f"dtd: error: {exc}\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        return status, ""
    return status, text


def main(argv: Optional[List[str]] = None) -> int:
    status, text = run_command(sys.argv[1:] if argv is None else argv)
    (sys.stderr if status == USAGE else sys.stdout).write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
