"""Scenario bundles: an ontology, a rules file, and a tasks manifest.

A bundle is a directory holding ``ontology.ttl``, one ``*.dtd`` rules file
and ``tasks.ini``. Each manifest section names a task kind, optionally with a
suffix (``[plan]``, ``[plan.train]``)::

    [plan]
    goal = ?y rdf:type :B_acc_credit
    agent = :a
    max_depth = 4
    expect_plans = 1

``abox`` layers an extra assertion file over the ontology for that task and
``rules`` swaps in a different rules file. Other ``expect_*`` keys and
``golden`` are read by the test harness.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from dtd.kg.ontology import Ontology, parse_ontology
from dtd.kg.syntax import ParseError, TokenStream, tokenize
from dtd.kg.terms import STANDARD_PREFIXES, Term, Triple, render
from dtd.rules import ActionRule, parse_rules

TASK_KINDS = ("project", "plan", "realizability", "executability", "actionbox")
ONTOLOGY_FILE = "ontology.ttl"
MANIFEST_FILE = "tasks.ini"


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Task:
    kind: str
    name: str
    params: Mapping[str, str] = field(default_factory=dict)

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.params.get(key, default)


@dataclass
class Scenario:
    path: Path
    ontology: Ontology
    rules: List[ActionRule]
    tasks: List[Task]
    rules_file: Optional[Path] = None

    @property
    def name(self) -> str:
        return self.path.name

    @property
    def prefixes(self) -> Dict[str, str]:
        return dict(self.ontology.prefixes)

    def task(self, kind: str, name: Optional[str] = None) -> Optional[Task]:
        for t in self.tasks:
            if t.kind == kind and (name is None or t.name == name):
                return t
        return None

    def tasks_of(self, kind: str) -> List[Task]:
        return [t for t in self.tasks if t.kind == kind]

    def ontology_for(self, task: Optional[Task]) -> Ontology:
        if task is None or not task.get("abox"):
            return self.ontology
        path = self.path / task.params["abox"]
        extra = parse_ontology(_read(path), str(path), self.ontology.prefixes)
        return self.ontology.extend(extra)

    def rules_for(self, task: Optional[Task]) -> List[ActionRule]:
        if task is None or not task.get("rules"):
            return self.rules
        path = self.path / task.params["rules"]
        return parse_rules(_read(path), self.ontology.prefixes, str(path))

    def golden(self, task: Task) -> Optional[Path]:
        name = task.get("golden")
        return self.path / name if name else None

    def term(self, text: str) -> Term:
        return parse_term(text, self.prefixes)

    def goal(self, text: str) -> Tuple[Triple, ...]:
        return parse_goal(text, self.prefixes)


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ScenarioError(f"missing file {path}") from None


def parse_goal(text: str, prefixes: Optional[Mapping[str, str]] = None) -> Tuple[Triple, ...]:
    """Parse one or more triple patterns; the trailing '.' is optional."""
    base = dict(STANDARD_PREFIXES)
    base.update(prefixes or {})
    stream = TokenStream(tokenize(text.strip(), "<goal>"), base, "<goal>")
    triples = tuple(t for t, _ in stream.triples_block(True, False, stop=("EOF",)))
    if not stream.at_end():
        raise stream.error("unexpected trailing input")
    if not triples:
        raise ParseError("empty goal", 1, 1, "<goal>")
    return triples


def parse_term(text: str, prefixes: Optional[Mapping[str, str]] = None) -> Term:
    base = dict(STANDARD_PREFIXES)
    base.update(prefixes or {})
    stream = TokenStream(tokenize(text.strip(), "<term>"), base, "<term>")
    term = stream.term(False, False, "subject")
    if not stream.at_end():
        raise stream.error("expected a single IRI")
    return term


def resolve_path(path: str) -> Path:
    """Filesystem path, falling back to the bundled ``corpus/<name>`` set."""
    p = Path(path)
    if p.exists():
        return p
    parts = p.parts
    if parts and parts[0] == "corpus":
        bundled = Path(str(resources.files("dtd") / "corpus")).joinpath(*parts[1:])
        if bundled.exists():
            return bundled
    return p


def corpus_dir() -> Path:
    return Path(str(resources.files("dtd") / "corpus"))


def corpus_names() -> List[str]:
    root = corpus_dir()
    return sorted(d.name for d in root.iterdir() if (d / ONTOLOGY_FILE).exists())


def load_scenario(path) -> Scenario:
    root = resolve_path(str(path))
    if not root.is_dir():
        raise ScenarioError(f"scenario directory not found: {path}")
    onto_path = root / ONTOLOGY_FILE
    if not onto_path.exists():
        raise ScenarioError(f"missing ontology ({ONTOLOGY_FILE}) in {root}")
    ontology = parse_ontology(_read(onto_path), str(onto_path))
    rule_files = sorted(root.glob("*.dtd"))
    rules_file = None
    rules: List[ActionRule] = []
    manifest = root / MANIFEST_FILE
    tasks: List[Task] = []
    default_rules = None
    if manifest.exists():
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(_read(manifest), str(manifest))
        except configparser.Error as exc:
            raise ScenarioError(f"{manifest}: {exc}") from None
        if parser.has_option(parser.default_section, "rules"):
            default_rules = parser.get(parser.default_section, "rules")
        for section in parser.sections():
            kind = section.split(".", 1)[0].strip()
            if kind not in TASK_KINDS:
                raise ScenarioError(f"{manifest}: unknown task kind [{section}]")
            params = dict(parser.items(section))
            tasks.append(Task(kind, section, params))
    if default_rules:
        rules_file = root / default_rules
    elif (root / "rules.dtd").exists():
        rules_file = root / "rules.dtd"
    elif rule_files:
        rules_file = rule_files[0]
    if rules_file is not None:
        rules = parse_rules(_read(rules_file), ontology.prefixes, str(rules_file))
    scenario = Scenario(root, ontology, rules, tasks, rules_file)
    _check_tasks(scenario)
    return scenario


def _check_tasks(scenario: Scenario) -> None:
    known = set()
    for t in scenario.ontology.abox:
        known.update((t.subject, t.object))
    for task in scenario.tasks:
        for key in ("abox", "rules"):
            if task.get(key) and not (scenario.path / task.params[key]).exists():
                raise ScenarioError(f"task [{task.name}]: missing file {task.params[key]}")
        agent = task.get("agent")
        if agent:
            term = scenario.term(agent)
            if term not in known:
                raise ScenarioError(f"task [{task.name}]: agent {render(term, scenario.prefixes)} is not declared")
        if task.get("goal"):
            scenario.goal(task.params["goal"])
