import json
import subprocess
import sys

import pytest

from dtd.cli import run_command
from dtd.scenario import ScenarioError, corpus_names, load_scenario, parse_goal

from conftest import CORPUS, scenario


def test_bank_bundle(bank):
    assert len(bank.rules) == 3
    assert len(bank.tasks) == 4
    assert {t.kind for t in bank.tasks} == {"project", "plan", "realizability", "executability"}


def test_empty_directory(tmp_path):
    with pytest.raises(ScenarioError, match="missing ontology"):
        load_scenario(tmp_path)


def test_sports_expects_two_witnesses(sports):
    assert sports.task("actionbox").params["expect_plans"] == "2"


def test_unknown_task_kind(tmp_path):
    (tmp_path / "ontology.ttl").write_text("")
    (tmp_path / "tasks.ini").write_text("[dance]\n")
    with pytest.raises(ScenarioError, match="unknown task"):
        load_scenario(tmp_path)


def test_undeclared_agent(tmp_path):
    (tmp_path / "ontology.ttl").write_text("@prefix : <urn:x#> .\n:a a :B .\n")
    (tmp_path / "tasks.ini").write_text("[plan]\ngoal = ?x a :B\nagent = :nobody\n")
    with pytest.raises(ScenarioError, match="agent"):
        load_scenario(tmp_path)


def test_goal_parser_optional_dot():
    assert parse_goal("?y rdf:type <urn:C>") == parse_goal("?y rdf:type <urn:C> .")
    assert len(parse_goal("<urn:a> <urn:p> ?x . ?x <urn:p> <urn:b>")) == 2


def _run(*argv):
    return run_command(list(argv))


def test_project_bank_to_file(tmp_path):
    out = tmp_path / "out.json"
    status, text = _run("project", "-s", "corpus/bank", "-o", str(out))
    assert status == 0 and text == ""
    data = json.loads(out.read_text())
    added = data["states"][":t0"]["added"]
    assert added == [":a :holds _:b1", "_:b1 rdf:type :B_acc", "_:b1 rdf:type :B_acc_no_credit"]
    assert set(data) >= {"flow", "states", "initial"}


def test_empty_rules_timeline_json(tmp_path):
    (tmp_path / "ontology.ttl").write_text("@prefix : <urn:x#> .\n@prefix dtd: <urn:dtd:ns#> .\n:t0 dtd:before :t1 .\n")
    status, text = _run("project", "-s", str(tmp_path))
    data = json.loads(text)
    assert status == 0 and all(s["added"] == [] for s in data["states"].values())


def test_actionbox_exit_two():
    status, text = _run("check", "actionbox", "-s", "corpus/sports")
    assert status == 2
    assert text.count("register") == 4


def test_actionbox_modified_exit_zero():
    status, _ = _run("check", "actionbox", "-s", "corpus/sports", "--task", "actionbox.modified")
    assert status == 0


def test_plan_bank_command():
    status, text = _run("plan", "-s", "corpus/bank", "--goal", "?y rdf:type :B_acc_credit", "--agent", ":a")
    data = json.loads(text)
    assert status == 0
    assert [[s["rule"] for s in p["steps"]] for p in data["plans"]] == [["GetLetter", "OpeningB_acc_credit"]]
    assert [s["t"] for s in data["plans"][0]["steps"]] == [1, 2]


def test_plan_no_plan_exit_two():
    status, text = _run("plan", "-s", "corpus/bank", "--goal", "?y rdf:type :B_acc_credit", "--agent", ":a", "--max-depth", "1")
    assert status == 2 and json.loads(text)["plans"] == []


def test_plan_cli_single_goal_only():
    status, text = _run("plan", "-s", "corpus/blocks", "--goal", ":a :on :b . :b :on :c")
    assert status == 1 and "exactly one" in text


def test_check_lines():
    status, text = _run("check", "realizability", "-s", "corpus/bank")
    assert status == 0
    assert text.splitlines()[0].split("\t")[:2] == ["OpeningB_acc_credit", "ok"]


def test_check_unsat_exit_two(tmp_path):
    (tmp_path / "ontology.ttl").write_text("@prefix : <urn:x#> .\n@prefix owl: <http://www.w3.org/2002/07/owl#> .\n:V owl:disjointWith :B .\n")
    (tmp_path / "rules.dtd").write_text(
        "@prefix : <urn:x#> .\n@prefix dtd: <urn:dtd:ns#> .\n"
        "RULE both ACTION :R CONSTRUCT { _:s a :V . _:s a :B . } WHERE { ?a dtd:hasTime ?_T . }\n"
    )
    status, text = _run("check", "realizability", "-s", str(tmp_path), "--format", "json")
    assert status == 2 and json.loads(text)["reports"][0]["verdict"] == "unsatisfiable"


def test_validate_exit_codes(tmp_path):
    assert _run("validate", "-s", "corpus/yale")[0] == 0
    (tmp_path / "ontology.ttl").write_text("")
    (tmp_path / "rules.dtd").write_text("RULE r ACTION <urn:A> CONSTRUCT { ?x <urn:p> ?z . } WHERE { ?x <urn:q> ?y . }\n")
    status, text = _run("validate", "-s", str(tmp_path))
    assert status == 2 and "missing time binding" in text and "unsafe variable" in text


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["project"],
    ["plan", "-s", "corpus/bank", "--max-depth", "x"],
    ["project", "-s", "/nonexistent/dir"],
    ["project", "-s", "corpus/bank", "--task", "nope"],
])
def test_usage_errors_exit_one(argv):
    assert _run(*argv)[0] == 1


def test_parse_error_exit_one(tmp_path):
    (tmp_path / "ontology.ttl").write_text(":a :b .")
    status, text = _run("project", "-s", str(tmp_path))
    assert status == 1 and "ontology.ttl:1:1" in text


def test_help_exit_zero():
    status, text = _run("--help")
    assert status == 0 and "project" in text


def test_figure_written(tmp_path):
    fig = tmp_path / "tl.png"
    assert _run("project", "-s", "corpus/yale", "--figure", str(fig), "--format", "text")[0] == 0
    assert fig.stat().st_size > 0
    fig2 = tmp_path / "plans.svg"
    assert _run("plan", "-s", "corpus/travel", "--figure", str(fig2))[0] == 0
    assert fig2.read_text().lstrip().startswith("<?xml")


def _golden_tasks():
    out = []
    for name in corpus_names():
        for task in scenario(name).tasks:
            if task.get("golden"):
                out.append((name, task.kind, task.name))
    return out


def _argv(name, kind, task_name):
    base = ["project"] if kind == "project" else ["plan"] if kind == "plan" else ["check", kind]
    argv = base + ["-s", str(CORPUS / name), "--task", task_name]
    if kind == "actionbox":
        argv += ["--format", "json"]
    return argv


@pytest.mark.parametrize("name,kind,task_name", _golden_tasks())
def test_goldens_byte_identical(name, kind, task_name):
    sc = scenario(name)
    golden = sc.golden(sc.task(kind, task_name)).read_text()
    first = _run(*_argv(name, kind, task_name))[1]
    second = _run(*_argv(name, kind, task_name))[1]
    assert first == second == golden


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "dtd.cli", "check", "executability", "-s", "corpus/bank"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.count("\tok\t") == 3
