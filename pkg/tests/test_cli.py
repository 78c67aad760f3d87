import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from phaseweb.cli import main
from phaseweb.scenario import Scenario, ScenarioError, packaged, run_scenario

DATA = Path(str(resources.files("phaseweb") / "data"))
BLOCKS = str(packaged("blocks"))
AUTO = str(packaged("autopoiesis"))


def base(**over):
    d = json.loads(Path(BLOCKS).read_text())
    d.update(over)
    return d


def write(tmp_path, data):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(data))
    return str(p)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# scenario validation


@pytest.mark.parametrize(
    "over,field",
    [
        ({"ticks": 0}, "ticks"),
        ({"sensors": ["p", "p", "q"]}, "sensors"),
        ({"sensors": ["p"]}, "sensors"),
        ({"goals": [{"sensor": "z", "from": 1, "to": -1}]}, "goals[0].sensor"),
        ({"goals": [{"sensor": "p", "from": 1, "to": 1}]}, "goals[0]"),
        ({"env": {"kind": "scripted", "initial": {"p": 1}, "script": [[2, "p", 1], [1, "p", -1]]}}, "env"),
        ({"hierarchy": [{"type": "morphic", "levels": 2}]}, "hierarchy"),
        ({"arity": 5}, "arity"),
        ({"colour": 1}, "colour"),
        ({"effectors": ["x"]}, "effectors"),
        ({"setpoint": {"sensor": "p", "value": 0}}, "setpoint"),
    ],
)
def test_validation_names_field(over, field):
    with pytest.raises(ScenarioError) as e:
        Scenario.from_dict(base(**over))
    assert e.value.field == field


def test_missing_required():
    d = base()
    del d["env"]
    with pytest.raises(ScenarioError, match="env"):
        Scenario.from_dict(d)


def test_blocks_summary():
    _, summary = run_scenario(Scenario.load(BLOCKS))
    assert summary["goals_satisfied"] >= 1 and summary["quiescent"]
    assert set(summary) >= {"ticks", "actions_learned", "goals_satisfied", "goals_expired", "quiescent"}


# commands


def test_run_writes_trace(tmp_path, capsys):
    trace = tmp_path / "t.log"
    code, out, _ = run_cli(capsys, "run", BLOCKS, "--trace", str(trace))
    assert code == 0
    assert json.loads(out)["goals_satisfied"] >= 1
    assert trace.read_text().startswith("tick=0 ev=")


def test_run_replay_is_byte_identical(tmp_path, capsys):
    outs = []
    for i in range(2):
        trace = tmp_path / f"t{i}.log"
        _, out, _ = run_cli(capsys, "run", AUTO, "--trace", str(trace))
        outs.append((out, trace.read_bytes()))
    assert outs[0] == outs[1]


def test_run_packaged_name(capsys):
    code, out, _ = run_cli(capsys, "run", "blocks")
    assert code == 0 and json.loads(out)["name"] == "blocks"


def test_run_zero_budget(capsys):
    code, _, err = run_cli(capsys, "run", BLOCKS, "--ticks", "0")
    assert code == 2 and "ticks" in err


def test_run_malformed(tmp_path, capsys):
    code, _, err = run_cli(capsys, "run", write(tmp_path, base(goals=[{"sensor": "z", "from": 1, "to": -1}])))
    assert code == 2 and "goals[0].sensor" in err


def test_run_bad_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{")
    assert run_cli(capsys, "run", str(p))[0] == 2


def test_autopoiesis_summary(capsys):
    code, out, _ = run_cli(capsys, "run", AUTO)
    sp = json.loads(out)["setpoint"]
    assert code == 0 and sp["all_restored"]


def test_verify_algebra(capsys):
    code, out, _ = run_cli(capsys, "verify", "algebra", "--n", "4")
    rep = json.loads(out)
    assert code == 0 and all(rep["exact"]) and all(rep["twisted"]) and all(rep["identities"].values())


def test_verify_algebra_unsupported(capsys):
    assert run_cli(capsys, "verify", "algebra", "--n", "12")[0] == 2


def test_verify_sync_mutex(capsys):
    code, out, _ = run_cli(capsys, "verify", "sync", str(DATA / "nets" / "mutex.json"))
    rep = json.loads(out)
    assert code == 0
    assert rep["observed"]["target_reachable"] is False and rep["observed"]["sticks_conserved"]


def test_verify_sync_broken(capsys):
    code, out, _ = run_cli(capsys, "verify", "sync", str(DATA / "nets" / "broken.json"))
    assert code == 1 and json.loads(out)["violations"]


def test_verify_sync_missing_file(capsys):
    assert run_cli(capsys, "verify", "sync", "/nonexistent.json")[0] == 2


def test_verify_all(capsys):
    code, out, _ = run_cli(capsys, "verify", "all")
    assert code == 0 and json.loads(out)["ok"]


def test_dump_hierarchy(capsys):
    code, out, _ = run_cli(capsys, "dump-hierarchy", AUTO, "--at-tick", "12")
    d = json.loads(out)
    assert code == 0 and d["tick"] == 12
    assert [h["type"] for h in d["hierarchies"]] == ["meta", "morphic", "icarian"]


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "phaseweb", "verify", "algebra", "--n", "3"], capture_output=True)
    assert r.returncode == 0 and json.loads(r.stdout)["ok"]
