"""Scenario files: one JSON document describing an environment, a hierarchy and goals."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

from .board import GoalToken
from .env import EnvError, EnvSpec
from .hierarchy import HierarchyConfig, HierarchyError, hierarchy_dump
from .learner import CoOccurrence, LearnerError
from .world import DEFAULT_TTL, EngineError, WorldConfig, WorldState, run

FIELDS = {
    "name", "env", "sensors", "effectors", "hierarchy", "goals", "ticks",
    "arity", "seed", "ttl", "window", "history", "setpoint", "restore_within",
}


class ScenarioError(ValueError):
    """Validation failure; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class GoalSpec:
    sensor: str
    frm: int
    to: int
    tick: int = 0

    def token(self) -> GoalToken:
        return GoalToken(self.sensor, self.frm, self.to, "ext", self.tick)


@dataclass
class Setpoint:
    sensor: str
    value: int


@dataclass
class Scenario:
    name: str
    env: EnvSpec
    sensors: List[str]
    effectors: List[str]
    hierarchy: List[HierarchyConfig] = field(default_factory=list)
    goals: List[GoalSpec] = field(default_factory=list)
    ticks: int = 10
    arity: int = 2
    seed: Optional[int] = None
    ttl: int = DEFAULT_TTL
    window: Optional[int] = None
    history: List[Dict[str, int]] = field(default_factory=list)
    setpoint: Optional[Setpoint] = None
    restore_within: int = 10

    @classmethod
    def from_dict(cls, data: Mapping) -> "Scenario":
        if not isinstance(data, Mapping):
            raise ScenarioError("scenario", "top level must be a JSON object")
        extra = set(data) - FIELDS
        if extra:
            raise ScenarioError(sorted(extra)[0], "unknown field")
        for req in ("name", "env", "ticks"):
            if req not in data:
                raise ScenarioError(req, "required")
        try:
            env = EnvSpec.from_dict(data["env"])
        except (EnvError, TypeError) as e:
            raise ScenarioError("env", str(e)) from None
        sensors = list(data.get("sensors", env.sensors))
        if len(set(sensors)) != len(sensors):
            dup = sorted({s for s in sensors if sensors.count(s) > 1})
            raise ScenarioError("sensors", f"duplicate sensor ids {dup}")
        missing = set(env.sensors) - set(sensors)
        if missing:
            raise ScenarioError("sensors", f"env sensors not declared: {sorted(missing)}")
        unknown = set(sensors) - set(env.sensors)
        if unknown:
            raise ScenarioError("sensors", f"declared sensors the env does not provide: {sorted(unknown)}")
        default_eff = [] if env.kind == "scripted" else list(env.sensors)
        effectors = list(data.get("effectors", default_eff))
        bad = set(effectors) - set(sensors)
        if bad:
            raise ScenarioError("effectors", f"not declared as sensors: {sorted(bad)}")
        if env.kind == "scripted" and effectors:
            raise ScenarioError("effectors", "a scripted env has no effectors")
        try:
            layers = [HierarchyConfig.from_dict(h) for h in data.get("hierarchy", [])]
        except (HierarchyError, TypeError, AttributeError) as e:
            raise ScenarioError("hierarchy", str(e)) from None
        goals = []
        for i, g in enumerate(data.get("goals", [])):
            where = f"goals[{i}]"
            if not isinstance(g, Mapping) or set(g) - {"sensor", "from", "to", "tick"}:
                raise ScenarioError(where, "expected {sensor, from, to, tick}")
            if g.get("sensor") not in sensors:
                raise ScenarioError(f"{where}.sensor", f"undeclared sensor {g.get('sensor')!r}")
            frm, to = g.get("from"), g.get("to")
            if frm not in (1, -1) or to not in (1, -1) or frm == to:
                raise ScenarioError(where, "from/to must be opposite ±1 orientations")
            t = g.get("tick", 0)
            if not isinstance(t, int) or t < 0:
                raise ScenarioError(f"{where}.tick", "must be a non-negative integer")
            goals.append(GoalSpec(g["sensor"], frm, to, t))
        ticks = data["ticks"]
        if not isinstance(ticks, int) or isinstance(ticks, bool) or ticks < 1:
            raise ScenarioError("ticks", "tick budget must be an integer >= 1")
        arity = data.get("arity", 2)
        if not isinstance(arity, int) or not 2 <= arity <= len(sensors):
            raise ScenarioError("arity", f"must be between 2 and the sensor count ({len(sensors)})")
        ttl = data.get("ttl", DEFAULT_TTL)
        if not isinstance(ttl, int) or ttl < 1:
            raise ScenarioError("ttl", "must be an integer >= 1")
        window = data.get("window")
        if window is not None and (not isinstance(window, int) or window < 1):
            raise ScenarioError("window", "must be an integer >= 1")
        history = []
        for i, snap in enumerate(data.get("history", [])):
            if not isinstance(snap, Mapping) or set(snap) - set(sensors):
                raise ScenarioError(f"history[{i}]", "must map declared sensors to ±1")
            try:
                CoOccurrence.of(snap)
            except LearnerError as e:
                raise ScenarioError(f"history[{i}]", str(e)) from None
            history.append(dict(snap))
        setpoint = None
        if "setpoint" in data:
            sp = data["setpoint"]
            if not isinstance(sp, Mapping) or sp.get("sensor") not in sensors or sp.get("value") not in (1, -1):
                raise ScenarioError("setpoint", "expected {sensor: declared id, value: ±1}")
            setpoint = Setpoint(sp["sensor"], sp["value"])
        restore_within = data.get("restore_within", 10)
        if not isinstance(restore_within, int) or restore_within < 1:
            raise ScenarioError("restore_within", "must be an integer >= 1")
        seed = data.get("seed")
        if seed is not None and not isinstance(seed, int):
            raise ScenarioError("seed", "must be an integer")
        return cls(
            str(data["name"]), env, sensors, effectors, layers, goals, ticks, arity, seed, ttl, window,
            history, setpoint, restore_within,
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Scenario":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ScenarioError("file", str(e)) from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioError("file", f"invalid JSON: {e}") from None
        return cls.from_dict(data)

    def build(self, seed: Optional[int] = None) -> WorldState:
        spec = copy.deepcopy(self.env)
        chosen = seed if seed is not None else self.seed
        if chosen is not None:
            spec.seed = chosen
        try:
            config = WorldConfig(self.arity, self.ttl, self.window, list(self.hierarchy))
        except EngineError as e:
            raise ScenarioError("hierarchy", str(e)) from None
        world = WorldState(spec.build(), config, self.effectors)
        if self.history:
            world.learn_from(self.history)
        for g in self.goals:
            world.schedule_goal(g.token())
        return world


def packaged(name: str) -> Path:
    """Path of a scenario shipped with the package, e.g. ``packaged("blocks")``."""
    ref = resources.files("phaseweb") / "data" / "scenarios" / f"{name}.json"
    return Path(str(ref))


def setpoint_episodes(world: WorldState, setpoint: Setpoint) -> List[dict]:
    """Each departure of the setpoint sensor from its value, and when it came back."""
    episodes = []
    prev = None
    for snap in world.history:
        v = snap.get(setpoint.sensor)
        if v != setpoint.value and prev == setpoint.value:
            episodes.append({"tick": snap.tick, "restored": None, "latency": None})
        elif v == setpoint.value and episodes and episodes[-1]["restored"] is None:
            episodes[-1]["restored"] = snap.tick
            episodes[-1]["latency"] = snap.tick - episodes[-1]["tick"]
        prev = v
    return episodes


def summarize(world: WorldState, scenario: Scenario) -> dict:
    out = {
        "name": scenario.name,
        "ticks": world.tick,
        "actions_learned": len(world.actions),
        "goals_satisfied": world.stats["goals_satisfied"],
        "goals_expired": world.stats["goals_expired"],
        "fires": world.stats["fires"],
        "effects": world.stats["effects"],
        "quiescent": world.quiescent,
    }
    if scenario.setpoint is not None:
        eps = setpoint_episodes(world, scenario.setpoint)
        out["setpoint"] = {
            "sensor": scenario.setpoint.sensor,
            "value": scenario.setpoint.value,
            "restore_within": scenario.restore_within,
            "episodes": eps,
            "all_restored": all(
                e["latency"] is not None and e["latency"] <= scenario.restore_within for e in eps
            ),
        }
    return out


def run_scenario(
    scenario: Scenario, ticks: Optional[int] = None, seed: Optional[int] = None
) -> tuple:
    """Run to the tick budget (or quiescence); returns ``(world, summary)``."""
    world = scenario.build(seed)
    budget = scenario.ticks if ticks is None else ticks
    run(world, budget)
    return world, summarize(world, scenario)


def dump_at(scenario: Scenario, at_tick: int, seed: Optional[int] = None) -> dict:
    world = scenario.build(seed)
    run(world, at_tick, stop_when_quiescent=False)
    return hierarchy_dump(world)
