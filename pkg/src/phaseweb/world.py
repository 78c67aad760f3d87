"""The tick loop: snapshot, bubble up, retract, fire, trickle down, act, learn.

A :class:`WorldState` is owned by one caller; :func:`tick` is a sequential
transaction over it.  Everything is deterministic given the environment seed.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .board import Board, GoalToken, StateToken, TransformToken
from .env import EnvState
from .hierarchy import HierarchyConfig, bubble_up, presence_id, trickle_down
from .learner import ActionRecord, CoOccurrence, Learner

DEFAULT_TTL = 32


class EngineError(RuntimeError):
    pass


class StaleFiring(EngineError):
    pass


@dataclass
class SensorInfo:
    id: str
    kind: str  # primitive | meta | presence
    level: int = 0
    effector: bool = False
    axis: Optional[int] = None
    action: Optional[int] = None
    goal: Optional[Tuple[str, int, int]] = None


@dataclass
class WorldConfig:
    arity: int = 2
    ttl: int = DEFAULT_TTL
    window: Optional[int] = None
    layers: List[HierarchyConfig] = field(default_factory=list)
    learn: bool = True

    def __post_init__(self):
        kinds = [c.type for c in self.layers]
        dup = {k for k in kinds if kinds.count(k) > 1}
        if dup:
            raise EngineError(f"one layer per hierarchy type, duplicated: {sorted(dup)}")
        if self.ttl < 1:
            raise EngineError("goal ttl must be >= 1")


class Firing(NamedTuple):
    action: ActionRecord
    half: str
    goal: GoalToken


def _fmt_values(values) -> str:
    return ",".join(f"{k}:{v:+d}" for k, v in values)


class WorldState:
    def __init__(
        self,
        env: EnvState,
        config: Optional[WorldConfig] = None,
        effectors: Optional[Sequence[str]] = None,
    ):
        self.env = env
        self.config = config or WorldConfig()
        self.board = Board()
        self.tick = 0
        self.sensors: Dict[str, SensorInfo] = {}
        self.actions: List[ActionRecord] = []
        self._action_keys: Dict[tuple, int] = {}
        self.values: Dict[str, int] = {}
        self.history: List[CoOccurrence] = []
        self.streams: Dict[str, List[CoOccurrence]] = {}
        self.trace: List[str] = []
        self.stats: Counter = Counter()
        self.fired: set = set()
        self.scheduled: List[GoalToken] = []
        self.quiescent = False
        self._defaults: Dict[str, int] = {}
        eff = set(env.effectors if effectors is None else effectors)
        for i, s in enumerate(env.sensors, start=1):
            self.sensors[s] = SensorInfo(s, "primitive", 0, s in eff, axis=i)
        self.learners: Dict[str, Learner] = {}
        for name in self.stream_names():
            self.learners[name] = self.make_learner(name)

    # registry ------------------------------------------------------------------
    def layer(self, kind: str) -> Optional[HierarchyConfig]:
        return next((c for c in self.config.layers if c.type == kind), None)

    def max_meta_level(self) -> int:
        cfg = self.layer("meta")
        return cfg.levels if cfg else 0

    def primitives(self) -> List[str]:
        return [s for s, i in self.sensors.items() if i.kind == "primitive"]

    def meta_sensors(self, level: Optional[int] = None) -> List[str]:
        return [s for s, i in self.sensors.items() if i.kind == "meta" and (level is None or i.level == level)]

    def presence_sensors(self) -> List[str]:
        return [s for s, i in self.sensors.items() if i.kind == "presence"]

    def tracks_goals(self) -> bool:
        return self.layer("morphic") is not None or self.layer("icarian") is not None

    def stream_names(self) -> List[str]:
        names = ["S0"] + [f"S{n}" for n in range(1, self.max_meta_level() + 1)]
        if self.layer("morphic"):
            names.append("SG")
        if self.layer("icarian"):
            names.append("GG")
        return names

    def _level_of(self, sensor: str) -> int:
        return self.sensors[sensor].level

    def make_learner(self, name: str) -> Learner:
        kw = dict(level_of=self._level_of, window=self.config.window, defaults=self._defaults)
        if name == "SG":
            def mixed(subset):
                kinds = {self.sensors[s].kind == "presence" for s in subset}
                return kinds == {True, False}

            return Learner(self.config.arity, kind="morphic", subset_filter=mixed, **kw)
        if name == "GG":
            return Learner(self.config.arity, kind="icarian", **kw)
        level = int(name[1:])
        cfg = self.layer("meta")
        if level > 0 and cfg is not None and not cfg.pancake:
            return Learner(
                self.config.arity,
                kind="meta",
                subset_filter=lambda sub: any(self.sensors[s].level == level for s in sub),
                **kw,
            )
        return Learner(self.config.arity, kind="meta", **kw)

    def stream_pool(self, name: str) -> List[str]:
        if name == "S0":
            return self.primitives()
        if name == "SG":
            return self.primitives() + self.meta_sensors() + self.presence_sensors()
        if name == "GG":
            return self.presence_sensors()
        level = int(name[1:])
        cfg = self.layer("meta")
        if cfg is not None and not cfg.pancake:
            return self.primitives() + [s for s in self.meta_sensors() if self.sensors[s].level <= level]
        return self.meta_sensors(level)

    def register_action(self, action: ActionRecord) -> Optional[ActionRecord]:
        """Add a learned action unless an equivalent one exists; returns the stored record."""
        if action.key in self._action_keys:
            return None
        unknown = [s for s in action.sensors if s not in self.sensors]
        if unknown:
            raise EngineError(f"action over unregistered sensors {unknown}")
        stored = ActionRecord(
            action.sensors, action.half_a, action.half_b, action.level, action.kind,
            self.tick if action.created < 0 else action.created, len(self.actions),
        )
        self.actions.append(stored)
        self._action_keys[stored.key] = stored.index
        self.log(
            "LEARN", id=stored.id, kind=stored.kind, level=stored.level,
            a=_fmt_values(stored.half("A").items()), b=_fmt_values(stored.half("B").items()),
        )
        if stored.kind == "meta" and stored.level <= self.max_meta_level():
            sid = f"M{stored.index}"
            self.sensors[sid] = SensorInfo(sid, "meta", stored.level, action=stored.index)
        return stored

    def learn_from(self, history: Sequence) -> List[ActionRecord]:
        """Feed prior level-0 experience to the base learner."""
        out = []
        for item in history:
            snap = item if isinstance(item, CoOccurrence) else CoOccurrence.of(item, self.tick)
            unknown = set(snap.sensors) - set(self.primitives())
            if unknown:
                raise EngineError(f"history names unknown sensors {sorted(unknown)}")
            for a in self.learners["S0"].feed(snap):
                stored = self.register_action(a)
                if stored:
                    out.append(stored)
        return out

    # goals ---------------------------------------------------------------------
    def issue_goal(self, goal: GoalToken) -> bool:
        if goal.sensor not in self.sensors:
            raise EngineError(f"goal on unregistered sensor {goal.sensor!r}")
        if self.board.announce(goal):
            self.log("GOAL", goal=str(goal), issuer=goal.issuer or "-")
            return True
        return False

    def schedule_goal(self, goal: GoalToken) -> None:
        self.scheduled.append(goal)

    def is_intention(self, goal: GoalToken) -> bool:
        """External goals and goals set by the goal-level layers; not the means
        volunteered by firing or trickle-down."""
        if goal.issuer in self.sensors:
            return self.sensors[goal.issuer].kind == "presence"
        if goal.issuer.startswith("A") and goal.issuer[1:].isdigit():
            idx = int(goal.issuer[1:])
            return idx < len(self.actions) and self.actions[idx].kind in ("morphic", "icarian")
        return True

    def intentions(self) -> set:
        return {g.key for g in self.board.goals() if self.is_intention(g)}

    def sense_goals(self) -> None:
        """Register and refresh presence sensors for every intention seen."""
        if not self.tracks_goals():
            return
        present = self.intentions()
        for key in sorted(present, key=lambda k: (k[0], k[1])):
            info = self.sensors.get(key[0])
            if info is None or info.kind == "presence":
                continue
            pid = presence_id(key)
            if pid not in self.sensors:
                self.sensors[pid] = SensorInfo(pid, "presence", info.level, goal=key)
                self._defaults[pid] = -1
        for pid in self.presence_sensors():
            self.values[pid] = 1 if self.sensors[pid].goal in present else -1

    def record_streams(self) -> None:
        for name in self.stream_names():
            if name == "S0":
                continue
            pool = self.stream_pool(name)
            values = {s: self.values[s] for s in pool if s in self.values}
            if values:
                self.streams.setdefault(name, []).append(CoOccurrence.of(values, self.tick))

    # logging -------------------------------------------------------------------
    def log(self, ev: str, **fields) -> None:
        parts = [f"tick={self.tick}", f"ev={ev}"] + [f"{k}={v}" for k, v in fields.items()]
        self.trace.append(" ".join(parts))

    def signature(self) -> tuple:
        """Everything that defines the world apart from the clock and raw history."""
        return (
            tuple(sorted(g.key for g in self.board.goals())),
            tuple(a.key for a in self.actions),
            tuple(sorted(self.values.items())),
            tuple(sorted(self.env.read().items())),
        )

    def pending_external(self) -> bool:
        return any(g.tick >= self.tick for g in self.scheduled) or self.env.pending_events(self.tick)


# engine operations ------------------------------------------------------------

def snapshot(world: WorldState) -> CoOccurrence:
    tokens = {t.sensor: t.orientation for t in world.board.listen(kind=StateToken) if t.tick == world.tick}
    values = {}
    for s in world.primitives():
        if s not in tokens:
            raise EngineError(f"no state token for sensor {s!r} at tick {world.tick}")
        values[s] = tokens[s]
    snap = CoOccurrence.of(values, world.tick)
    world.values.update(values)
    world.history.append(snap)
    world.log("SNAPSHOT", values=_fmt_values(snap.assignment))
    return snap


def retract_satisfied(world: WorldState) -> List[GoalToken]:
    removed = []
    for g in world.board.goals():
        if world.values.get(g.sensor) == g.to:
            reason = "satisfied"
            world.stats["goals_satisfied"] += 1
        elif world.tick - g.tick > world.config.ttl:
            reason = "expired"
            world.stats["goals_expired"] += 1
        else:
            continue
        world.board.remove_goal(g.key)
        world.log("RETRACT", goal=str(g), reason=reason)
        removed.append(g)
    return removed


def relevance_scan(world: WorldState) -> List[Firing]:
    """Actions with an obtaining half and a goal to invert one of their changed sensors."""
    goals = {g.key: g for g in world.board.goals()}
    out = []
    for action in world.actions:
        if action.kind == "morphic" or action.index in world.fired:
            continue
        half = action.obtaining_half(world.values)
        if half is None:
            continue
        vals = action.half(half)
        for x in action.changed:
            g = goals.get((x, vals[x], -vals[x]))
            if g is not None:
                out.append(Firing(action, half, g))
                break
    return out


def fire(world: WorldState, firing: Firing) -> List[GoalToken]:
    """Volunteer goals that invert the action's remaining changed sensors."""
    action, half, goal = firing
    if action.index in world.fired:
        raise StaleFiring(f"{action.id} already fired this tick")
    if not action.satisfied(world.values, half) or world.board.goal(goal.key) is None:
        raise StaleFiring(f"{action.id}: state changed since the relevance scan")
    world.fired.add(action.index)
    world.stats["fires"] += 1
    world.log("FIRE", action=action.id, half=half, goal=str(goal))
    here, there = action.half(half), action.half(action.other(half))
    issued = []
    for x in action.changed:
        if x == goal.sensor:
            continue
        g = GoalToken(x, here[x], there[x], action.id, world.tick)
        if world.issue_goal(g):
            issued.append(g)
    return issued


def fire_morphic(world: WorldState) -> List[GoalToken]:
    """Morphic actions complete the goal part of the half whose sensor part obtains.

    Only issuing is done here (never retraction), and only goals whose 'from'
    matches the sensor's current value.
    """
    issued = []
    present = {g.key for g in world.board.goals()}
    for action in world.actions:
        if action.kind != "morphic" or action.index in world.fired:
            continue
        s_part = [s for s in action.sensors if world.sensors[s].kind != "presence"]
        g_part = [s for s in action.sensors if world.sensors[s].kind == "presence"]
        halves = [h for h in "AB" if all(world.values.get(s) == action.half(h)[s] for s in s_part)]
        if len(halves) != 1:
            continue
        want = action.half(halves[0])
        new = []
        for pid in g_part:
            key = world.sensors[pid].goal
            if want[pid] == 1 and key not in present and world.values.get(key[0]) == key[1]:
                new.append(GoalToken(key[0], key[1], key[2], action.id, world.tick))
        if not new:
            continue
        world.fired.add(action.index)
        world.stats["fires"] += 1
        world.log("FIRE", action=action.id, half=halves[0], kind="morphic")
        for g in new:
            if world.issue_goal(g):
                issued.append(g)
                present.add(g.key)
    return issued


def trickle_goals(world: WorldState) -> List[GoalToken]:
    out = []
    for g in world.board.goals():
        if world.sensors.get(g.sensor) is not None and world.sensors[g.sensor].kind == "meta":
            out.extend(trickle_down(world, g))
    return out


def hand_off(world: WorldState) -> List[TransformToken]:
    """Goals on effectors become transforms for the environment; presence goals act on the board."""
    effects = []
    for g in world.board.goals():
        info = world.sensors.get(g.sensor)
        if info is None:
            continue
        if info.kind == "primitive" and info.effector and world.values.get(g.sensor) == g.frm:
            t = TransformToken(g.sensor, g.frm, g.to, g.issuer, world.tick)
            world.board.announce(t)
            effects.append(t)
            world.log("EFFECT", transform=str(t), issuer=g.issuer or "-")
        elif info.kind == "presence" and world.values.get(g.sensor) == g.frm:
            key = info.goal
            if g.to == 1 and world.values.get(key[0]) == key[1]:
                world.issue_goal(GoalToken(key[0], key[1], key[2], g.sensor, world.tick))
                world.log("EFFECT", internal="issue", goal=presence_id(key))
            elif g.to == -1 and world.board.remove_goal(key):
                world.log("EFFECT", internal="retract", goal=presence_id(key))
    world.stats["effects"] += len(effects)
    world.env.apply(effects)
    return effects


def learn(world: WorldState) -> List[ActionRecord]:
    if not world.config.learn:
        return []
    out = []
    sources = {"S0": world.history}
    sources.update(world.streams)
    for name, learner in world.learners.items():
        hist = sources.get(name)
        if not hist or hist[-1].tick != world.tick:
            continue
        for a in learner.feed(hist[-1]):
            stored = world.register_action(a)
            if stored:
                out.append(stored)
    return out


def tick(world: WorldState) -> WorldState:
    """One full cycle; see module docstring for the step order."""
    t = world.tick
    world.board.tick = t
    world.board.clear_transient()
    world.fired = set()

    world.env.step(t)
    for g in [g for g in world.scheduled if g.tick == t]:
        world.issue_goal(g)
    world.scheduled = [g for g in world.scheduled if g.tick > t]

    # 1-2: sense and take the snapshot
    for s, v in world.env.read().items():
        if s in world.sensors:
            world.board.announce(StateToken(s, v, "env", t))
    snapshot(world)
    # 3
    bubble_up(world)

    before = (tuple(g.key for g in world.board.goals()), len(world.trace))
    # 4-8
    retract_satisfied(world)
    fire_morphic(world)
    for firing in relevance_scan(world):
        fire(world, firing)
    trickle_goals(world)
    effects = hand_off(world)
    after = (tuple(g.key for g in world.board.goals()), len(world.trace))
    world.quiescent = before == after and not effects
    # 9
    learn(world)
    if world.quiescent:
        world.log("QUIESCENT")
    world.tick += 1
    return world


def run(world: WorldState, ticks: int, stop_when_quiescent: bool = True) -> WorldState:
    for _ in range(ticks):
        tick(world)
        if stop_when_quiescent and world.quiescent and not world.pending_external():
            break
    return world
