"""Cycle hierarchy: meta-sensors, bubbling up, trickling down, level building.

Three hierarchy types share one learner:

* ``meta``     co-excludes sensor values against sensor values (S×S)
* ``icarian``  co-excludes goal presences against goal presences (G×G)
* ``morphic``  co-excludes sensor values against goal presences (S×G)

A goal's presence on the board is exposed as a synthetic ±1 sensor, so the
same :class:`~phaseweb.learner.Learner` serves every stream.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, getcontext
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Tuple, Union

from .algebra import Blade, Multivector
from .board import GoalToken, StateToken
from .learner import ActionRecord, CoOccurrence

if TYPE_CHECKING:  # pragma: no cover
    from .world import WorldState

TYPES = ("meta", "icarian", "morphic")


class HierarchyError(ValueError):
    pass


@dataclass(frozen=True)
class HierarchyConfig:
    type: str = "meta"
    levels: int = 1
    pancake: bool = True

    def __post_init__(self):
        if self.type not in TYPES:
            raise HierarchyError(f"unknown hierarchy type {self.type!r}")
        if self.levels < 1:
            raise HierarchyError("hierarchy levels must be >= 1")
        if self.type != "meta" and self.levels != 1:
            raise HierarchyError(f"{self.type} layers support a single level")

    @classmethod
    def from_dict(cls, data: Mapping) -> "HierarchyConfig":
        extra = set(data) - {"type", "levels", "pancake"}
        if extra:
            raise HierarchyError(f"unknown hierarchy field(s): {sorted(extra)}")
        return cls(str(data.get("type", "meta")), int(data.get("levels", 1)), bool(data.get("pancake", True)))

    def to_dict(self) -> dict:
        return {"type": self.type, "levels": self.levels, "pancake": self.pancake}


@dataclass
class MetaSensor:
    id: str
    action: int
    level: int
    value: Optional[int] = None


@dataclass(frozen=True)
class GoalCoOccurrence:
    tick: int
    assignment: Tuple[Tuple[Tuple[str, int, int], int], ...]

    def __post_init__(self):
        if not self.assignment:
            raise HierarchyError("a goal co-occurrence needs at least one goal signature")

    def as_dict(self) -> Dict[Tuple[str, int, int], int]:
        return dict(self.assignment)


def presence_id(key: Tuple[str, int, int]) -> str:
    sensor, frm, to = key
    return f"g:{sensor}{frm:+d}{to:+d}"


def reflect_orientation(
    action: ActionRecord,
    snapshot: Union[CoOccurrence, Mapping[str, int]],
    previous: Optional[int] = None,
) -> Optional[int]:
    """+1 while half A obtains, -1 while half B obtains, else ``previous``."""
    values = snapshot.as_dict() if isinstance(snapshot, CoOccurrence) else snapshot
    half = action.obtaining_half(values)
    if half == "A":
        return 1
    if half == "B":
        return -1
    return previous


def goal_cooccurrence(world: "WorldState") -> Optional[GoalCoOccurrence]:
    keys = [world.sensors[s].goal for s in world.presence_sensors()]
    if not keys:
        return None
    present = world.intentions()
    return GoalCoOccurrence(world.tick, tuple((k, 1 if k in present else -1) for k in keys))


def bubble_up(world: "WorldState") -> "WorldState":
    """Recompute meta-sensors level by level and record every stream's snapshot."""
    for level in range(1, world.max_meta_level() + 1):
        for sid in world.meta_sensors(level):
            info = world.sensors[sid]
            action = world.actions[info.action]
            value = reflect_orientation(action, world.values, world.values.get(sid))
            if value is None:
                continue
            world.values[sid] = value
            world.board.announce(StateToken(sid, value, action.id, world.tick))
    world.sense_goals()
    world.record_streams()
    return world


def _half_for(action: ActionRecord, orientation: int) -> str:
    return "A" if orientation == 1 else "B"


def trickle_down(world: "WorldState", goal: GoalToken) -> List[GoalToken]:
    """Fan a goal on a meta-sensor out into goals on the level below, recursively.

    Returns the goals that reached non-meta sensors.  Intermediate goals are
    announced too.  A goal whose 'from' half does not currently obtain is
    deferred: nothing is emitted and the goal stays on the board.
    """
    info = world.sensors.get(goal.sensor)
    if info is None:
        raise HierarchyError(f"goal on unregistered sensor {goal.sensor!r}")
    if info.kind != "meta":
        return [goal]
    action = world.actions[info.action]
    src = _half_for(action, goal.frm)
    if not action.satisfied(world.values, src):
        return []
    dst = action.other(src)
    src_vals, dst_vals = action.half(src), action.half(dst)
    leaves: List[GoalToken] = []
    for x in action.changed:
        sub = GoalToken(x, src_vals[x], dst_vals[x], goal.sensor, world.tick)
        world.issue_goal(sub)
        leaves.extend(trickle_down(world, sub))
    return leaves


def stream_for(world: "WorldState", config: HierarchyConfig, level: int) -> str:
    if config.type == "meta":
        return f"S{level}"
    return "SG" if config.type == "morphic" else "GG"


def build_level(world: "WorldState", config: HierarchyConfig, level: int) -> "WorldState":
    """Batch co-exclusion over one level's recorded stream; registers the results."""
    if config.type not in TYPES:
        raise HierarchyError(f"unknown hierarchy type {config.type!r}")
    name = stream_for(world, config, level)
    history = world.streams.get(name, [])
    if not history:
        return world
    learner = world.make_learner(name)
    for snap in history:
        for action in learner.feed(snap):
            world.register_action(action)
    return world


# algebraic transcription ------------------------------------------------------

def _support(world: "WorldState", sensor: str, seen=()) -> Tuple[int, frozenset]:
    """(sign, primitive axes) of a sensor's transcription."""
    info = world.sensors.get(sensor)
    if info is None:
        raise HierarchyError(f"unregistered sensor {sensor!r}")
    if info.kind == "primitive":
        return 1, frozenset({info.axis})
    if info.kind == "presence":
        return _support(world, info.goal[0], seen)
    if info.action in seen:
        raise HierarchyError("cyclic meta-sensor binding")
    return _action_support(world, world.actions[info.action], seen + (info.action,))


def _action_support(world: "WorldState", action: ActionRecord, seen=()) -> Tuple[int, frozenset]:
    sign = 1
    axes: frozenset = frozenset()
    half_a = action.half("A")
    for x in action.changed:
        s, ax = _support(world, x, seen)
        sign *= s * half_a[x]
        axes |= ax
    return sign, axes


def grade_transcription(world: "WorldState", entity) -> Multivector:
    """Map a level-0 co-occurrence or a registered action into Cl(n).

    A co-occurrence becomes the grade-1 sum of its orientations.  An action
    becomes the signed blade over the primitive axes its changed set covers;
    the sign is the product of half A's orientations, so ``s_p ~s_q`` and its
    dual ``s_p s_q`` stay distinct.
    """
    n = len(world.primitives())
    if isinstance(entity, (CoOccurrence, dict)):
        values = entity.as_dict() if isinstance(entity, CoOccurrence) else entity
        coeffs = {}
        for s, v in values.items():
            info = world.sensors.get(s)
            if info is None or info.kind != "primitive":
                raise HierarchyError(f"{s!r} is not a registered primitive sensor")
            coeffs[info.axis] = v
        return Multivector.state(n, coeffs)
    if isinstance(entity, ActionRecord):
        if not (0 <= entity.index < len(world.actions)) or world.actions[entity.index].key != entity.key:
            raise HierarchyError(f"unregistered action {entity}")
        sign, axes = _action_support(world, entity, (entity.index,))
        return Multivector.from_blade(n, Blade(tuple(sorted(axes))), sign)
    if isinstance(entity, str):
        sign, axes = _support(world, entity)
        return Multivector.from_blade(n, Blade(tuple(sorted(axes))), sign)
    raise HierarchyError(f"cannot transcribe {entity!r}")


def transcription_grade(world: "WorldState", entity) -> int:
    mv = grade_transcription(world, entity)
    grades = mv.grades()
    return grades[-1] if grades else 0


def grade_monotone(world: "WorldState") -> List[Tuple[str, bool]]:
    """For each meta-action: does its grade exceed every constituent's?"""
    out = []
    for action in world.actions:
        parts = [world.sensors[x] for x in action.changed]
        if not any(p.kind == "meta" for p in parts):
            continue
        g = transcription_grade(world, action)
        below = max(transcription_grade(world, x) for x in action.changed)
        out.append((action.id, g > below))
    return out


# combinatorial hierarchy ----------------------------------------------------------

@dataclass(frozen=True)
class DigitCount:
    """Stand-in for a term too large to materialise: only its decimal length."""

    digits: int


def combinatorial_sequence(k: int) -> Union[int, DigitCount]:
    """3, 7, 127, 2**127 - 1, ...: a_0 = 3, a_{k+1} = 2**a_k - 1."""
    if k < 0:
        raise HierarchyError("index must be >= 0")
    if k <= 3:
        a = 3
        for _ in range(k):
            a = 2**a - 1
        return a
    if k == 4:
        exponent = combinatorial_sequence(3)
        getcontext().prec = 120
        # 2**m - 1 has as many digits as 2**m, which is never a power of ten
        return DigitCount(int(Decimal(exponent) * Decimal(2).log10()) + 1)
    raise OverflowError(f"term {k} has more digits than can be counted exactly here")


def hierarchy_dump(world: "WorldState") -> dict:
    layers = world.config.layers or []
    trees = []
    by_kind: Dict[str, List[ActionRecord]] = {}
    for a in world.actions:
        by_kind.setdefault(a.kind, []).append(a)

    def level_entry(sensors, actions):
        return {"sensors": sensors, "actions": [a.to_dict() for a in actions]}

    meta_cfg = world.layer("meta")
    meta_levels = [level_entry(world.primitives(), [a for a in by_kind.get("meta", []) if a.level == 1])]
    top = meta_cfg.levels if meta_cfg else 0
    for lvl in range(1, top + 1):
        meta_levels.append(
            level_entry(world.meta_sensors(lvl), [a for a in by_kind.get("meta", []) if a.level == lvl + 1])
        )
    trees.append({"type": "meta", "pancake": meta_cfg.pancake if meta_cfg else True, "levels": meta_levels})
    for cfg in layers:
        if cfg.type == "meta":
            continue
        sensors = world.presence_sensors()
        if cfg.type == "morphic":
            sensors = world.primitives() + world.meta_sensors() + sensors
        trees.append(
            {"type": cfg.type, "pancake": cfg.pancake, "levels": [level_entry(sensors, by_kind.get(cfg.type, []))]}
        )
    return {"tick": world.tick, "hierarchies": trees}
