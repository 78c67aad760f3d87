"""Co-occurrence snapshots and the co-exclusion learner.

Two observed assignments over the same sensor set that differ in at least two
components exclude each other as wholes; the pair becomes an action.  A single
sighting of each half is enough.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union


class LearnerError(ValueError):
    pass


@dataclass(frozen=True)
class CoOccurrence:
    """One "now": every listed sensor's orientation at a tick."""

    assignment: Tuple[Tuple[str, int], ...]
    tick: int = 0

    def __post_init__(self):
        items = self.assignment.items() if isinstance(self.assignment, Mapping) else self.assignment
        items = tuple(sorted((str(k), int(v)) for k, v in items))
        if not items:
            raise LearnerError("a co-occurrence needs at least one sensor")
        if len({k for k, _ in items}) != len(items):
            raise LearnerError("one orientation per sensor")
        for k, v in items:
            if v not in (1, -1):
                raise LearnerError(f"orientation of {k} must be ±1, got {v}")
        object.__setattr__(self, "assignment", items)

    @classmethod
    def of(cls, mapping: Mapping[str, int], tick: int = 0) -> "CoOccurrence":
        return cls(tuple(mapping.items()), tick)

    def as_dict(self) -> Dict[str, int]:
        return dict(self.assignment)

    @property
    def sensors(self) -> Tuple[str, ...]:
        return tuple(k for k, _ in self.assignment)

    def __getitem__(self, sensor: str) -> int:
        return self.as_dict()[sensor]

    def get(self, sensor: str, default=None):
        return self.as_dict().get(sensor, default)

    def __str__(self) -> str:
        return "{" + ",".join(f"{k}:{v:+d}" for k, v in self.assignment) + "}"


@dataclass(frozen=True)
class ActionRecord:
    """A learned co-exclusion between two halves over one sensor set.

    Half A is, by convention, the half in which the first changed sensor reads
    +1; the action's orientation is +1 while half A obtains.
    """

    sensors: Tuple[str, ...]
    half_a: Tuple[int, ...]
    half_b: Tuple[int, ...]
    level: int = 1
    kind: str = "meta"
    created: int = 0
    index: int = -1

    def __post_init__(self):
        if len(self.sensors) != len(self.half_a) or len(self.sensors) != len(self.half_b):
            raise LearnerError("halves must cover the sensor set")
        if list(self.sensors) != sorted(set(self.sensors)):
            raise LearnerError("sensor set must be sorted and distinct")
        if sum(a != b for a, b in zip(self.half_a, self.half_b)) < 2:
            raise LearnerError("halves must differ in at least two components")

    @classmethod
    def from_halves(cls, one: Mapping[str, int], other: Mapping[str, int], **kw) -> "ActionRecord":
        if set(one) != set(other):
            raise LearnerError("halves must be over the same sensor set")
        sensors = tuple(sorted(one))
        h1 = tuple(int(one[s]) for s in sensors)
        h2 = tuple(int(other[s]) for s in sensors)
        first = next((i for i, (a, b) in enumerate(zip(h1, h2)) if a != b), None)
        if first is not None and h1[first] != 1:
            h1, h2 = h2, h1
        return cls(sensors, h1, h2, **kw)

    @property
    def id(self) -> str:
        return f"A{self.index}"

    @property
    def key(self) -> tuple:
        return (self.sensors, self.half_a, self.half_b)

    @property
    def changed(self) -> Tuple[str, ...]:
        return tuple(s for s, a, b in zip(self.sensors, self.half_a, self.half_b) if a != b)

    @property
    def context(self) -> Tuple[str, ...]:
        return tuple(s for s, a, b in zip(self.sensors, self.half_a, self.half_b) if a == b)

    def half(self, which: str) -> Dict[str, int]:
        values = self.half_a if which == "A" else self.half_b
        return dict(zip(self.sensors, values))

    def other(self, which: str) -> str:
        return "B" if which == "A" else "A"

    def satisfied(self, values: Mapping[str, int], which: str) -> bool:
        return all(values.get(s) == v for s, v in self.half(which).items())

    def obtaining_half(self, values: Mapping[str, int]) -> Optional[str]:
        if self.satisfied(values, "A"):
            return "A"
        if self.satisfied(values, "B"):
            return "B"
        return None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "level": self.level,
            "kind": self.kind,
            "halves": [self.half("A"), self.half("B")],
            "changed": list(self.changed),
            "context": list(self.context),
            "created": self.created,
        }

    def __str__(self) -> str:
        def fmt(h):
            return "{" + ",".join(f"{s}:{v:+d}" for s, v in zip(self.sensors, h)) + "}"

        return f"{fmt(self.half_a)}<->{fmt(self.half_b)}"


Snapshot = Union[CoOccurrence, Mapping[str, int]]


def _as_pair(item: Snapshot, tick: int) -> Tuple[int, Dict[str, int]]:
    if isinstance(item, CoOccurrence):
        return item.tick, item.as_dict()
    return tick, dict(item)


class Learner:
    """Incremental co-exclusion over a growing stream of snapshots.

    ``subset_filter`` restricts which sensor subsets may form actions (used for
    the S×G and G×G streams); ``defaults`` supplies values for sensors that
    were not yet registered when older snapshots were taken.
    """

    def __init__(
        self,
        arity: int = 2,
        *,
        kind: str = "meta",
        subset_filter: Optional[Callable[[Tuple[str, ...]], bool]] = None,
        defaults: Optional[Mapping[str, int]] = None,
        level_of: Optional[Callable[[str], int]] = None,
        window: Optional[int] = None,
    ):
        if arity < 2:
            raise LearnerError("co-exclusion needs arity >= 2")
        self.arity = arity
        self.kind = kind
        self.subset_filter = subset_filter
        self.defaults = defaults if defaults is not None else {}
        self.level_of = level_of or (lambda s: 0)
        self.history: deque = deque(maxlen=window)
        self.pool: List[str] = []
        self._subsets: List[Tuple[str, ...]] = []
        self._seen: Dict[Tuple[str, ...], Dict[Tuple[int, ...], int]] = {}
        self._known: set = set()

    def add_sensor(self, sensor: str) -> None:
        if sensor not in self.pool:
            self.pool.append(sensor)
            self._subsets = [
                c
                for c in itertools.combinations(sorted(self.pool), self.arity)
                if self.subset_filter is None or self.subset_filter(c)
            ]

    def forget(self, key: tuple) -> None:
        self._known.discard(key)

    def _project(self, values: Mapping[str, int], subset: Tuple[str, ...]) -> Optional[Tuple[int, ...]]:
        out = []
        for s in subset:
            v = values.get(s, self.defaults.get(s))
            if v is None:
                return None
            out.append(v)
        return tuple(out)

    def _observe(self, subset, proj, tick, out: List[ActionRecord]) -> None:
        if proj is None:
            return
        seen = self._seen.setdefault(subset, {})
        if proj in seen:
            return
        for prior in seen:
            if sum(a != b for a, b in zip(prior, proj)) < 2:
                continue
            action = ActionRecord.from_halves(
                dict(zip(subset, prior)),
                dict(zip(subset, proj)),
                level=1 + max(self.level_of(s) for s in subset),
                kind=self.kind,
                created=tick,
            )
            if action.key not in self._known:
                self._known.add(action.key)
                out.append(action)
        seen[proj] = tick

    def feed(self, snapshot: Snapshot, tick: Optional[int] = None) -> List[ActionRecord]:
        """Consume one snapshot; return the actions it newly implies."""
        tick, values = _as_pair(snapshot, tick if tick is not None else len(self.history))
        for s in sorted(values):
            self.add_sensor(s)
        out: List[ActionRecord] = []
        for subset in self._subsets:
            if subset not in self._seen:
                self._seen[subset] = {}
                for old_tick, old in self.history:
                    self._observe(subset, self._project(old, subset), old_tick, out)
            self._observe(subset, self._project(values, subset), tick, out)
        self.history.append((tick, values))
        return out


def co_exclusion_infer(history: Sequence[Snapshot], arity: int = 2, **kw) -> List[ActionRecord]:
    """All actions implied by a history, in order of discovery."""
    if not history:
        raise LearnerError("history must be non-empty")
    sensors = set()
    for item in history:
        sensors |= set(_as_pair(item, 0)[1])
    if arity > len(sensors):
        raise LearnerError(f"arity {arity} exceeds the {len(sensors)} sensors observed")
    learner = Learner(arity, **kw)
    out: List[ActionRecord] = []
    for i, item in enumerate(history):
        out.extend(learner.feed(item, i if not isinstance(item, CoOccurrence) else None))
    return [
        ActionRecord(a.sensors, a.half_a, a.half_b, a.level, a.kind, a.created, i) for i, a in enumerate(out)
    ]
