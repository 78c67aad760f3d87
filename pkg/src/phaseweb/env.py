"""Environments on the far side of the sensor/effector boundary.

The engine sees an environment only through :meth:`read` and influences it
only through :meth:`apply`.  ``step`` plays back exogenous script events and
optional seeded noise.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .board import TransformToken

log = logging.getLogger(__name__)

KINDS = ("blocks", "switches", "scripted")


class EnvError(ValueError):
    pass


@dataclass
class EnvSpec:
    kind: str
    places: List[str] = field(default_factory=list)  # blocks
    full: List[str] = field(default_factory=list)  # blocks: initially occupied places
    lights: List[str] = field(default_factory=list)  # switches
    on: List[str] = field(default_factory=list)  # switches: initially lit
    initial: Dict[str, int] = field(default_factory=dict)  # scripted
    script: List[Tuple[int, str, int]] = field(default_factory=list)
    seed: int = 0
    noise: float = 0.0
    paired_moves: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise EnvError(f"env.kind must be one of {KINDS}, got {self.kind!r}")
        self.script = [(int(t), str(s), int(o)) for t, s, o in self.script]
        ticks = [t for t, _, _ in self.script]
        if any(b <= a for a, b in zip(ticks, ticks[1:])):
            raise EnvError("env.script ticks must be strictly increasing")
        for t, s, o in self.script:
            if o not in (1, -1):
                raise EnvError(f"env.script orientation must be ±1 at tick {t}")
            if s not in self.sensors:
                raise EnvError(f"env.script names unknown sensor {s!r} at tick {t}")
        if self.kind == "blocks":
            if len(set(self.places)) != len(self.places):
                raise EnvError("env.places has duplicates")
            if not set(self.full) <= set(self.places):
                raise EnvError("env.full names places that do not exist")
            if len(set(self.full)) > len(self.places):
                raise EnvError("more blocks than places")
        if self.kind == "switches" and not set(self.on) <= set(self.lights):
            raise EnvError("env.on names lights that do not exist")
        if self.kind == "scripted":
            bad = [k for k, v in self.initial.items() if v not in (1, -1)]
            if bad:
                raise EnvError(f"env.initial values must be ±1: {bad}")
        if not 0.0 <= self.noise <= 1.0:
            raise EnvError("env.noise must be within [0, 1]")

    @property
    def sensors(self) -> List[str]:
        if self.kind == "blocks":
            return list(self.places)
        if self.kind == "switches":
            return list(self.lights)
        return sorted(self.initial)

    @classmethod
    def from_dict(cls, data: Mapping) -> "EnvSpec":
        known = {
            "kind", "places", "full", "lights", "on", "initial", "script", "seed", "noise", "paired_moves",
        }
        extra = set(data) - known
        if extra:
            raise EnvError(f"unknown env field(s): {sorted(extra)}")
        if "kind" not in data:
            raise EnvError("env.kind is required")
        kw = dict(data)
        kw["script"] = [tuple(e) for e in data.get("script", [])]
        return cls(**kw)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "seed": self.seed}
        if self.kind == "blocks":
            out.update(places=self.places, full=self.full, paired_moves=self.paired_moves)
        elif self.kind == "switches":
            out.update(lights=self.lights, on=self.on)
        else:
            out.update(initial=self.initial)
        out["script"] = [list(e) for e in self.script]
        if self.noise:
            out["noise"] = self.noise
        return out

    def build(self) -> "EnvState":
        return {"blocks": BlocksWorld, "switches": SwitchesWorld, "scripted": ScriptedWorld}[self.kind](self)


class EnvState:
    """Base class; subclasses hold the kind-specific state."""

    def __init__(self, spec: EnvSpec):
        self.spec = spec
        self.rng = random.Random(spec.seed)
        self.log: List[str] = []
        self._script = {t: (s, o) for t, s, o in spec.script}

    @property
    def sensors(self) -> List[str]:
        return self.spec.sensors

    @property
    def effectors(self) -> List[str]:
        return [] if self.spec.kind == "scripted" else self.spec.sensors

    def read(self) -> Dict[str, int]:
        raise NotImplementedError

    def apply(self, effects: Sequence[TransformToken]) -> "EnvState":
        raise NotImplementedError

    def _set(self, sensor: str, orientation: int) -> None:
        raise NotImplementedError

    def _noise(self) -> None:
        for s in self.sensors:
            if self.rng.random() < self.spec.noise:
                self._set(s, -self.read()[s])
                self.log.append(f"noise {s}")

    def step(self, tick: int) -> "EnvState":
        event = self._script.get(tick)
        if event is not None:
            self._set(*event)
            self.log.append(f"script tick={tick} {event[0]}={event[1]:+d}")
        if self.spec.noise:
            self._noise()
        return self

    def pending_events(self, tick: int) -> bool:
        return self.spec.noise > 0 or any(t >= tick for t in self._script)

    def _check_effectors(self, effects: Iterable[TransformToken]) -> None:
        for e in effects:
            if e.sensor not in self.effectors:
                raise EnvError(f"unknown effector {e.sensor!r}")


class BlocksWorld(EnvState):
    """Places that each hold at most one block; sensor x is +1 iff x is full."""

    def __init__(self, spec: EnvSpec):
        super().__init__(spec)
        self.full = set(spec.full)

    def read(self) -> Dict[str, int]:
        return {p: (1 if p in self.full else -1) for p in self.spec.places}

    def _move(self, src: str, dst: str) -> None:
        self.full.discard(src)
        self.full.add(dst)

    def apply(self, effects: Sequence[TransformToken]) -> "BlocksWorld":
        effects = list(effects)
        self._check_effectors(effects)
        sources = [e.sensor for e in effects if e.frm == 1 and e.to == -1]
        targets = [e.sensor for e in effects if e.frm == -1 and e.to == 1]
        if not self.spec.paired_moves:
            for s in sources:
                if s in self.full:
                    self.full.discard(s)
                else:
                    self.log.append(f"noop empty {s}: already empty")
            for t in targets:
                if t not in self.full:
                    self.full.add(t)
                else:
                    self.log.append(f"noop fill {t}: already full")
            return self
        sources = [s for s in dict.fromkeys(sources) if self._feasible_source(s)]
        targets = [t for t in dict.fromkeys(targets) if self._feasible_target(t)]
        for src, dst in zip(sources, targets):
            if src not in self.full or dst in self.full:
                self.log.append(f"noop infeasible {src}->{dst}")
                continue
            self._move(src, dst)
            self.log.append(f"move {src}->{dst}")
        for s in sources[len(targets):]:
            self.log.append(f"noop unpaired {s}+1->-1")
        for t in targets[len(sources):]:
            self.log.append(f"noop unpaired {t}-1->+1")
        return self

    def _feasible_source(self, s: str) -> bool:
        if s not in self.full:
            self.log.append(f"noop infeasible {s}: empty")
            return False
        return True

    def _feasible_target(self, t: str) -> bool:
        if t in self.full:
            self.log.append(f"noop infeasible {t}: full")
            return False
        return True

    def _set(self, sensor: str, orientation: int) -> None:
        # exogenous change moves a block so the block count is conserved
        if orientation == -1 and sensor in self.full:
            empty = sorted(set(self.spec.places) - self.full)
            if empty:
                self._move(sensor, self.rng.choice(empty))
        elif orientation == 1 and sensor not in self.full:
            donors = sorted(self.full)
            if donors:
                self._move(self.rng.choice(donors), sensor)


class SwitchesWorld(EnvState):
    def __init__(self, spec: EnvSpec):
        super().__init__(spec)
        self.lit = set(spec.on)

    def read(self) -> Dict[str, int]:
        return {l: (1 if l in self.lit else -1) for l in self.spec.lights}

    def apply(self, effects: Sequence[TransformToken]) -> "SwitchesWorld":
        effects = list(effects)
        self._check_effectors(effects)
        current = self.read()
        for e in effects:
            if current[e.sensor] != e.frm:
                self.log.append(f"noop {e.sensor}: already {current[e.sensor]:+d}")
                continue
            self._set(e.sensor, e.to)
            current[e.sensor] = e.to
        return self

    def _set(self, sensor: str, orientation: int) -> None:
        if orientation == 1:
            self.lit.add(sensor)
        else:
            self.lit.discard(sensor)


class ScriptedWorld(EnvState):
    """Exogenous playback only; effects are ignored."""

    def __init__(self, spec: EnvSpec):
        super().__init__(spec)
        self.values = dict(spec.initial)

    def read(self) -> Dict[str, int]:
        return dict(sorted(self.values.items()))

    def apply(self, effects: Sequence[TransformToken]) -> "ScriptedWorld":
        effects = list(effects)
        if effects:
            self.log.append(f"ignored {len(effects)} effect(s)")
        return self

    def _set(self, sensor: str, orientation: int) -> None:
        self.values[sensor] = orientation


def env_read(env: EnvState) -> Dict[str, int]:
    return env.read()


def env_apply(env: EnvState, effects: Sequence[TransformToken]) -> EnvState:
    return env.apply(effects)


def env_step(env: EnvState, tick: int) -> EnvState:
    return env.step(tick)
