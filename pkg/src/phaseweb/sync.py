"""Binary semaphores with wait/signal, and an exhaustive interleaving checker.

A net is a handful of cyclic processes whose programs consist only of
``wait``, ``signal`` and ``set`` steps.  One program step is atomic.  The
checker explores every interleaving breadth-first and reports reachable
variable co-occurrences, deadlocks, stick-count violations and "decay"
states from which a designated co-occurrence can never come back.
"""
from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

DEFAULT_BOUND = 10**6

OPEN = True
CLOSED = False


class SyncError(ValueError):
    pass


class Outcome(enum.Enum):
    PROCEEDED = "proceeded"
    BLOCKED = "blocked"


@dataclass
class Semaphore:
    id: str
    is_open: bool = False

    @property
    def state(self) -> str:
        return "open" if self.is_open else "closed"


@dataclass(frozen=True)
class Step:
    op: str  # wait | signal | set
    target: str
    value: int = 0

    def __post_init__(self):
        if self.op not in ("wait", "signal", "set"):
            raise SyncError(f"unknown step op {self.op!r}")
        if self.op == "set" and self.value not in (1, -1):
            raise SyncError(f"set step needs a ±1 value, got {self.value!r}")

    @classmethod
    def parse(cls, raw) -> "Step":
        if isinstance(raw, Step):
            return raw
        if isinstance(raw, str):
            raw = raw.split()
        raw = list(raw)
        if not raw:
            raise SyncError("empty step")
        if raw[0] == "set":
            if len(raw) != 3:
                raise SyncError(f"malformed set step {raw!r}")
            return cls("set", str(raw[1]), int(raw[2]))
        if len(raw) != 2:
            raise SyncError(f"malformed step {raw!r}")
        return cls(str(raw[0]), str(raw[1]))

    def to_json(self) -> list:
        return [self.op, self.target, self.value] if self.op == "set" else [self.op, self.target]

    def __str__(self) -> str:
        if self.op == "set":
            return f"set({self.target},{self.value:+d})"
        return f"{self.op}({self.target})"


@dataclass
class ProcessDef:
    id: str
    program: Tuple[Step, ...]
    sticks: frozenset = frozenset()
    pc: int = 0

    def __post_init__(self):
        self.program = tuple(Step.parse(s) for s in self.program)
        self.sticks = frozenset(int(p) for p in self.sticks)
        if not self.program:
            raise SyncError(f"process {self.id} has an empty program")
        bad = [p for p in self.sticks if not 0 <= p < len(self.program)]
        if bad:
            raise SyncError(f"process {self.id}: stick positions {bad} outside program")
        if not 0 <= self.pc < len(self.program):
            raise SyncError(f"process {self.id}: pc {self.pc} outside program")

    @property
    def current(self) -> Step:
        return self.program[self.pc]

    def advance(self) -> None:
        self.pc = (self.pc + 1) % len(self.program)


# the wait/signal table, shared by the object API and the checker
def _wait(is_open: bool) -> Tuple[bool, bool]:
    """-> (proceeded, semaphore open afterwards)"""
    if is_open:
        return True, CLOSED
    return False, CLOSED


def _signal(is_open: bool) -> bool:
    return OPEN


def wait_step(p: ProcessDef, s: Semaphore) -> Outcome:
    step = p.current
    if step.op != "wait" or step.target != s.id:
        raise SyncError(f"{p.id} is at {step}, not wait({s.id})")
    proceeded, s.is_open = _wait(s.is_open)
    if not proceeded:
        return Outcome.BLOCKED
    p.advance()
    return Outcome.PROCEEDED


def signal_step(p: ProcessDef, s: Semaphore) -> Outcome:
    step = p.current
    if step.op != "signal" or step.target != s.id:
        raise SyncError(f"{p.id} is at {step}, not signal({s.id})")
    s.is_open = _signal(s.is_open)
    p.advance()
    return Outcome.PROCEEDED


@dataclass
class SyncNet:
    semaphores: Dict[str, bool]  # id -> initially open
    processes: List[ProcessDef]
    variables: Dict[str, int] = field(default_factory=dict)
    declared_sticks: int = 1
    name: str = ""
    target: Optional[Dict[str, int]] = None
    expect: Dict[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        if self.declared_sticks < 0:
            raise SyncError("declared stick count must be >= 0")
        ids = [p.id for p in self.processes]
        if len(set(ids)) != len(ids):
            raise SyncError(f"duplicate process ids in {ids}")
        for p in self.processes:
            for step in p.program:
                if step.op == "set":
                    if step.target not in self.variables:
                        raise SyncError(f"process {p.id} sets unknown variable {step.target}")
                elif step.target not in self.semaphores:
                    raise SyncError(f"process {p.id} references unknown semaphore {step.target}")
        for v, val in self.variables.items():
            if val not in (1, -1):
                raise SyncError(f"variable {v} must start at ±1")
        if self.target:
            unknown = set(self.target) - set(self.variables)
            if unknown:
                raise SyncError(f"target mentions unknown variables {sorted(unknown)}")

    @property
    def sem_ids(self) -> List[str]:
        return sorted(self.semaphores)

    @property
    def var_ids(self) -> List[str]:
        return sorted(self.variables)

    def initial_state(self) -> "GlobalState":
        return (
            tuple(self.semaphores[s] for s in self.sem_ids),
            tuple(p.pc for p in self.processes),
            tuple(self.variables[v] for v in self.var_ids),
        )

    # JSON -------------------------------------------------------------------
    @classmethod
    def from_dict(cls, data: Mapping) -> "SyncNet":
        try:
            sems = {}
            for s in data["semaphores"]:
                init = s.get("initial", "closed")
                if init in ("open", 1, True):
                    sems[s["id"]] = OPEN
                elif init in ("closed", -1, False):
                    sems[s["id"]] = CLOSED
                else:
                    raise SyncError(f"semaphore {s['id']}: bad initial state {init!r}")
            procs = [
                ProcessDef(p["id"], tuple(p["program"]), frozenset(p.get("sticks", ())), int(p.get("pc", 0)))
                for p in data["processes"]
            ]
            variables = {v["id"]: int(v["initial"]) for v in data.get("variables", [])}
            return cls(
                semaphores=sems,
                processes=procs,
                variables=variables,
                declared_sticks=int(data.get("declared_sticks", 0)),
                name=data.get("name", ""),
                target=dict(data["target"]) if data.get("target") else None,
                expect=dict(data.get("expect", {})),
            )
        except KeyError as exc:
            raise SyncError(f"net description missing field {exc.args[0]!r}") from None

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SyncNet":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "semaphores": [{"id": s, "initial": "open" if self.semaphores[s] else "closed"} for s in self.sem_ids],
            "processes": [
                {"id": p.id, "program": [s.to_json() for s in p.program], "sticks": sorted(p.sticks)}
                for p in self.processes
            ],
            "variables": [{"id": v, "initial": self.variables[v]} for v in self.var_ids],
            "declared_sticks": self.declared_sticks,
        }
        if self.target:
            out["target"] = self.target
        if self.expect:
            out["expect"] = self.expect
        return out


GlobalState = Tuple[Tuple[bool, ...], Tuple[int, ...], Tuple[int, ...]]
Move = Tuple[str, str]  # (process id, step text)


def enabled(net: SyncNet, state: GlobalState, i: int) -> bool:
    sems, pcs, _ = state
    step = net.processes[i].program[pcs[i]]
    if step.op == "wait":
        return sems[net.sem_ids.index(step.target)]
    return True


def successor(net: SyncNet, state: GlobalState, i: int) -> Optional[GlobalState]:
    """Atomic execution of process i's current step; None when it is blocked."""
    sems, pcs, vals = state
    proc = net.processes[i]
    step = proc.program[pcs[i]]
    sems = list(sems)
    vals = list(vals)
    if step.op == "wait":
        j = net.sem_ids.index(step.target)
        proceeded, sems[j] = _wait(sems[j])
        if not proceeded:
            return None
    elif step.op == "signal":
        j = net.sem_ids.index(step.target)
        sems[j] = _signal(sems[j])
    else:
        vals[net.var_ids.index(step.target)] = step.value
    new_pcs = list(pcs)
    new_pcs[i] = (pcs[i] + 1) % len(proc.program)
    return tuple(sems), tuple(new_pcs), tuple(vals)


def stick_count(net: SyncNet, state: GlobalState) -> int:
    sems, pcs, _ = state
    held = sum(1 for p, pc in zip(net.processes, pcs) if pc in p.sticks)
    return sum(1 for s in sems if s) + held


@dataclass
class ReachabilityReport:
    net_name: str
    initial: GlobalState
    states: List[GlobalState]
    edges: Dict[GlobalState, List[Tuple[int, GlobalState]]]
    parents: Dict[GlobalState, Optional[Tuple[GlobalState, int]]]
    co_occurrences: set
    deadlocks: List[GlobalState]
    truncated: bool
    var_ids: List[str]
    target: Optional[Dict[str, int]] = None
    target_states: List[GlobalState] = field(default_factory=list)
    decay_states: List[GlobalState] = field(default_factory=list)
    violations: List[GlobalState] = field(default_factory=list)

    @property
    def target_reachable(self) -> Optional[bool]:
        if self.target is None:
            return None
        return bool(self.target_states)

    @property
    def has_decay(self) -> Optional[bool]:
        if self.target is None:
            return None
        return bool(self.decay_states)

    def trace_to(self, state: GlobalState, net: SyncNet) -> List[Move]:
        path: List[Move] = []
        cur = state
        while self.parents.get(cur) is not None:
            prev, i = self.parents[cur]
            proc = net.processes[i]
            path.append((proc.id, str(proc.program[prev[1][i]])))
            cur = prev
        return path[::-1]

    def variable_assignment(self, state: GlobalState) -> Dict[str, int]:
        return dict(zip(self.var_ids, state[2]))


def _matches(net: SyncNet, state: GlobalState, target: Mapping[str, int]) -> bool:
    vals = dict(zip(net.var_ids, state[2]))
    return all(vals[k] == v for k, v in target.items())


def enumerate_reachable(
    net: SyncNet,
    bound: int = DEFAULT_BOUND,
    target: Optional[Mapping[str, int]] = None,
) -> ReachabilityReport:
    """Breadth-first closure over all interleavings of enabled steps."""
    if bound < 1:
        raise SyncError("bound must be >= 1")
    target = dict(target) if target is not None else (dict(net.target) if net.target else None)
    start = net.initial_state()
    parents: Dict[GlobalState, Optional[Tuple[GlobalState, int]]] = {start: None}
    edges: Dict[GlobalState, List[Tuple[int, GlobalState]]] = {}
    order = [start]
    queue = deque([start])
    deadlocks = []
    truncated = False
    while queue:
        state = queue.popleft()
        out = []
        for i in range(len(net.processes)):
            nxt = successor(net, state, i)
            if nxt is None:
                continue
            out.append((i, nxt))
            if nxt not in parents:
                if len(parents) >= bound:
                    truncated = True
                    continue
                parents[nxt] = (state, i)
                order.append(nxt)
                queue.append(nxt)
        edges[state] = out
        if not out:
            deadlocks.append(state)

    report = ReachabilityReport(
        net_name=net.name,
        initial=start,
        states=order,
        edges=edges,
        parents=parents,
        co_occurrences={s[2] for s in order},
        deadlocks=deadlocks,
        truncated=truncated,
        var_ids=net.var_ids,
        target=target,
    )
    if target is not None:
        hits = [s for s in order if _matches(net, s, target)]
        report.target_states = hits
        can_reach = _backward_closure(edges, hits)
        report.decay_states = [s for s in order if s not in can_reach]
    return report


def _backward_closure(edges, seeds) -> set:
    preds: Dict[GlobalState, List[GlobalState]] = {}
    for src, outs in edges.items():
        for _, dst in outs:
            preds.setdefault(dst, []).append(src)
    seen = set(seeds)
    stack = list(seeds)
    while stack:
        s = stack.pop()
        for p in preds.get(s, ()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def stick_violations(net: SyncNet, report: ReachabilityReport) -> List[GlobalState]:
    return [s for s in report.states if stick_count(net, s) != net.declared_sticks]


def check_stick_invariant(net: SyncNet, report: ReachabilityReport) -> bool:
    report.violations = stick_violations(net, report)
    return not report.violations


def blocked_with_open_semaphore(net: SyncNet, report: ReachabilityReport) -> List[GlobalState]:
    """States where a process waits on an open semaphore yet has no enabled step (lost wakeup)."""
    bad = []
    for s in report.states:
        for i, p in enumerate(net.processes):
            step = p.program[s[1][i]]
            if step.op == "wait" and s[0][net.sem_ids.index(step.target)] and not enabled(net, s, i):
                bad.append(s)
    return bad


def describe_state(net: SyncNet, state: GlobalState) -> dict:
    sems, pcs, vals = state
    return {
        "semaphores": {s: ("open" if o else "closed") for s, o in zip(net.sem_ids, sems)},
        "pcs": {p.id: pc for p, pc in zip(net.processes, pcs)},
        "variables": dict(zip(net.var_ids, vals)),
        "sticks": stick_count(net, state),
    }


def verify_net(net: SyncNet, bound: int = DEFAULT_BOUND) -> dict:
    """Run every check on a net and compare against its ``expect`` block.

    Defaults: sticks conserved, no deadlock, not truncated.  Returns the JSON
    report; ``report["ok"]`` is true iff every flag matches expectations.
    """
    report = enumerate_reachable(net, bound)
    conserved = check_stick_invariant(net, report)
    observed = {
        "sticks_conserved": conserved,
        "deadlock_free": not report.deadlocks,
        "complete": not report.truncated,
    }
    if report.target is not None:
        observed["target_reachable"] = report.target_reachable
        observed["decay"] = report.has_decay
    expected = {"sticks_conserved": True, "deadlock_free": True, "complete": True}
    expected.update(net.expect)
    flags = {k: observed.get(k) == v for k, v in expected.items()}

    def witness(state):
        return {"state": describe_state(net, state), "trace": [list(m) for m in report.trace_to(state, net)]}

    out = {
        "net": net.name,
        "reachable_states": len(report.states),
        "truncated": report.truncated,
        "declared_sticks": net.declared_sticks,
        "co_occurrences": [dict(zip(report.var_ids, v)) for v in sorted(report.co_occurrences, reverse=True)],
        "observed": observed,
        "expected": expected,
        "flags": flags,
        "ok": all(flags.values()),
        "violations": [witness(s) for s in report.violations[:5]],
        "deadlocks": [witness(s) for s in report.deadlocks[:5]],
    }
    if report.target is not None:
        out["target"] = report.target
        out["target_witness"] = witness(report.target_states[0]) if report.target_states else None
        out["decay_witness"] = witness(report.decay_states[0]) if report.decay_states else None
    return out
