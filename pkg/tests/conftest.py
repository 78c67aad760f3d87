import pytest

from phaseweb.env import EnvSpec
from phaseweb.hierarchy import HierarchyConfig
from phaseweb.learner import ActionRecord
from phaseweb.world import WorldConfig, WorldState


def pair(a, b, va=1, vb=1, **kw):
    """Action over {a, b} whose halves are {a:va, b:vb} and its negation."""
    return ActionRecord.from_halves({a: va, b: vb}, {a: -va, b: -vb}, **kw)


def make_switch_world(lights="pqrt", on="pqrt", levels=2, pancake=True, learn=False):
    env = EnvSpec("switches", lights=list(lights), on=list(on)).build()
    cfg = WorldConfig(layers=[HierarchyConfig("meta", levels, pancake)], learn=learn)
    return WorldState(env, cfg)


@pytest.fixture
def two_level():
    """p,q,r,t all on; A0 over {p,q}, A1 over {r,t}, A2 over their meta-sensors M0, M1."""
    w = make_switch_world()
    w.register_action(pair("p", "q"))
    w.register_action(pair("r", "t"))
    w.register_action(pair("M0", "M1", level=2))
    return w


ACCEPTANCE = {}


def record(criterion: int, title: str, ok: bool) -> None:
    ACCEPTANCE[criterion] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {title}")
