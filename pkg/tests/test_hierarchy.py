
import pytest
from conftest import make_switch_world, pair
from hypothesis import given, settings
from hypothesis import strategies as st

from phaseweb.algebra import Blade, Multivector, apply_action
from phaseweb.board import GoalToken
from phaseweb.env import EnvSpec
from phaseweb.hierarchy import (
    DigitCount,
    HierarchyConfig,
    HierarchyError,
    build_level,
    combinatorial_sequence,
    goal_cooccurrence,
    grade_monotone,
    grade_transcription,
    hierarchy_dump,
    presence_id,
    reflect_orientation,
    transcription_grade,
    trickle_down,
)
from phaseweb.learner import ActionRecord, CoOccurrence
from phaseweb.world import WorldConfig, WorldState, tick


def settle(world, n=1):
    for _ in range(n):
        tick(world)
    return world


# reflect_orientation


def test_reflect_half_a():
    assert reflect_orientation(pair("p", "q"), {"p": 1, "q": 1}) == 1


def test_reflect_half_b():
    assert reflect_orientation(pair("p", "q"), CoOccurrence.of({"p": -1, "q": -1})) == -1


def test_reflect_neither_keeps_previous():
    assert reflect_orientation(pair("p", "q"), {"p": 1, "q": -1}, previous=-1) == -1
    assert reflect_orientation(pair("p", "q"), {"p": 1, "q": -1}) is None


@settings(max_examples=50)
@given(st.dictionaries(st.sampled_from("pqr"), st.sampled_from([1, -1]), min_size=3))
def test_meta_sensor_faithful(values):
    a = ActionRecord.from_halves({"p": 1, "q": -1, "r": 1}, {"p": -1, "q": 1, "r": 1})
    got = reflect_orientation(a, values, previous=0)
    direct = 1 if all(values[s] == v for s, v in a.half("A").items()) else (
        -1 if all(values[s] == v for s, v in a.half("B").items()) else 0)
    assert got == direct


# bubble-up


def test_bubble_up_meta_snapshot(two_level):
    settle(two_level)
    assert two_level.streams["S1"][-1].as_dict() == {"M0": 1, "M1": 1}
    assert two_level.values["M2"] == 1


def test_bubble_up_noop_without_actions():
    w = make_switch_world()
    settle(w)
    assert w.meta_sensors() == [] and "S1" not in w.streams


def test_flipping_all_primitives_flips_both_levels(two_level):
    settle(two_level)
    for light in "pqrt":
        two_level.env._set(light, -1)
    settle(two_level)
    assert [two_level.values[m] for m in ("M0", "M1", "M2")] == [-1, -1, -1]


# trickle-down


def test_trickle_fans_out_to_changed_set(two_level):
    settle(two_level)
    leaves = trickle_down(two_level, GoalToken("M0", 1, -1))
    assert sorted(g.key for g in leaves) == [("p", 1, -1), ("q", 1, -1)]


def test_trickle_passes_primitives_through(two_level):
    g = GoalToken("p", 1, -1)
    assert trickle_down(two_level, g) == [g]


def test_trickle_meta_meta_gives_four(two_level):
    settle(two_level)
    leaves = trickle_down(two_level, GoalToken("M2", 1, -1))
    assert sorted(g.key for g in leaves) == [(s, 1, -1) for s in "pqrt"]


def test_trickle_defers_when_from_half_absent(two_level):
    settle(two_level)
    assert trickle_down(two_level, GoalToken("M0", -1, 1)) == []


def test_trickle_targets_decrease_in_level(two_level):
    settle(two_level)
    trickle_down(two_level, GoalToken("M2", 1, -1))
    for g in two_level.board.goals():
        if g.issuer in two_level.sensors:
            assert two_level.sensors[g.sensor].level < two_level.sensors[g.issuer].level


def brute_expand(world, sensor):
    info = world.sensors[sensor]
    if info.kind != "meta":
        return [sensor]
    action = world.actions[info.action]
    return [leaf for x in action.changed for leaf in brute_expand(world, x)]


def test_fan_out_matches_brute_expansion(two_level):
    settle(two_level)
    for m in ("M0", "M1", "M2"):
        leaves = trickle_down(two_level, GoalToken(m, 1, -1))
        assert sorted(g.sensor for g in leaves) == sorted(brute_expand(two_level, m))


# round trip through the environment


def test_round_trip_meta_goal():
    w = make_switch_world()
    w.register_action(pair("p", "q"))
    w.register_action(pair("r", "t"))
    settle(w)
    w.issue_goal(GoalToken("M0", 1, -1, "test", w.tick))
    settle(w, 2)
    assert w.env.read() == {"p": -1, "q": -1, "r": 1, "t": 1}
    assert w.values["M0"] == -1
    assert w.board.goals() == []


def test_meta_goal_volunteers_through_level_two_action(two_level):
    # A2 = {M0+,M1+}/{M0-,M1-} is relevant to a goal on M0 and volunteers M1's flip
    settle(two_level)
    two_level.issue_goal(GoalToken("M0", 1, -1, "test", two_level.tick))
    settle(two_level, 2)
    assert set(two_level.env.read().values()) == {-1}


def test_round_trip_meta_meta_goal(two_level):
    settle(two_level)
    two_level.issue_goal(GoalToken("M2", 1, -1, "test", two_level.tick))
    settle(two_level, 2)
    assert set(two_level.env.read().values()) == {-1}
    assert two_level.values["M2"] == -1


# building levels


def test_build_meta_level_from_complementary_history():
    w = make_switch_world()
    w.register_action(pair("p", "q"))
    w.register_action(pair("r", "t"))
    w.streams["S1"] = [CoOccurrence.of({"M0": 1, "M1": 1}, 0), CoOccurrence.of({"M0": -1, "M1": -1}, 1)]
    build_level(w, HierarchyConfig("meta", 2), 1)
    top = w.actions[-1]
    assert top.sensors == ("M0", "M1") and top.level == 2 and top.kind == "meta"


def goal_world(layers):
    env = EnvSpec("switches", lights=["p", "q"]).build()
    return WorldState(env, WorldConfig(layers=[HierarchyConfig(t) for t in layers], learn=False))


def test_build_icarian_level():
    w = goal_world(["icarian"])
    for key in [("p", -1, 1), ("q", -1, 1)]:
        w.issue_goal(GoalToken(*key, issuer="ext"))
    w.sense_goals()
    g1, g2 = presence_id(("p", -1, 1)), presence_id(("q", -1, 1))
    w.streams["GG"] = [CoOccurrence.of({g1: 1, g2: -1}, 0), CoOccurrence.of({g1: -1, g2: 1}, 1)]
    build_level(w, HierarchyConfig("icarian"), 1)
    assert [a.kind for a in w.actions] == ["icarian"]


def test_build_morphic_level_and_it_issues_goals():
    w = goal_world(["morphic"])
    w.issue_goal(GoalToken("p", -1, 1, issuer="ext"))
    w.sense_goals()
    g = presence_id(("p", -1, 1))
    w.streams["SG"] = [CoOccurrence.of({"p": 1, g: -1}, 0), CoOccurrence.of({"p": -1, g: 1}, 1)]
    build_level(w, HierarchyConfig("morphic"), 1)
    (a,) = w.actions
    assert a.kind == "morphic" and set(a.sensors) == {"p", g}
    w.board.remove_goal(("p", -1, 1))
    settle(w)
    assert w.board.goal(("p", -1, 1)) is not None


def test_goal_cooccurrence_lists_presence():
    w = goal_world(["icarian"])
    assert goal_cooccurrence(w) is None
    w.issue_goal(GoalToken("p", -1, 1, issuer="ext"))
    w.sense_goals()
    assert goal_cooccurrence(w).as_dict() == {("p", -1, 1): 1}


def test_volunteered_goals_are_not_intentions():
    w = goal_world(["morphic"])
    w.register_action(pair("p", "q", 1, -1))
    w.issue_goal(GoalToken("q", 1, -1, issuer="A0"))
    w.sense_goals()
    assert w.presence_sensors() == []


def test_hierarchy_config_validation():
    with pytest.raises(HierarchyError):
        HierarchyConfig("gödel")
    with pytest.raises(HierarchyError):
        HierarchyConfig("meta", 0)
    with pytest.raises(HierarchyError):
        HierarchyConfig.from_dict({"type": "meta", "depth": 2})


def test_non_pancake_stream_spans_levels():
    w = make_switch_world(pancake=False)
    w.register_action(pair("p", "q"))
    settle(w)
    assert set(w.streams["S1"][-1].as_dict()) == {"p", "q", "r", "t", "M0"}


# transcription


def test_state_transcription():
    w = make_switch_world(lights="pq", on="p")
    assert grade_transcription(w, CoOccurrence.of({"p": 1, "q": -1})) == Multivector(2, {Blade.of(1): 1, Blade.of(2): -1})


def test_action_transcription_matches_half_swap():
    w = make_switch_world(lights="pq", on="pq")
    a = w.register_action(pair("p", "q"))
    mv = grade_transcription(w, a)
    assert mv == Multivector.from_blade(2, Blade.of(1, 2))
    state = grade_transcription(w, CoOccurrence.of(a.half("A")))
    assert apply_action(Blade.of(1, 2), state) == grade_transcription(w, CoOccurrence.of(a.half("B")))


def test_action_and_dual_transcribe_differently():
    w = make_switch_world(lights="pq", on="pq")
    a = w.register_action(pair("p", "q", 1, 1))
    b = w.register_action(pair("p", "q", 1, -1))
    assert grade_transcription(w, a) == -grade_transcription(w, b)


def test_grade_rises_with_level(two_level):
    assert transcription_grade(two_level, two_level.actions[0]) == 2
    assert transcription_grade(two_level, two_level.actions[2]) == 4
    assert grade_monotone(two_level) == [("A2", True)]


def test_transcription_injective_on_registered(two_level):
    images = [grade_transcription(two_level, a) for a in two_level.actions]
    assert len(set(images)) == len(images)


def test_unregistered_entity():
    w = make_switch_world()
    with pytest.raises(HierarchyError):
        grade_transcription(w, pair("p", "q", index=7))
    with pytest.raises(HierarchyError):
        grade_transcription(w, "nope")


def test_duals_give_complete_next_level_action():
    w = make_switch_world(lights="pq", on="pq")
    w.register_action(pair("p", "q", 1, 1))
    w.register_action(pair("p", "q", 1, -1))
    # p,q walk through all four assignments; M0 and M1 change together once
    for p, q in [(1, 1), (1, -1), (-1, -1), (-1, 1)]:
        w.env._set("p", p)
        w.env._set("q", q)
        settle(w)
    w.streams["S1"] = [CoOccurrence.of({"M0": 1, "M1": 1}, 0), CoOccurrence.of({"M0": -1, "M1": -1}, 1)]
    build_level(w, w.layer("meta"), 1)
    top = [a for a in w.actions if set(a.sensors) == {"M0", "M1"}]
    assert top and set(top[0].changed) == {"M0", "M1"}


# combinatorial sequence


@pytest.mark.parametrize("k,val", [(0, 3), (1, 7), (2, 127), (3, 170141183460469231731687303715884105727)])
def test_sequence_exact(k, val):
    assert combinatorial_sequence(k) == val


def test_sequence_k3_is_mersenne():
    assert combinatorial_sequence(3) == 2**127 - 1


def test_sequence_k4_digits_only():
    assert combinatorial_sequence(4) == DigitCount(51217599719369681875006054625051616350)


def test_sequence_bounds():
    with pytest.raises(HierarchyError):
        combinatorial_sequence(-1)
    with pytest.raises(OverflowError):
        combinatorial_sequence(5)


# dump


def test_dump_shape(two_level):
    settle(two_level)
    d = hierarchy_dump(two_level)
    (meta,) = d["hierarchies"]
    assert meta["type"] == "meta" and meta["pancake"]
    assert [len(l["actions"]) for l in meta["levels"]] == [2, 1, 0]
    assert meta["levels"][1]["sensors"] == ["M0", "M1"]
    assert set(meta["levels"][0]["actions"][0]) >= {"halves", "changed", "context"}
