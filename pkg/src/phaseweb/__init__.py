"""Sensor/action networks learned by co-exclusion, with an exact Clifford-algebra back end."""
from .algebra import Blade, Multivector, verify_ladder
from .board import Board, GoalToken, StateToken, TransformToken
from .env import EnvSpec
from .hierarchy import HierarchyConfig, combinatorial_sequence, grade_transcription
from .learner import ActionRecord, CoOccurrence, Learner, co_exclusion_infer
from .scenario import Scenario, run_scenario
from .sync import SyncNet, enumerate_reachable
from .world import WorldConfig, WorldState, run, tick

__all__ = [
    "ActionRecord", "Blade", "Board", "CoOccurrence", "EnvSpec", "GoalToken", "HierarchyConfig",
    "Learner", "Multivector", "Scenario", "StateToken", "SyncNet", "TransformToken", "WorldConfig",
    "WorldState", "co_exclusion_infer", "combinatorial_sequence", "enumerate_reachable",
    "grade_transcription", "run", "run_scenario", "tick", "verify_ladder",
]
