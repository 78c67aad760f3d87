"""Tokens and the broadcast board.

Every piece of program state is a token.  Announcing puts a token where every
listener can see it; listening never consumes anything.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple, Type, Union


class BoardError(ValueError):
    pass


def _check_orientation(*values: int) -> None:
    for v in values:
        if v not in (1, -1):
            raise BoardError(f"orientation must be +1 or -1, got {v!r}")


@dataclass(frozen=True)
class StateToken:
    """``(s, +1)`` / ``(s, -1)``"""

    sensor: str
    orientation: int
    issuer: str = "env"
    tick: int = 0

    def __post_init__(self):
        _check_orientation(self.orientation)

    def __str__(self) -> str:
        return f"({self.sensor},{self.orientation:+d})"


@dataclass(frozen=True)
class TransformToken:
    """``(s, +1, -1)``: an effector ready to carry out s -> ~s."""

    sensor: str
    frm: int
    to: int
    issuer: str = ""
    tick: int = 0

    def __post_init__(self):
        _check_orientation(self.frm, self.to)
        if self.frm == self.to:
            raise BoardError("transform must change the orientation")

    def __str__(self) -> str:
        return f"({self.sensor},{self.frm:+d},{self.to:+d})"


@dataclass(frozen=True)
class GoalToken:
    """``(!, (s, +1), (s, -1))``"""

    sensor: str
    frm: int
    to: int
    issuer: str = ""
    tick: int = 0

    def __post_init__(self):
        _check_orientation(self.frm, self.to)
        if self.frm == self.to:
            raise BoardError("goal must change the orientation")

    @property
    def key(self) -> Tuple[str, int, int]:
        return (self.sensor, self.frm, self.to)

    def __str__(self) -> str:
        return f"(!,({self.sensor},{self.frm:+d}),({self.sensor},{self.to:+d}))"


Token = Union[StateToken, TransformToken, GoalToken]
ANY = None


class Board:
    """Multiset of live tokens plus the current tick."""

    def __init__(self, tick: int = 0):
        self.tick = tick
        self._tokens: List[Token] = []

    def __len__(self) -> int:
        return len(self._tokens)

    def __iter__(self):
        return iter(list(self._tokens))

    def announce(self, token: Token) -> bool:
        """Broadcast a token.  Returns False when a duplicate goal was folded away."""
        if isinstance(token, StateToken):
            for t in self._tokens:
                if isinstance(t, StateToken) and t.sensor == token.sensor and t.tick == token.tick:
                    raise BoardError(f"second state token for {token.sensor} in tick {token.tick}")
        elif isinstance(token, GoalToken):
            if self.goal(token.key) is not None:
                return False
        elif not isinstance(token, TransformToken):
            raise BoardError(f"not a token: {token!r}")
        self._tokens.append(token)
        return True

    def listen(self, sensor: Optional[str] = ANY, kind: Optional[Type] = ANY) -> List[Token]:
        return [
            t
            for t in self._tokens
            if (sensor is None or t.sensor == sensor) and (kind is None or isinstance(t, kind))
        ]

    def goals(self) -> List[GoalToken]:
        return [t for t in self._tokens if isinstance(t, GoalToken)]

    def goal(self, key: Tuple[str, int, int]) -> Optional[GoalToken]:
        for t in self._tokens:
            if isinstance(t, GoalToken) and t.key == key:
                return t
        return None

    def remove(self, token: Token) -> None:
        self._tokens = [t for t in self._tokens if t != token]

    def remove_goal(self, key: Tuple[str, int, int]) -> bool:
        before = len(self._tokens)
        self._tokens = [t for t in self._tokens if not (isinstance(t, GoalToken) and t.key == key)]
        return len(self._tokens) != before

    def clear_transient(self) -> None:
        """Drop state and transform tokens; goals persist across ticks."""
        self._tokens = [t for t in self._tokens if isinstance(t, GoalToken)]


def announce(board: Board, token: Token) -> Board:
    board.announce(token)
    return board


def listen(board: Board, sensor: Optional[str] = ANY, kind: Optional[Type] = ANY) -> List[Token]:
    return board.listen(sensor, kind)
