"""Named predicates on complete walk paths.

A path is passed as its tuple of positions ``(S_0, ..., S_n)``.  Turns are
defined pointwise: the walk turns at time ``t`` when ``X_{t+1} = -X_t`` with
both steps nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

EVENT_NAMES = ("LT_l", "NT", "EU", "ED", "AOT", "custom")

Positions = Sequence[int]


@dataclass(frozen=True)
class PathEvent:
    name: str
    predicate: Callable[[Positions], bool]

    def __call__(self, positions: Positions) -> bool:
        return bool(self.predicate(positions))

    def __and__(self, other: "PathEvent") -> "PathEvent":
        a, b = self.predicate, other.predicate
        return PathEvent(f"{self.name},{other.name}", lambda s: a(s) and b(s))

    def __or__(self, other: "PathEvent") -> "PathEvent":
        a, b = self.predicate, other.predicate
        return PathEvent(f"{self.name}|{other.name}", lambda s: a(s) or b(s))

    def __invert__(self) -> "PathEvent":
        a = self.predicate
        return PathEvent(f"not {self.name}", lambda s: not a(s))


def turns_at(positions: Positions, t: int) -> bool:
    if t < 1 or t + 1 >= len(positions):
        return False
    before = positions[t] - positions[t - 1]
    after = positions[t + 1] - positions[t]
    return before != 0 and after == -before


def last_turn(pivots: Sequence[int], l: int) -> PathEvent:
    """Turns on pivots 0..l and on none of the later ones."""
    pivots = tuple(pivots)
    if not 0 <= l < len(pivots):
        raise ValueError(f"pivot index {l} outside [0, {len(pivots) - 1}]")

    def pred(s):
        return all(turns_at(s, t) for t in pivots[: l + 1]) and not any(turns_at(s, t) for t in pivots[l + 1 :])

    return PathEvent(f"LT_{l}", pred)


def no_turn(pivots: Sequence[int]) -> PathEvent:
    pivots = tuple(pivots)
    return PathEvent("NT", lambda s: not any(turns_at(s, t) for t in pivots))


def at_least_one_turn(pivots: Sequence[int]) -> PathEvent:
    pivots = tuple(pivots)
    return PathEvent("AOT", lambda s: any(turns_at(s, t) for t in pivots))


END_UP = PathEvent("EU", lambda s: len(s) > 1 and s[-1] == s[-2] + 1)
END_DOWN = PathEvent("ED", lambda s: len(s) > 1 and s[-1] == s[-2] - 1)
ALWAYS = PathEvent("custom", lambda s: True)


def position_at(k: int, x: int) -> PathEvent:
    return PathEvent("custom", lambda s: s[k] == x)


def isolated_whites(symbols: str, start: int = 1) -> list[int]:
    """Times of W's whose neighbors in the record are both B (candidate pivots)."""
    out = []
    for i in range(1, len(symbols) - 1):
        if symbols[i] == "W" and symbols[i - 1] == "B" and symbols[i + 1] == "B":
            out.append(start + i)
    return out


def by_name(name: str, pivots: Sequence[int], l: int | None = None) -> PathEvent:
    if name == "LT_l" or name.startswith("LT_"):
        if l is None and name.startswith("LT_") and name[3:].isdigit():
            l = int(name[3:])
        if l is None:
            raise ValueError("LT_l needs a pivot index l")
        return last_turn(pivots, l)
    table = {"NT": lambda: no_turn(pivots), "AOT": lambda: at_least_one_turn(pivots), "EU": lambda: END_UP, "ED": lambda: END_DOWN}
    if name not in table:
        raise ValueError(f"unknown event {name!r}; expected one of {EVENT_NAMES[:-1]}")
    return table[name]()
