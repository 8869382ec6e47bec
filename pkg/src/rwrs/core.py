"""Walks, colorings and color records.

Everything here is an immutable value.  Probabilities are carried either as
``float`` or, when both walk parameters are :class:`fractions.Fraction`, as
exact rationals; the rational mode exists so that oracle tests can compare for
exact equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Union

Number = Union[float, Fraction]

INCREMENTS = (-1, 0, 1)


class Color(str, Enum):
    B = "B"
    W = "W"

    def flipped(self) -> "Color":
        return Color.W if self is Color.B else Color.B

    def __lt__(self, other):
        if not isinstance(other, Color):
            return NotImplemented
        return self.value < other.value

    def __str__(self) -> str:
        return self.value


def _as_number(x, exact: bool) -> Number:
    if exact:
        return x if isinstance(x, Fraction) else Fraction(str(x))
    return float(x)


@dataclass(frozen=True)
class StepDistribution:
    """Walk increments 0, +1, -1 with probabilities eps, p(1-eps), (1-p)(1-eps).

    Passing a ``Fraction`` for either parameter switches the whole
    distribution to exact rational arithmetic.
    """

    p: Number
    epsilon: Number = 0.0

    def __post_init__(self):
        exact = isinstance(self.p, Fraction) or isinstance(self.epsilon, Fraction)
        p = _as_number(self.p, exact)
        eps = _as_number(self.epsilon, exact)
        if not (Fraction(1, 2) <= p <= 1):
            raise ValueError(f"p must lie in [1/2, 1], got {p}")
        if not (0 <= eps < 1):
            raise ValueError(f"epsilon must lie in [0, 1), got {eps}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def rational(cls, p, epsilon=0) -> "StepDistribution":
        return cls(Fraction(str(p)), Fraction(str(epsilon)))

    @property
    def exact(self) -> bool:
        return isinstance(self.p, Fraction)

    @property
    def half(self) -> Number:
        return Fraction(1, 2) if self.exact else 0.5

    @property
    def one(self) -> Number:
        return Fraction(1) if self.exact else 1.0

    @property
    def zero(self) -> Number:
        return Fraction(0) if self.exact else 0.0

    @property
    def pause(self) -> Number:
        return self.epsilon

    @property
    def right(self) -> Number:
        return self.p * (1 - self.epsilon)

    @property
    def left(self) -> Number:
        return (1 - self.p) * (1 - self.epsilon)

    def step_probability(self, step: int) -> Number:
        if step == 1:
            return self.right
        if step == -1:
            return self.left
        if step == 0:
            return self.pause
        raise ValueError(f"invalid increment {step}")

    def support(self) -> list[tuple[int, Number]]:
        """Increments with positive probability, in the order -1, 0, +1."""
        return [(d, self.step_probability(d)) for d in INCREMENTS if self.step_probability(d) > 0]

    def as_float(self) -> "StepDistribution":
        return StepDistribution(float(self.p), float(self.epsilon))

    def __str__(self) -> str:
        return f"(p={self.p}, eps={self.epsilon})"


@dataclass(frozen=True)
class ColorRecord:
    """A finite color sequence; ``symbols[i]`` is the color at time ``start + i``."""

    symbols: str = ""
    start: int = 1

    def __post_init__(self):
        if isinstance(self.symbols, (list, tuple)):
            object.__setattr__(self, "symbols", "".join(str(c) for c in self.symbols))
        bad = set(self.symbols) - {"B", "W"}
        if bad:
            raise ValueError(f"invalid color symbols {sorted(bad)}")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[Color]:
        return (Color(c) for c in self.symbols)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return ColorRecord(self.symbols[i], self.start + (i.start or 0))
        return Color(self.symbols[i])

    def __add__(self, other: "ColorRecord") -> "ColorRecord":
        if not isinstance(other, ColorRecord):
            return NotImplemented
        return ColorRecord(self.symbols + other.symbols, self.start)

    def __mul__(self, k: int) -> "ColorRecord":
        return ColorRecord(self.symbols * k, self.start)

    def __str__(self) -> str:
        return self.symbols

    def flip(self) -> "ColorRecord":
        return ColorRecord(self.symbols.translate(_FLIP), self.start)

    def render(self) -> str:
        from .grammar import render

        return render(self)

    @classmethod
    def parse(cls, text: str) -> "ColorRecord":
        from .grammar import parse_record

        return parse_record(text)


_FLIP = str.maketrans("BW", "WB")


@dataclass(frozen=True)
class WalkPath:
    """Positions ``S_0 = 0, S_1, ..., S_n`` of a lazy nearest-neighbor walk."""

    positions: tuple[int, ...]

    def __post_init__(self):
        pos = tuple(int(x) for x in self.positions)
        if not pos or pos[0] != 0:
            raise ValueError("a walk path must start at 0")
        for a, b in zip(pos, pos[1:]):
            if abs(b - a) > 1:
                raise ValueError(f"increment {b - a} is not in {{-1, 0, +1}}")
        object.__setattr__(self, "positions", pos)

    @classmethod
    def from_increments(cls, increments: Iterable[int]) -> "WalkPath":
        pos = [0]
        for d in increments:
            pos.append(pos[-1] + d)
        return cls(tuple(pos))

    @property
    def n(self) -> int:
        return len(self.positions) - 1

    @property
    def increments(self) -> tuple[int, ...]:
        p = self.positions
        return tuple(b - a for a, b in zip(p, p[1:]))

    def __len__(self) -> int:
        return self.n

    def concat(self, other: "WalkPath") -> "WalkPath":
        """Append ``other`` translated to start where this path ends."""
        end = self.positions[-1]
        return WalkPath(self.positions + tuple(end + x for x in other.positions[1:]))

    def reflect(self) -> "WalkPath":
        return WalkPath(tuple(-x for x in self.positions))


@dataclass(frozen=True)
class InducedColoring:
    """Colors forced on the visited sites by a compatible (path, record) pair."""

    colors: tuple[tuple[int, Color], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, Color]) -> "InducedColoring":
        return cls(tuple(sorted((int(k), Color(v)) for k, v in mapping.items())))

    @property
    def interval(self) -> tuple[int, int]:
        return self.colors[0][0], self.colors[-1][0]

    def as_dict(self) -> dict[int, Color]:
        return dict(self.colors)

    def __getitem__(self, site: int) -> Color:
        return self.as_dict()[site]

    def __contains__(self, site: int) -> bool:
        return any(s == site for s, _ in self.colors)

    def __len__(self) -> int:
        return len(self.colors)


def path_probability(path: WalkPath, dist: StepDistribution) -> Number:
    """Product of step probabilities along ``path``.

    Float mode forms the product as a sum of logs so that long paths do not
    underflow before the final exponentiation.
    """
    if dist.exact:
        out = Fraction(1)
        for d in path.increments:
            out *= dist.step_probability(d)
        return out
    logp = log_path_probability(path, dist)
    return 0.0 if logp == -math.inf else math.exp(logp)


def log_path_probability(path: WalkPath, dist: StepDistribution) -> float:
    total = 0.0
    for d in path.increments:
        q = dist.step_probability(d)
        if q == 0:
            return -math.inf
        total += math.log(q)
    return total


def walk_range(path: WalkPath, from_time: int = 0) -> int:
    """Number of distinct sites among ``S_from_time, ..., S_n``."""
    if not 0 <= from_time <= path.n:
        raise IndexError(f"from_time {from_time} outside [0, {path.n}]")
    return len(set(path.positions[from_time:]))


def compatible(path: WalkPath, record: ColorRecord) -> Optional[InducedColoring]:
    """The coloring induced on ``S_1..S_n`` by ``record`` (= Y_1..Y_n), or None on conflict."""
    if len(record) != path.n:
        raise ValueError(f"record length {len(record)} != path length {path.n}")
    seen: dict[int, str] = {}
    for site, c in zip(path.positions[1:], record.symbols):
        prev = seen.setdefault(site, c)
        if prev != c:
            return None
    return InducedColoring.from_mapping({k: Color(v) for k, v in seen.items()})


def _compatible_with_origin(path: WalkPath, record: ColorRecord, origin: Color):
    if len(record) != path.n:
        raise ValueError(f"record length {len(record)} != path length {path.n}")
    seen = {0: Color(origin).value}
    for site, c in zip(path.positions[1:], record.symbols):
        if seen.setdefault(site, c) != c:
            return None
    return seen


def joint_weight(path: WalkPath, record: ColorRecord, dist: StepDistribution) -> Number:
    """P(S_1^n = path, Y_1^n = record)."""
    if len(record) != path.n:
        raise ValueError(f"record length {len(record)} != path length {path.n}")
    if compatible(path, record) is None:
        return dist.zero
    return path_probability(path, dist) * dist.half ** walk_range(path, 1)


def joint_weight_with_origin(
    path: WalkPath, record: ColorRecord, origin: Color, dist: StepDistribution
) -> Number:
    """P(S_1^n = path, Y_0 = origin, Y_1^n = record)."""
    if _compatible_with_origin(path, record, origin) is None:
        return dist.zero
    return path_probability(path, dist) * dist.half ** walk_range(path, 0)


def replay(path: WalkPath, coloring: Mapping[int, Color], from_time: int = 1) -> ColorRecord:
    """The record a path produces over a (partial) coloring."""
    return ColorRecord("".join(Color(coloring[s]).value for s in path.positions[from_time:]), from_time)


def all_paths(n: int, dist: Optional[StepDistribution] = None) -> Iterator[WalkPath]:
    """Every path of length ``n``, restricted to positive-probability steps when ``dist`` is given."""
    import itertools

    steps = INCREMENTS if dist is None else tuple(d for d, _ in dist.support())
    for inc in itertools.product(steps, repeat=n):
        yield WalkPath.from_increments(inc)


def all_records(n: int) -> Iterator[ColorRecord]:
    import itertools

    for sym in itertools.product("BW", repeat=n):
        yield ColorRecord("".join(sym))
