"""Record families with a pivot structure, and their pivot arithmetic.

Blocks of ``WWBB`` cannot be traversed with a turn at ``eps = 0``, so a walk
reading ``[WWBB]^M`` is monotone.  An isolated ``W`` followed by ``BB`` is a
pivot: the only place where a compatible walk may reverse direction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

from .core import Color, ColorRecord, StepDistribution, WalkPath, all_paths
from .events import PathEvent


@dataclass(frozen=True)
class ProbeGeometry:
    m: int
    L: int

    def __post_init__(self):
        if self.m < 1 or self.L < 1:
            raise ValueError("need m >= 1 and L >= 1")

    def t(self, l: int) -> int:
        """Time of pivot ``l`` (0-based)."""
        m = self.m
        return l * (2 * l + 8 * m + 1) + 5 * m

    def t_sum_form(self, l: int) -> int:
        return 5 * self.m + sum(3 + 4 * (2 * self.m + j) for j in range(l))

    @property
    def pivot_times(self) -> tuple[int, ...]:
        return tuple(self.t(l) for l in range(self.L + 1))

    @property
    def n(self) -> int:
        L, m = self.L, self.m
        return L * (2 * L + 8 * m + 5) + 13 * m + 2

    def u(self, l: int) -> int:
        return (1 + 8 * self.m) * (l % 2) + 2 * l

    def u_sum_form(self, l: int) -> int:
        return sum((-1) ** (l - j) * (self.t(j) - self.t(j - 1)) for j in range(1, l + 1))

    def v(self, l: int) -> int:
        L, m = self.L, self.m
        return (L - l) * (2 * L + 2 * l + 8 * m + 5) + 2 * l + 3 * m + 2 - (l % 2)

    def v_defining_form(self, l: int) -> int:
        m = self.m
        return self.n - self.t(l) - self.u(l) + (-1) ** (l - 1) * 4 * m - m

    @property
    def u_values(self) -> tuple[int, ...]:
        return tuple(self.u(l) for l in range(self.L + 1))

    @property
    def v_values(self) -> tuple[int, ...]:
        return tuple(self.v(l) for l in range(self.L))


def bad_probe_pair(m: int, L: int) -> tuple[ColorRecord, ColorRecord, ProbeGeometry]:
    """Extensions ``ybar`` and ``ytilde`` starting at time ``m``.

    ``ybar = [WWBB]^m  prod_{j=0..L} WBB [WWBB]^(2m+j)``; ``ytilde`` drops the
    final ``WBB`` (so it has one pivot fewer).
    """
    g = ProbeGeometry(m, L)
    parts = ["WWBB" * m]
    for j in range(L + 1):
        parts.append("WBB")
        parts.append("WWBB" * (2 * m + j))
    bar = "".join(parts)
    tilde = "".join(parts[:-2] + parts[-1:])
    return ColorRecord(bar, m), ColorRecord(tilde, m), g


def good_config_prefix(L: int) -> ColorRecord:
    """``BBWBB [WWBB] prod_{j=2..L} WBB [WWBB]^j``, of length ``L(2L+5)+2``."""
    if L < 1:
        raise ValueError("need L >= 1")
    parts = ["BBWBB", "WWBB"]
    for j in range(2, L + 1):
        parts.append("WBB")
        parts.append("WWBB" * j)
    return ColorRecord("".join(parts))


def good_pivot_times(L: int) -> tuple[int, ...]:
    """Times of the ``L`` pivots in :func:`good_config_prefix`."""
    return tuple(3 + sum(3 + 4 * (j + 1) for j in range(k)) for k in range(L))


def sparse_probe(k: int, K: int, color: Color = Color.B) -> ColorRecord:
    """``[W B^(k-1)]^K W`` for ``B``; the color-exchanged record for ``W``."""
    if k < 2 or K < 1:
        raise ValueError("need k >= 2 and K >= 1")
    rec = ColorRecord(("W" + "B" * (k - 1)) * K + "W")
    return rec if Color(color) is Color.B else rec.flip()


def all_same(n: int, color: Color = Color.B) -> ColorRecord:
    if n < 0:
        raise ValueError("need n >= 0")
    return ColorRecord(Color(color).value * n)


# name -> (builder, parameter names) for the CLI
BUILDERS: dict[str, tuple[Callable[..., ColorRecord], tuple[str, ...]]] = {
    "barY": (lambda m, L: bad_probe_pair(m, L)[0], ("m", "L")),
    "tildeY": (lambda m, L: bad_probe_pair(m, L)[1], ("m", "L")),
    "goodPrefix": (good_config_prefix, ("L",)),
    "sparseB": (lambda k, K: sparse_probe(k, K, Color.B), ("k", "K")),
    "sparseW": (lambda k, K: sparse_probe(k, K, Color.W), ("k", "K")),
    "allB": (lambda n: all_same(n, Color.B), ("n",)),
    "allW": (lambda n: all_same(n, Color.W), ("n",)),
}


def build(name: str, **params) -> ColorRecord:
    if name not in BUILDERS:
        raise ValueError(f"unknown probe {name!r}; expected one of {sorted(BUILDERS)}")
    fn, names = BUILDERS[name]
    missing = [p for p in names if params.get(p) is None]
    if missing:
        raise ValueError(f"probe {name} needs {', '.join('--' + p for p in missing)}")
    return fn(*(int(params[p]) for p in names))


# -- structural observations -------------------------------------------------


@dataclass
class StructureReport:
    checked: int
    compatible: int
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations


def _monotone(path: WalkPath) -> bool:
    inc = path.increments
    return all(d == 1 for d in inc) or all(d == -1 for d in inc)


def check_no_turn(M: int, dist: Optional[StepDistribution] = None) -> StructureReport:
    """Every walk reading ``[WWBB]^M`` at ``eps = 0`` is monotone.

    The record is read from the starting site on (times ``0..4M-1``): a turn
    at time ``t`` repeats the color of time ``t - 1`` at time ``t + 1``, and
    for ``t = 1`` that color is the starting site's.
    """
    dist = dist or StepDistribution(0.5, 0.0)
    if dist.epsilon != 0:
        raise ValueError("the no-turn observation needs eps = 0")
    if 4 * M > 24:
        raise ValueError("exhaustive check limited to 4M <= 24")
    rec = "WWBB" * M
    checked = ok = 0
    bad = []
    for path in all_paths(len(rec) - 1, dist):
        checked += 1
        seen: dict[int, str] = {}
        if all(seen.setdefault(x, c) == c for x, c in zip(path.positions, rec)):
            ok += 1
            if not _monotone(path):
                bad.append(path.positions)
    return StructureReport(checked, ok, bad)


def turn_inserted(M: int, at: int) -> bool:
    """Whether the monotone walk with one reversal at time ``at`` can read ``[WWBB]^M``."""
    rec = "WWBB" * M
    n = len(rec) - 1
    if not 1 <= at < n:
        raise ValueError("turn time must lie in [1, 4M-2]")
    inc = [1] * at + [-1] * (n - at)
    pos = WalkPath.from_increments(inc).positions
    seen: dict[int, str] = {}
    return all(seen.setdefault(x, c) == c for x, c in zip(pos, rec))


def periodic_coloring(M: int, phase: int = 0) -> Callable[[int], Color]:
    """Coloring of ``Z`` with period ``WWBB`` shifted by ``phase``."""
    return lambda x: Color("WWBB"[(x + phase) % 4])


def check_unique_walk(
    m: int, M: int, coloring: Optional[Callable[[int], Color]] = None
) -> StructureReport:
    """For every record of length ``m - 1`` and every start site on a stretch
    of ``4M`` sites, at most one walk reading that record stays on the stretch.

    The default coloring is ``[WWBB]`` periodic; pass another to see the
    property fail (e.g. all black)."""
    if M < m:
        raise ValueError("need M >= m")
    color = coloring or periodic_coloring(M)
    sites = range(4 * M)
    checked = found = 0
    bad = []
    for rec in itertools.product("BW", repeat=m - 1):
        rec = "".join(rec)
        for x0 in sites:
            checked += 1
            walks = []
            for inc in itertools.product((-1, 1), repeat=m - 1):
                pos = [x0]
                for d in inc:
                    pos.append(pos[-1] + d)
                if all(0 <= p < 4 * M for p in pos) and all(color(p).value == c for p, c in zip(pos[1:], rec)):
                    walks.append(tuple(pos))
            found += bool(walks)
            if len(walks) > 1:
                bad.append((rec, x0, walks))
    return StructureReport(checked, found, bad)


def visit_event(m: int, span: int, record: str) -> PathEvent:
    """Sites ``S_m - 1`` and ``S_m + 1`` are both visited during ``[m, m+span]``
    and both are black (so the black stretches next to the white site seen at
    time ``m`` are both entered).  ``record`` is ``Y_1^n``; colors of visited
    sites are read off it."""

    def pred(s):
        x = s[m]
        seen = {}
        for t in range(m, min(m + span, len(s) - 1) + 1):
            if t >= 1:
                seen[s[t]] = record[t - 1]
        return seen.get(x - 1) == "B" and seen.get(x + 1) == "B"

    return PathEvent("custom", pred)
