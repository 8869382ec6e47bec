"""Exact conditional law of the origin color given a finite color record.

Three independent routes compute ``P(Y_0 = B | Y_1^n = y)``:

* ``filter``: a forward dynamic program over :class:`FilterState` (visited
  interval, current offset, origin index, colors of the interval).  The joint
  weight of a (path, record) pair factorizes over first visits, so this tuple
  is a sufficient statistic and merging branches just adds weights.
* ``enumeration``: depth-first search over compatible paths with incremental
  pruning.  Slower, but it sees whole paths, so it also answers path-event
  queries such as "last turn on pivot l".
* ``oracle``: the direct sum of joint weights over every increment sequence.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple, Optional, Sequence, Union

from .core import (
    Color,
    ColorRecord,
    Number,
    StepDistribution,
    WalkPath,
    joint_weight_with_origin,
    path_probability,
)
from .events import PathEvent

DEFAULT_STATE_CAP = 50_000_000
DEFAULT_NODE_CAP = 20_000_000
BRUTE_FORCE_MAX_EXACT = 16
BRUTE_FORCE_MAX_FLOAT = 20


class ImpossibleRecord(ValueError):
    """The conditioning event has probability zero."""


class EnumerationInfeasible(RuntimeError):
    pass


class StateExplosion(RuntimeError):
    pass


RecordLike = Union[ColorRecord, str]


def _symbols(record: RecordLike) -> str:
    if isinstance(record, ColorRecord):
        return record.symbols
    ColorRecord(record)  # validates
    return record


def _log(x: Number) -> float:
    if x <= 0:
        return -math.inf
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


class FilterState(NamedTuple):
    width: int
    offset: int
    origin_index: int
    colors: int  # bit i set <=> site (left end + i) is W

    def color_at(self, index: int) -> Color:
        return Color.W if (self.colors >> index) & 1 else Color.B

    @property
    def origin_color(self) -> Color:
        return self.color_at(self.origin_index)


@dataclass(frozen=True)
class ConditionalResult:
    p_black: Number
    p_white: Number
    log_normalizer: float
    states_explored: int
    backend: str
    approximate: bool = False
    pruned: int = 0

    @property
    def normalizer(self) -> float:
        return math.exp(self.log_normalizer)


def initial_states(dist: StepDistribution) -> dict[FilterState, Number]:
    h = dist.half
    return {FilterState(1, 0, 0, 0): h, FilterState(1, 0, 0, 1): h}


def advance(states: dict[FilterState, Number], symbol: str, dist: StepDistribution) -> tuple[dict, int]:
    """One filter step on record symbol ``symbol``; returns (new states, dead branches)."""
    bit = 1 if symbol == "W" else 0
    half = dist.half
    support = dist.support()
    new: dict[FilterState, Number] = {}
    dead = 0
    for key in sorted(states):
        w = states[key]
        width, off, org, colors = key
        for d, q in support:
            j = off + d
            if 0 <= j < width:
                if (colors >> j) & 1 != bit:
                    dead += 1
                    continue
                nk = FilterState(width, j, org, colors)
                nw = w * q
            elif j < 0:
                nk = FilterState(width + 1, 0, org + 1, (colors << 1) | bit)
                nw = w * q * half
            else:
                nk = FilterState(width + 1, width, org, colors | (bit << width))
                nw = w * q * half
            if nk in new:
                new[nk] += nw
            else:
                new[nk] = nw
    return new, dead


def _truncate(states: dict, top_k: int) -> dict:
    keep = sorted(states.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
    return dict(sorted(keep))


@dataclass
class FilterRun:
    states: dict
    log_scale: float = 0.0
    explored: int = 0
    pruned: int = 0
    approximate: bool = False

    def origin_masses(self) -> tuple[Number, Number]:
        wb = wv = 0
        for key in sorted(self.states):
            if key.origin_color is Color.B:
                wb += self.states[key]
            else:
                wv += self.states[key]
        return wb, wv


def forward_filter(
    record: RecordLike,
    dist: StepDistribution,
    state_cap: int = DEFAULT_STATE_CAP,
    top_k: Optional[int] = None,
    run: Optional[FilterRun] = None,
) -> FilterRun:
    """Run (or continue) the forward filter over ``record``.

    Float weights are renormalized after every step with the log of the scale
    kept in ``log_scale``; rational weights are kept exact.
    """
    if run is None:
        run = FilterRun(initial_states(dist), explored=2)
    else:
        run = FilterRun(dict(run.states), run.log_scale, run.explored, run.pruned, run.approximate)
    for sym in _symbols(record):
        run.states, dead = advance(run.states, sym, dist)
        run.pruned += dead
        run.explored += len(run.states)
        if run.explored > state_cap:
            raise StateExplosion(f"filter exceeded {state_cap} states")
        if top_k is not None and len(run.states) > top_k:
            run.states = _truncate(run.states, top_k)
            run.approximate = True
        if not run.states:
            raise ImpossibleRecord("record has probability zero under " + str(dist))
        if not dist.exact:
            total = math.fsum(run.states.values())
            if total == 0.0:
                raise ImpossibleRecord("record has probability zero (underflow) under " + str(dist))
            run.log_scale += math.log(total)
            run.states = {k: v / total for k, v in run.states.items()}
    return run


def _result_from_masses(wb, ww, log_scale, explored, backend, approximate=False, pruned=0):
    total = wb + ww
    if total == 0:
        raise ImpossibleRecord("record has probability zero")
    return ConditionalResult(
        p_black=wb / total,
        p_white=ww / total,
        log_normalizer=log_scale + _log(total),
        states_explored=explored,
        backend=backend,
        approximate=approximate,
        pruned=pruned,
    )


def conditional_color_at_origin(
    record: RecordLike,
    dist: StepDistribution,
    backend: str = "filter",
    state_cap: int = DEFAULT_STATE_CAP,
    top_k: Optional[int] = None,
) -> ConditionalResult:
    """``P(Y_0 = B | Y_1^n = record)`` with diagnostics."""
    sym = _symbols(record)
    if not sym:
        raise ValueError("record must have length >= 1")
    if backend == "enumeration":
        return enumerate_compatible(sym, dist).origin_result()
    if backend == "oracle":
        return brute_force_conditional(sym, dist)
    if backend != "filter":
        raise ValueError(f"unknown backend {backend!r}")
    run = forward_filter(sym, dist, state_cap=state_cap, top_k=top_k)
    wb, ww = run.origin_masses()
    return _result_from_masses(wb, ww, run.log_scale, run.explored, "filter", run.approximate, run.pruned)


def conditional_table(n: int, dist: StepDistribution, shorter: bool = False) -> dict[str, ConditionalResult]:
    """Filter results for every record of length ``n`` (and every shorter one if
    ``shorter``), sharing work along common prefixes."""
    out: dict[str, ConditionalResult] = {}

    def walk(prefix: str, run: FilterRun):
        if prefix and (shorter or len(prefix) == n):
            wb, ww = run.origin_masses()
            out[prefix] = _result_from_masses(wb, ww, run.log_scale, run.explored, "filter", pruned=run.pruned)
        if len(prefix) == n:
            return
        for sym in "BW":
            walk(prefix + sym, forward_filter(sym, dist, run=run))

    walk("", FilterRun(initial_states(dist), explored=2))
    return out


# -- enumeration -------------------------------------------------------------


@dataclass
class EnumerationResult:
    """Compatible paths with their joint weights ``P(path, Y_0, Y_1^n)``.

    ``leaves`` holds ``(positions, origin color, weight)``; float weights are
    relative to ``exp(log_scale)``.
    """

    leaves: list
    log_scale: float
    nodes: int
    exact: bool
    pruned: int = 0

    def total(self, origin: Optional[Color] = None) -> Number:
        return self.mass(None, origin)

    def mass(self, event: Optional[PathEvent], origin: Optional[Color] = None) -> Number:
        acc = [] if not self.exact else Fraction(0)
        for pos, o, w in self.leaves:
            if origin is not None and o != origin:
                continue
            if event is not None and not event(pos):
                continue
            if self.exact:
                acc += w
            else:
                acc.append(w)
        return acc if self.exact else math.fsum(acc)

    def probability(self, event: Optional[PathEvent], origin: Optional[Color] = None) -> Number:
        """``P(event [, Y_0 = origin] | Y_1^n)``."""
        total = self.total()
        if total == 0:
            raise ImpossibleRecord("record has probability zero")
        return self.mass(event, origin) / total

    def given(self, event: PathEvent, origin: Color = Color.B) -> Number:
        """``P(Y_0 = origin | event, Y_1^n)``."""
        den = self.mass(event)
        if den == 0:
            raise ImpossibleRecord(f"event {event.name} has probability zero given the record")
        return self.mass(event, origin) / den

    def origin_result(self) -> ConditionalResult:
        wb = self.mass(None, Color.B)
        ww = self.mass(None, Color.W)
        return _result_from_masses(wb, ww, self.log_scale, self.nodes, "enumeration", pruned=self.pruned)

    def paths(self) -> list[tuple[int, ...]]:
        return sorted({pos for pos, _, _ in self.leaves})


def enumerate_compatible(
    record: RecordLike,
    dist: StepDistribution,
    origin: Optional[Color] = None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> EnumerationResult:
    """All paths ``S_0^n`` (with origin color) compatible with ``record``."""
    sym = _symbols(record)
    n = len(sym)
    exact = dist.exact
    support = dist.support()
    if exact:
        steps = [(d, q, q * dist.half) for d, q in support]
        root = dist.half
    else:
        steps = [(d, math.log(q), math.log(q) + math.log(0.5)) for d, q in support]
        root = math.log(0.5)
    leaves = []
    colors: dict[int, str] = {}
    pos = [0]
    counters = {"nodes": 0, "pruned": 0}

    def dfs(t: int, w):
        if t == n:
            leaves.append((tuple(pos), Color(colors[0]), w))
            return
        c = sym[t]
        x = pos[-1]
        for d, q_seen, q_fresh in steps:
            y = x + d
            prev = colors.get(y)
            if prev is not None and prev != c:
                counters["pruned"] += 1
                continue
            counters["nodes"] += 1
            if counters["nodes"] > node_cap:
                raise EnumerationInfeasible(f"enumeration exceeded {node_cap} nodes")
            pos.append(y)
            if prev is None:
                colors[y] = c
                dfs(t + 1, w * q_fresh if exact else w + q_fresh)
                del colors[y]
            else:
                dfs(t + 1, w * q_seen if exact else w + q_seen)
            pos.pop()

    import sys

    limit = sys.getrecursionlimit()
    if n + 100 > limit:
        sys.setrecursionlimit(n + 1000)
    for o in (Color.B, Color.W) if origin is None else (Color(origin),):
        colors.clear()
        colors[0] = o.value
        dfs(0, root)

    log_scale = 0.0
    if not exact and leaves:
        log_scale = max(w for _, _, w in leaves)
        leaves = [(p, o, math.exp(w - log_scale)) for p, o, w in leaves]
    return EnumerationResult(leaves, log_scale, counters["nodes"], exact, counters["pruned"])


def conditional_event(
    record: RecordLike,
    dist: StepDistribution,
    event: PathEvent,
    joint_with_origin_color: Optional[Color] = None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> Number:
    """``P(event [, Y_0 = color] | Y_1^n = record)`` by pruned enumeration."""
    res = enumerate_compatible(record, dist, node_cap=node_cap)
    return res.probability(event, joint_with_origin_color)


def delta(
    prefix: RecordLike,
    ext1: RecordLike,
    ext2: RecordLike,
    dist: StepDistribution,
    backend: str = "filter",
    equal_length: bool = True,
) -> Number:
    """Difference of ``P(Y_0 = B | .)`` between ``prefix+ext1`` and ``prefix+ext2``.

    Pass ``equal_length=False`` to compare extensions of different lengths
    (the two bad probes differ by one pivot block)."""
    a, b = _symbols(ext1), _symbols(ext2)
    if equal_length and len(a) != len(b):
        raise ValueError("extensions must have equal length")
    pre = _symbols(prefix)
    # ext1 == ext2 gives an exact zero regardless of backend
    if a == b:
        return dist.zero
    r1 = conditional_color_at_origin(pre + a, dist, backend=backend)
    r2 = conditional_color_at_origin(pre + b, dist, backend=backend)
    return r1.p_black - r2.p_black


# -- brute force -------------------------------------------------------------


def _check_brute_size(n: int, dist: StepDistribution):
    cap = BRUTE_FORCE_MAX_EXACT if dist.exact else BRUTE_FORCE_MAX_FLOAT
    if n > cap:
        raise EnumerationInfeasible(f"brute force limited to n <= {cap} in this mode")


def brute_force_conditional(record: RecordLike, dist: StepDistribution) -> ConditionalResult:
    """Sum joint weights over all 3^n increment sequences; no pruning, no merging."""
    sym = _symbols(record)
    n = len(sym)
    _check_brute_size(n, dist)
    rec = ColorRecord(sym)
    wb = wv = dist.zero
    count = 0
    for inc in itertools.product((-1, 0, 1), repeat=n):
        path = WalkPath.from_increments(inc)
        wb += joint_weight_with_origin(path, rec, Color.B, dist)
        wv += joint_weight_with_origin(path, rec, Color.W, dist)
        count += 1
    return _result_from_masses(wb, wv, 0.0, count, "oracle")


def brute_force_table(n: int, dist: StepDistribution) -> dict[str, tuple[Number, Number]]:
    """``P(Y_0 = B, Y_1^n = y)`` and ``P(Y_0 = W, Y_1^n = y)`` for every ``y``.

    Every positive-probability increment sequence is paired with every
    coloring of its support (an interval, since steps are nearest-neighbor);
    each pair produces exactly one record.  Pair counts are tallied per
    weight signature (#right, #left, #pause, range) and weighted at the end.
    """
    import numpy as np

    _check_brute_size(n, dist)
    if n < 1:
        raise ValueError("n must be >= 1")
    steps = np.array([d for d, _ in dist.support()], dtype=np.int64)
    inc = steps[np.array(list(itertools.product(range(len(steps)), repeat=n)), dtype=np.int64).reshape(-1, n)]
    pos = np.concatenate([np.zeros((len(inc), 1), dtype=np.int64), np.cumsum(inc, axis=1)], axis=1)
    lo = pos.min(axis=1)
    rng = pos.max(axis=1) - lo + 1
    idx = pos - lo[:, None]
    sig = np.stack([(inc == 1).sum(1), (inc == -1).sum(1), (inc == 0).sum(1), rng], axis=1)
    sigs, sig_id = np.unique(sig, axis=0, return_inverse=True)
    sig_id = sig_id.reshape(-1)
    shifts = np.arange(n, dtype=np.int64)
    nrec = 1 << n
    counts = np.zeros(len(sigs) * nrec * 2, dtype=np.int64)
    for r in np.unique(rng):
        rows = np.nonzero(rng == r)[0]
        for chunk in np.array_split(rows, max(1, (len(rows) << int(r)) // 2_000_000 + 1)):
            col = np.arange(1 << int(r), dtype=np.int64)[:, None, None]
            bits = (col >> idx[chunk][None, :, :]) & 1
            codes = (bits[:, :, 1:] << shifts).sum(axis=2)
            origin = bits[:, :, 0]
            flat = (sig_id[chunk][None, :] * nrec + codes) * 2 + origin
            counts += np.bincount(flat.reshape(-1), minlength=counts.size)
    counts = counts.reshape(len(sigs), nrec, 2)

    def weight(a, b, c, r):
        return dist.right ** int(a) * dist.left ** int(b) * dist.pause ** int(c) * dist.half ** int(r)

    if dist.exact:
        ws = [weight(*row) for row in sigs]
        den = math.lcm(*(w.denominator for w in ws))
        wint = np.array([w.numerator * (den // w.denominator) for w in ws], dtype=object)
        nums = np.tensordot(wint, counts.astype(object), axes=1)
        mass = lambda code, o: Fraction(int(nums[code, o]), den)
    else:
        wf = np.array([float(weight(*row)) for row in sigs])
        masses = np.tensordot(wf, counts.astype(float), axes=1)
        mass = lambda code, o: float(masses[code, o])
    table = {}
    for code in range(nrec):
        if counts[:, code, :].any():
            rec = "".join("W" if (code >> t) & 1 else "B" for t in range(n))
            table[rec] = (mass(code, 0), mass(code, 1))
    return table
