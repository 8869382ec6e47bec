"""Cut times of finite walks and the conditional cut-avoidance machinery.

A time ``k`` in ``[0, n-1]`` is a cut time of ``S_0^n`` when the sites visited
up to ``k`` and the sites visited after ``k`` are disjoint and ``S_k >= 0``
(``kind="definition"``).  For a nearest-neighbor walk disjointness forces the
future to sit entirely on one side of the past.  The ``"right"`` variant asks
for the future strictly to the right (``max S_0^k = S_k < min S_{k+1}^n``),
which is the form under which the conditional-independence property holds
for biased walks; see :func:`cut_independence_gap`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import Color, Number, StepDistribution, WalkPath, all_paths, all_records, path_probability
from .inference import EnumerationResult, ImpossibleRecord, RecordLike, _symbols, enumerate_compatible

CUT_KINDS = ("definition", "right")


def _positions(path) -> tuple[int, ...]:
    return path.positions if isinstance(path, WalkPath) else tuple(path)


def cut_times(path, kind: str = "definition") -> tuple[int, ...]:
    """Sorted cut times of ``path`` (a WalkPath or a position tuple)."""
    if kind not in CUT_KINDS:
        raise ValueError(f"unknown cut-time kind {kind!r}")
    s = _positions(path)
    n = len(s) - 1
    if n < 1:
        return ()
    # suffix extremes of S_{k+1}^n
    suf_min = [0] * (n + 1)
    suf_max = [0] * (n + 1)
    suf_min[n], suf_max[n] = s[n], s[n]
    for t in range(n - 1, 0, -1):
        suf_min[t] = min(s[t], suf_min[t + 1])
        suf_max[t] = max(s[t], suf_max[t + 1])
    out = []
    lo = hi = s[0]
    for k in range(n):
        lo, hi = min(lo, s[k]), max(hi, s[k])
        f_lo, f_hi = suf_min[k + 1], suf_max[k + 1]
        if kind == "right":
            ok = s[k] == hi and f_lo > hi and s[k] >= 0
        else:
            ok = (f_lo > hi or f_hi < lo) and s[k] >= 0
        if ok:
            out.append(k)
    return tuple(out)


def first_cut_time(path, kind: str = "definition") -> Optional[int]:
    ct = cut_times(path, kind)
    return ct[0] if ct else None


def _enum(record: RecordLike, dist: StepDistribution, result: Optional[EnumerationResult]) -> EnumerationResult:
    return result if result is not None else enumerate_compatible(record, dist)


def cut_avoidance(
    record: RecordLike,
    A: Iterable[int],
    dist: StepDistribution,
    kind: str = "definition",
    result: Optional[EnumerationResult] = None,
) -> Number:
    """``P(CT_n ∩ A = ∅ | Y_1^n = record)``."""
    sym = _symbols(record)
    A = frozenset(A)
    if A and (min(A) < 0 or max(A) >= len(sym)):
        raise ValueError(f"A must lie in [0, {len(sym) - 1}]")
    res = _enum(sym, dist, result)
    return _avoid(res, A, kind, _cut_cache(res, kind))


def _cut_cache(res: EnumerationResult, kind: str) -> dict:
    return {pos: frozenset(cut_times(pos, kind)) for pos in res.paths()}


def _avoid(res: EnumerationResult, A: frozenset, kind: str, cache: dict) -> Number:
    num = [] if not res.exact else Fraction(0)
    den = [] if not res.exact else Fraction(0)
    for pos, _, w in res.leaves:
        hit = bool(cache[pos] & A)
        if res.exact:
            den += w
            if not hit:
                num += w
        else:
            den.append(w)
            if not hit:
                num.append(w)
    if not res.exact:
        num, den = math.fsum(num), math.fsum(den)
    if den == 0:
        raise ImpossibleRecord("record has probability zero")
    return num / den


def cut_probabilities(res: EnumerationResult, m: int, kind: str = "definition") -> list[Number]:
    """``P(k ∈ CT_n | record)`` for ``k = 0..m-1``."""
    cache = _cut_cache(res, kind)
    return [1 - _avoid(res, frozenset([k]), kind, cache) for k in range(m)]


def admissible_sets(m: int) -> Iterable[frozenset]:
    """Subsets of ``{0..m-1}`` with at least ``m/2`` elements."""
    lo = math.ceil(m / 2)
    for size in range(lo, m + 1):
        for A in itertools.combinations(range(m), size):
            yield frozenset(A)


def _max_avoidance(res: EnumerationResult, m: int, kind: str) -> Number:
    # the maximum over |A| >= m/2 is attained at a minimal-size set
    cache = _cut_cache(res, kind)
    size = math.ceil(m / 2)
    best = None
    for A in itertools.combinations(range(m), size):
        v = _avoid(res, frozenset(A), kind, cache)
        if best is None or v > best:
            best = v
    return best


def restricted_f(
    m: int,
    n: int,
    records="all",
    dist: StepDistribution = None,
    kind: str = "definition",
    min_size: Optional[float] = None,
) -> Number:
    """Max of cut avoidance over ``A ⊆ [0, m-1]`` with ``|A| >= min_size`` (default
    ``m/2``) and over the listed records of length ``n``.

    A lower bound for the supremum over all horizons and all records.
    Records with probability zero are skipped.
    """
    if dist is None:
        raise ValueError("dist is required")
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    if records == "all":
        if 2**n > 2**14:
            raise ValueError("'all' records limited to n <= 14")
        records = [r.symbols for r in all_records(n)]
    lo = math.ceil(m / 2 if min_size is None else min_size)
    best = dist.zero
    for rec in records:
        sym = _symbols(rec)
        if len(sym) != n:
            raise ValueError(f"record {sym!r} does not have length {n}")
        res = enumerate_compatible(sym, dist)
        if not res.leaves:
            continue
        cache = _cut_cache(res, kind)
        for A in itertools.combinations(range(m), max(lo, 0)):
            v = _avoid(res, frozenset(A), kind, cache)
            if v > best:
                best = v
    return best


# -- audits ------------------------------------------------------------------


@dataclass
class EasyLemmaReport:
    m: int
    n: int
    paths_checked: int
    counterexample: Optional[tuple[int, ...]] = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None


def audit_easy_lemma(m: int, n: int, dist: StepDistribution, kind: str = "definition") -> EasyLemmaReport:
    """Check that ``|CT_n ∩ [0, m-1]| <= m/2`` rules out ``S_l > 2m/3`` for all
    ``m <= l <= n``, on every positive-probability path of length ``n``."""
    if m % 6 != 0:
        raise ValueError("m must be a multiple of 6")
    if not m <= n <= 16:
        raise ValueError("need m <= n <= 16")
    checked = 0
    for path in all_paths(n, dist):
        checked += 1
        s = path.positions
        few = sum(1 for k in cut_times(s, kind) if k < m) <= m / 2
        if few and 3 * min(s[m:]) > 2 * m:
            return EasyLemmaReport(m, n, checked, s)
    return EasyLemmaReport(m, n, checked)


@dataclass
class DeltaChainReport:
    m: int
    n: int
    delta: Number
    f_tilde: Number
    A: tuple[int, ...]
    cut_diff: tuple[Number, ...]
    applicable: bool
    size_ok: bool
    bound_ok: bool

    @property
    def passed(self) -> bool:
        return not self.applicable or (self.size_ok and self.bound_ok)

    @property
    def bound(self) -> Number:
        return 2 * self.f_tilde * (self.m + 1)


def audit_delta_chain(
    prefix: RecordLike, ext1: RecordLike, ext2: RecordLike, dist: StepDistribution, kind: str = "right"
) -> DeltaChainReport:
    """Per-instance executable form of the cut-time bound on the origin-color gap.

    With ``m - 1 = len(prefix)``, ``y = prefix + ext1`` and ``ybar = prefix + ext2``:

    * ``f_tilde`` is the larger, over both records, of the maximal probability
      that a set ``A ⊆ [0, m-1]`` with ``|A| >= m/2`` holds no cut time;
    * ``A`` is the set of ``k`` with ``P(k ∈ CT | y) - P(k ∈ CT | ybar) >= -2 f_tilde``;
    * when ``f_tilde <= 1/2`` the claims are ``|A| >= m/2`` and
      ``|Delta| <= 2 f_tilde (m + 1)``.
    """
    pre, a, b = _symbols(prefix), _symbols(ext1), _symbols(ext2)
    if len(a) != len(b):
        raise ValueError("extensions must have equal length")
    m = len(pre) + 1
    y, ybar = pre + a, pre + b
    if len(y) < m:
        raise ValueError("extensions must be nonempty")
    r1, r2 = enumerate_compatible(y, dist), enumerate_compatible(ybar, dist)
    if not r1.leaves or not r2.leaves:
        raise ImpossibleRecord("record has probability zero")
    delta = r1.probability(None, Color.B) - r2.probability(None, Color.B)
    f_tilde = max(_max_avoidance(r1, m, kind), _max_avoidance(r2, m, kind))
    c1, c2 = cut_probabilities(r1, m, kind), cut_probabilities(r2, m, kind)
    diff = tuple(x - z for x, z in zip(c1, c2))
    A = tuple(k for k, d in enumerate(diff) if d >= -2 * f_tilde)
    applicable = f_tilde <= Fraction(1, 2)
    size_ok = 2 * len(A) >= m
    bound_ok = abs(delta) <= 2 * f_tilde * (m + 1)
    return DeltaChainReport(m, len(y), delta, f_tilde, A, diff, applicable, size_ok, bound_ok)


# -- conditional independence across a cut -----------------------------------


def cut_conditional(
    record: RecordLike,
    k: int,
    x: int,
    dist: StepDistribution,
    kind: str = "definition",
    result: Optional[EnumerationResult] = None,
) -> Number:
    """``P(S_k = x | k ∈ CT_n, Y_1^n = record)``."""
    res = _enum(record, dist, result)
    num = den = dist.zero
    for pos, _, w in res.leaves:
        if k in cut_times(pos, kind):
            den += w
            if pos[k] == x:
                num += w
    if den == 0:
        raise ImpossibleRecord(f"time {k} is never a cut time given the record")
    return num / den


def cut_independence_gap(
    y: RecordLike, ybar: RecordLike, k: int, dist: StepDistribution, kind: str = "definition"
) -> dict[int, tuple[Number, Number]]:
    """``x -> (P(S_k = x | k ∈ CT, y), P(S_k = x | k ∈ CT, ybar))`` for the
    reachable ``x``.  Requires the records to agree on times ``1..k``."""
    a, b = _symbols(y), _symbols(ybar)
    if len(a) != len(b) or a[:k] != b[:k]:
        raise ValueError("records must have equal length and agree on times 1..k")
    r1, r2 = enumerate_compatible(a, dist), enumerate_compatible(b, dist)
    xs = sorted({pos[k] for res in (r1, r2) for pos, _, _ in res.leaves if k in cut_times(pos, kind)})
    return {x: (cut_conditional(a, k, x, dist, kind, r1), cut_conditional(b, k, x, dist, kind, r2)) for x in xs}
