"""Experiment catalog.

Each entry maps ``(parameters, seed)`` to a list of tables and a list of
checks.  Entries are deterministic: instance generation uses
``random.Random(seed)`` and rows are written sorted by their key columns.
"""

from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

from . import confinement, probes, rates
from .core import Color, StepDistribution
from .cuts import CUT_KINDS, audit_delta_chain, audit_easy_lemma, cut_conditional, cut_times, restricted_f
from .events import END_DOWN, END_UP, at_least_one_turn, last_turn, no_turn
from .inference import (
    ImpossibleRecord,
    brute_force_table,
    conditional_color_at_origin,
    conditional_table,
    enumerate_compatible,
)
from .output import Table, write_manifest, write_tables
from .sampler import sis_conditional

# Values computed by independent oracle runs before the main build and frozen.
# Bad-probe gap at L = 3, m = 1, eps = 0 (exact rational enumeration).
FROZEN_DELTA_L3 = {Fraction(3, 5): 0.19752484297318396, Fraction(7, 10): 0.38078346471029384}
# P(C_0 = B | B^n) at n = 10^4 is 0.99824206237205 (transfer matrix) and
# 0.9982420623720497 (sine eigenbasis); the threshold is its 4-digit floor.
BLACK_RUN_THRESHOLD = 0.9982
# Smallest even n with p(n,4,1) / p(n,3,1) > 10^3, by exact path counting.
CONFINEMENT_RATIO_N = 54


class CheckFailed(AssertionError):
    pass


@dataclass
class Check:
    label: str
    passed: bool
    detail: str = ""
    claim: str = ""
    criterion: Optional[int] = None
    required: bool = True

    def line(self) -> str:
        status = "PASS" if self.passed else ("FAIL" if self.required else "NOTE")
        tag = f"[{self.criterion}] " if self.criterion is not None else ""
        return f"{status} {tag}{self.label}: {self.detail}"

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "passed": self.passed,
            "detail": self.detail,
            "claim": self.claim,
            "criterion": self.criterion,
            "required": self.required,
        }


@dataclass
class ExperimentSpec:
    id: str
    parameters: dict = field(default_factory=dict)
    seed: Optional[int] = None


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    tables: list
    checks: list
    wall_time: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    def failures(self) -> list:
        return [c for c in self.checks if c.required and not c.passed]


@dataclass(frozen=True)
class Entry:
    id: str
    name: str
    run: Callable
    defaults: dict
    criteria: tuple
    summary: str


# -- helpers -----------------------------------------------------------------


def workers() -> int:
    env = os.environ.get("RWRS_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"RWRS_THREADS must be a positive integer, got {env!r}")
        if n < 1:
            raise ValueError("RWRS_THREADS must be >= 1")
        return n
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return os.cpu_count() or 1


def parallel_map(fn: Callable, items: Iterable) -> list:
    """``[fn(x) for x in items]`` over a process pool; order is preserved."""
    items = list(items)
    n = min(workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


def _grid(pairs) -> list:
    return [(_frac(p), _frac(e)) for p, e in pairs]


def _rdist(p, e) -> StepDistribution:
    return StepDistribution(_frac(p), _frac(e))


def _fdist(p, e) -> StepDistribution:
    return StepDistribution(float(_frac(p)), float(_frac(e)))


def _word(rng: random.Random, n: int) -> str:
    return "".join(rng.choice("BW") for _ in range(n))


def _collect(candidates, fn, target: int, batch: int = 32) -> tuple[list, int]:
    """Evaluate candidates in batches until ``target`` results are not None."""
    out, tried = [], 0
    it = iter(candidates)
    while len(out) < target:
        chunk = [c for _, c in zip(range(batch), it)]
        if not chunk:
            break
        tried += len(chunk)
        for r in parallel_map(fn, chunk):
            if r is not None and len(out) < target:
                out.append(r)
    return out, tried


# -- E1 phase diagram --------------------------------------------------------


def _e1_row(args):
    i, j, p_points, eps_points, h = args
    p = Fraction(1, 2) + Fraction(i, 2 * p_points)
    eps = Fraction(j, eps_points)
    pf, ef = float(p), float(eps)
    g = rates.goodness_criterion(pf, ef)
    sign = rates.crossover_sign(p, 0)
    # derivative at q = 1/2 with delta = eps (finite entropy), checked by central differences
    exact = rates.crossover_derivative(0.5, ef, pf)
    fd = (rates.crossover_cost(0.5 + h, ef, pf, ef) - rates.crossover_cost(0.5 - h, ef, pf, ef)) / (2 * h)
    return (p, eps, g.holds, g.margin, g.drift_ok, sign, exact, abs(fd - exact))


def run_phase_diagram(P: dict, seed: int) -> tuple[list, list]:
    n_p, n_e = int(P["p_points"]), int(P["eps_points"])
    h, tol = float(P["fd_step"]), float(P["fd_tol"])
    deltas = [_frac(d) for d in P["deltas"]]
    rows = parallel_map(_e1_row, [(i, j, n_p, n_e, h) for i in range(n_p) for j in range(n_e)])
    grid = Table(
        "phase_diagram",
        ("p", "eps", "criterion_holds", "margin", "drift_ok", "derivative_sign", "derivative", "fd_error"),
        key=("p", "eps"),
    )
    for r in rows:
        grid.add(*r)

    sign_bad = []
    for p in sorted({r[0] for r in rows}):
        for d in deltas:
            s = rates.crossover_sign(p, d)
            if (s > 0) != (p < Fraction(4, 5)):
                sign_bad.append((p, d))
            # closed form in floating point agrees wherever it is not rounding noise
            v = rates.crossover_derivative(0.5, float(d), float(p))
            if abs(v) > 1e-12 and (v > 0) != (s > 0):
                sign_bad.append((p, d, v))
    fd_err = max(r[7] for r in rows)
    corner = rates.goodness_criterion(1.0, 0.0)
    implied = [r[:2] for r in rows if r[2] and not r[4]]

    star = rates.p_star_zero_eps()
    flip = rates.locate_flip(0.0, width=float(P["flip_width"]))
    flip_err = abs(flip - float(star))
    pstar = Table("p_star", ("eps", "p_star_exact", "p_star", "flip", "abs_error"))
    pstar.add(0, f"{star.numerator}/{star.denominator}", float(star), flip, flip_err)

    claim = "crossover sign at zero drift"
    checks = [
        Check(
            "crossover derivative sign positive iff p < 4/5",
            not sign_bad,
            f"{len(rows)} grid points x {len(deltas)} deltas, {len(sign_bad)} disagreements",
            claim,
            1,
        ),
        Check(
            "finite-difference derivative matches closed form",
            fd_err <= tol,
            f"max error {fd_err:.3g} (tolerance {tol:g})",
            claim,
            1,
        ),
        Check("criterion holds at (p, eps) = (1, 0)", corner.holds, f"margin {corner.margin}", "goodness region", 1),
        Check(
            "criterion region lies inside the drift condition",
            not implied,
            f"{len(implied)} points hold without drift > 2/3",
            "goodness region",
            1,
        ),
        Check(
            "criterion flip at eps = 0 matches 1/(1 + 5^5 12^-6)",
            flip_err <= float(P["flip_tol"]),
            f"flip {flip:.15g}, closed form {float(star):.15g}, error {flip_err:.3g}",
            "zero-eps threshold",
            2,
        ),
    ]
    return [grid, pstar], checks


# -- E2 oracle equivalence ---------------------------------------------------


def _e2_item(args):
    p, e, mode, n_max = args
    dist = _rdist(p, e) if mode == "rational" else _fdist(p, e)
    table = conditional_table(n_max, dist, shorter=True)
    out = []
    for n in range(1, n_max + 1):
        oracle = brute_force_table(n, dist)
        mism = 0
        err = 0.0
        norm_err = 0.0
        total = dist.zero
        for rec, (b, w) in oracle.items():
            got = table.get(rec)
            total += b + w
            if got is None:
                mism += 1
                continue
            want = b / (b + w)
            if mode == "rational":
                mism += got.p_black != want
            diff = abs(float(got.p_black) - float(want))
            err = max(err, diff)
            # log normalizers are floats in either mode
            lw = math.log(float(b + w))
            norm_err = max(norm_err, abs(got.log_normalizer - lw))
        extra = sum(1 for r in table if len(r) == n and r not in oracle)
        mass_err = float(abs(total - 1))
        out.append((p, e, mode, n, len(oracle), mism + extra, err, norm_err, mass_err))
    return out


def _e2_biased(args):
    rec, = args
    dist = StepDistribution(Fraction(1), Fraction(0))
    return rec, conditional_color_at_origin(rec, dist).p_black


def run_oracle_equivalence(P: dict, seed: int) -> tuple[list, list]:
    n_max = int(P["n_max"])
    grid = _grid(P["grid"])
    t0 = time.perf_counter()
    items = [(p, e, mode, n_max) for p, e in grid for mode in P["modes"]]
    rows = [r for chunk in parallel_map(_e2_item, items) for r in chunk]
    t_eq = time.perf_counter() - t0
    eq = Table(
        "oracle_equivalence",
        ("p", "eps", "mode", "n", "records", "mismatches", "max_abs_error", "max_log_normalizer_error", "mass_error"),
        key=("p", "eps", "mode", "n"),
    )
    for r in rows:
        eq.add(*r)
    tol = float(P["float_tol"])
    rational_bad = [r for r in rows if r[2] == "rational" and (r[5] or r[8])]
    float_bad = [r for r in rows if r[2] == "float" and (r[5] or r[6] > tol or r[8] > tol)]
    norm_bad = [r for r in rows if r[7] > 1e-9]

    rng = random.Random(seed)
    recs = [_word(rng, rng.randint(1, int(P["biased_n_max"]))) for _ in range(int(P["biased_records"]))]
    t0 = time.perf_counter()
    biased = parallel_map(_e2_biased, [(r,) for r in recs])
    bt = Table("fully_biased", ("index", "n", "record", "p_black", "exact_half"), key=("index",))
    for i, (r, pb) in enumerate(biased):
        bt.add(i, len(r), r, pb, pb == Fraction(1, 2))
    one = Table("single_symbol", ("p", "eps", "mode", "p_black", "expected", "abs_error"), key=("p", "eps", "mode"))
    one_bad = []
    for p, e in grid:
        want = e + (1 - e) / 2
        for mode in P["modes"]:
            dist = _rdist(p, e) if mode == "rational" else _fdist(p, e)
            got = conditional_color_at_origin("B", dist).p_black
            err = abs(float(got) - float(want))
            ok = got == want if mode == "rational" else err <= 1e-12
            one.add(p, e, mode, got, want, err)
            if not ok:
                one_bad.append((p, e, mode))
    t_bias = time.perf_counter() - t0

    claim = "filter equals the direct sum over paths and colorings"
    checks = [
        Check(
            "filter equals oracle exactly in rational mode",
            not rational_bad,
            f"n <= {n_max}, {len(grid)} (p, eps) points, {len(rational_bad)} bad rows, {t_eq:.1f} s",
            claim,
            3,
        ),
        Check(
            f"filter equals oracle within {tol:g} in float mode",
            not float_bad,
            f"max error {max((r[6] for r in rows if r[2] == 'float'), default=0):.3g}",
            claim,
            3,
        ),
        Check("log normalizers agree", not norm_bad, f"{len(norm_bad)} rows off by more than 1e-9", claim, 3),
        Check(
            "posterior is exactly 1/2 at p = 1, eps = 0",
            all(pb == Fraction(1, 2) for _, pb in biased),
            f"{len(biased)} records of length <= {P['biased_n_max']}, {t_bias:.1f} s",
            "fully biased walk sees an i.i.d. record",
            4,
        ),
        Check(
            "single-symbol posterior equals eps + (1 - eps)/2",
            not one_bad,
            f"{len(one_bad)} failures",
            "single-symbol identity",
            4,
        ),
    ]
    return [eq, bt, one], checks


# -- E3 cut lemmas -----------------------------------------------------------


def _cond_table(res, k: int, kind: str, dist):
    # P(S_k = x | k in CT, record) for every x, in one pass
    den = dist.zero
    num: dict = {}
    for pos, _, w in res.leaves:
        if k in cut_times(pos, kind):
            den += w
            num[pos[k]] = num.get(pos[k], dist.zero) + w
    if den == 0:
        return None
    return {x: v / den for x, v in num.items()}


def _e3_instance(args):
    idx, p, e, y, ybar, k = args
    dist = _rdist(p, e)
    r1, r2 = enumerate_compatible(y, dist), enumerate_compatible(ybar, dist)
    if not r1.leaves or not r2.leaves:
        return None
    out = {}
    for kind in CUT_KINDS:
        a, b = _cond_table(r1, k, kind, dist), _cond_table(r2, k, kind, dist)
        if a is None or b is None:
            out[kind] = None
            continue
        xs = sorted(set(a) | set(b))
        gap = max(abs(a.get(x, 0) - b.get(x, 0)) for x in xs)
        out[kind] = (len(xs), gap == 0, float(gap))
    if out["right"] is None:
        return None
    return (idx, p, e, y, ybar, k, out)


def _e3_candidates(rng: random.Random, grid, n_max: int):
    idx = 0
    while True:
        p, e = grid[idx % len(grid)]
        n = rng.randint(2, n_max)
        k = rng.randint(0, n - 1)
        y = _word(rng, n)
        ybar = y[:k] + _word(rng, n - k)
        yield (idx, p, e, y, ybar, k)
        idx += 1


def _e3_easy(args):
    m, n, e, kind = args
    rep = audit_easy_lemma(m, n, _rdist("1/2", e), kind)
    return (m, n, e, kind, rep.paths_checked, rep.passed, "" if rep.passed else str(rep.counterexample))


def _e3_f(args):
    m, n, p, e, kind = args
    return (m, n, p, e, kind, float(restricted_f(m, n, "all", _fdist(p, e), kind)))


def run_cut_lemmas(P: dict, seed: int) -> tuple[list, list]:
    grid = _grid(P["grid"])
    rng = random.Random(seed)
    t0 = time.perf_counter()
    found, tried = _collect(_e3_candidates(rng, grid, int(P["n_max"])), _e3_instance, int(P["instances"]))
    t_ind = time.perf_counter() - t0
    ind = Table(
        "cut_independence",
        ("instance", "p", "eps", "n", "k", "y", "ybar", "kind", "support", "equal", "max_gap"),
        key=("instance", "kind"),
    )
    bad = {kind: 0 for kind in CUT_KINDS}
    seen = {kind: 0 for kind in CUT_KINDS}
    for idx, p, e, y, ybar, k, out in found:
        for kind in CUT_KINDS:
            if out[kind] is None:
                ind.add(idx, p, e, len(y), k, y, ybar, kind, 0, None, None)
                continue
            size, equal, gap = out[kind]
            seen[kind] += 1
            bad[kind] += not equal
            ind.add(idx, p, e, len(y), k, y, ybar, kind, size, equal, gap)

    t0 = time.perf_counter()
    m = int(P["easy_m"])
    easy_rows = parallel_map(_e3_easy, [(m, n, _frac(e), kind) for n in P["easy_n"] for e in P["easy_eps"] for kind in CUT_KINDS])
    t_easy = time.perf_counter() - t0
    easy = Table("easy_lemma", ("m", "n", "eps", "kind", "paths", "passed", "counterexample"), key=("m", "n", "eps", "kind"))
    for r in easy_rows:
        easy.add(*r)

    f_items = [(m_, n_, p, e, kind) for m_, n_ in P["f_sizes"] for p, e in grid for kind in CUT_KINDS]
    f_tab = Table("restricted_f", ("m", "n", "p", "eps", "kind", "f"), key=("m", "n", "p", "eps", "kind"))
    for r in parallel_map(_e3_f, f_items):
        f_tab.add(*r)

    checks = [
        Check(
            "conditional position at a cut time ignores the record beyond it",
            len(found) == int(P["instances"]) and bad["right"] == 0,
            f"{len(found)} instances ({tried} drawn), {bad['right']} unequal, {t_ind:.1f} s",
            "independence across a cut time",
            5,
        ),
        Check(
            "same equality with the literal cut-time definition",
            bad["definition"] == 0,
            f"{bad['definition']} of {seen['definition']} instances unequal",
            "independence across a cut time",
            5,
            required=False,
        ),
        Check(
            "few early cut times rule out reaching 2m/3 from time m on",
            all(r[5] for r in easy_rows),
            f"{len(easy_rows)} exhaustive audits, {sum(r[4] for r in easy_rows)} paths, {t_easy:.1f} s",
            "few cut times force low drift",
            6,
        ),
    ]
    return [ind, easy, f_tab], checks


# -- E4 delta chain ----------------------------------------------------------


def _e4_instance(args):
    idx, p, e, pre, e1, e2 = args
    try:
        r = audit_delta_chain(pre, e1, e2, _rdist(p, e))
    except ImpossibleRecord:
        return None
    return (idx, p, e, r.m, r.n, pre, e1, e2, float(r.f_tilde), len(r.A), float(r.delta), float(r.bound),
            r.applicable, r.size_ok, r.bound_ok)


def _e4_candidates(rng: random.Random, grid, ms, n_max: int, start: int = 0):
    idx = start
    while True:
        p, e = grid[idx % len(grid)]
        m = rng.choice(ms)
        n = rng.randint(m, n_max)
        yield (idx, p, e, _word(rng, m - 1), _word(rng, n - m + 1), _word(rng, n - m + 1))
        idx += 1


def run_delta_chain(P: dict, seed: int) -> tuple[list, list]:
    grid = _grid(P["grid"])
    ms = [int(m) for m in P["m"]]
    rng = random.Random(seed)
    target = int(P["instances"])

    t0 = time.perf_counter()
    cands = _e4_candidates(rng, grid, ms, int(P["n_max"]))
    found, tried = _collect(cands, _e4_worker, target)
    elapsed = time.perf_counter() - t0
    cols = ("instance", "p", "eps", "m", "n", "prefix", "ext1", "ext2", "f_tilde", "A_size", "delta", "bound",
            "applicable", "size_ok", "bound_ok")
    tab = Table("delta_chain", cols, key=("instance",))
    for r in found:
        tab.add(*r)

    # applicability on the reference grid, reported
    ref = Table("delta_chain_reference", ("p", "eps", "candidates", "applicable", "failures"), key=("p", "eps"))
    ref_fail = 0
    ref_rng = random.Random(seed + 1)
    per = int(P["reference_instances"])
    for p, e in _grid(P["reference_grid"]):
        cands = _e4_candidates(ref_rng, [(p, e)], ms, int(P["n_max"]))
        rows = [r for r in parallel_map(_e4_instance, [next(cands) for _ in range(per)]) if r is not None]
        app = [r for r in rows if r[12]]
        fails = sum(1 for r in app if not (r[13] and r[14]))
        ref_fail += fails
        ref.add(p, e, len(rows), len(app), fails)

    ok_rows = [r for r in found if r[13] and r[14]]
    checks = [
        Check(
            "applicable instances satisfy |A| >= m/2 and |Delta| <= 2 f (m+1)",
            len(found) == target and len(ok_rows) == target,
            f"{len(found)} applicable of {tried} drawn, {target - len(ok_rows)} failures, {elapsed:.1f} s",
            "origin-color gap bounded through cut times",
            7,
        ),
        Check(
            "reference-grid instances satisfy the same bound",
            ref_fail == 0,
            f"{ref_fail} failures among applicable reference instances",
            "origin-color gap bounded through cut times",
            7,
            required=False,
        ),
    ]
    return [tab, ref], checks


def _e4_worker(args):
    r = _e4_instance(args)
    return r if r is not None and r[12] else None


# -- E5 bad probe ------------------------------------------------------------


def _e5_item(args):
    p, L, prefix = args
    dist = _rdist(p, 0)
    m = len(prefix) + 1
    bar, tilde, g = probes.bad_probe_pair(m, L)
    piv = g.pivot_times
    r = enumerate_compatible(prefix + bar.symbols, dist)
    rt = enumerate_compatible(prefix + tilde.symbols, dist)
    prob = r.probability
    lt = [last_turn(piv, l) for l in range(L + 1)]
    nt = no_turn(piv)
    parts = [prob(nt & END_UP), prob(nt & END_DOWN)]
    for ev in lt:
        parts += [prob(ev & END_UP), prob(ev & END_DOWN)]
    partition = sum(parts)
    ratio = (1 - dist.p) / dist.p
    ineq = []
    for l in range(L + 1):
        up, down = prob(lt[l] & END_UP), prob(lt[l] & END_DOWN)
        k0 = down <= ratio ** g.v(l) * up
        if l < L:
            nxt = prob(lt[l + 1] & END_UP)
            rhs1 = (1 / ratio) ** (g.u(l + 1) + 5 * m) * Fraction(1, 2) ** (g.t(l + 1) - g.t(l)) * nxt
            k1 = up <= rhs1
        else:
            rhs1, k1 = None, None
        ineq.append((p, L, l, float(up), float(down), g.v(l), k0, None if rhs1 is None else float(rhs1), k1))
    q_bar = r.given(lt[L] & END_UP)
    q_tilde = rt.given(last_turn(piv[:-1], L - 1) & END_UP)
    delta = r.probability(None, Color.B) - rt.probability(None, Color.B)
    walks = len({tuple(pos[t + 1] - pos[t] for t in range(m, len(pos) - 1)) for pos in r.paths()})
    row = (p, L, m, len(bar) + m - 1, partition, float(partition), q_bar, q_tilde, float(delta), walks)
    return row, ineq, delta


def run_bad_probe(P: dict, seed: int) -> tuple[list, list]:
    m = int(P["m"])
    prefix = P["prefix"] if P["prefix"] is not None else "B" * (m - 1)
    if len(prefix) != m - 1:
        raise ValueError("prefix must have length m - 1")
    ps = [_frac(p) for p in P["p"]]
    Ls = sorted(int(L) for L in P["L"])
    t0 = time.perf_counter()
    res = parallel_map(_e5_item, [(p, L, prefix) for p in ps for L in Ls])
    elapsed = time.perf_counter() - t0
    main = Table(
        "bad_probe",
        ("p", "L", "m", "n", "partition_exact", "partition", "q_bar", "q_tilde", "delta", "walks_after_m"),
        key=("p", "L"),
    )
    ineq = Table(
        "bad_probe_inequalities",
        ("p", "L", "l", "P_LT_EU", "P_LT_ED", "v", "ineq_up_down", "bound_next", "ineq_next"),
        key=("p", "L", "l"),
    )
    deltas: dict = {}
    for row, rows, d in res:
        main.add(*(str(v) if isinstance(v, Fraction) else v for v in row))
        for r in rows:
            ineq.add(*r)
        deltas.setdefault(row[0], {})[row[1]] = d

    part_err = max(abs(float(r[0][4]) - 1) for r in res)
    k0 = all(r[6] for _, rows, _ in res for r in rows)
    k1 = all(r[8] for _, rows, _ in res for r in rows if r[8] is not None)
    sym_bad = [
        (row[0], row[1])
        for row, _, _ in res
        if not (row[6] in (row[0], 1 - row[0]) and row[7] == 1 - row[6])
    ]
    walks_bad = [(row[0], row[1]) for row, _, _ in res if row[9] != 2 * (row[1] + 2)]
    mono = {}
    for p, byL in deltas.items():
        vals = [abs(byL[L]) for L in Ls]
        mono[p] = all(a < b for a, b in zip(vals, vals[1:]))
    frozen_bad = []
    if m == 1 and 3 in Ls:
        for p in ps:
            if p in FROZEN_DELTA_L3 and abs(float(deltas[p][3]) - FROZEN_DELTA_L3[p]) > 1e-12:
                frozen_bad.append(p)

    trend = ", ".join(
        f"p={p}: " + " ".join(f"{abs(float(deltas[p][L])):.6g}" for L in Ls) for p in ps
    )
    claim = "bad configurations for p < 4/5"
    checks = [
        Check("event partition sums to 1", part_err <= 1e-10, f"max error {part_err:.3g}", claim, 8),
        Check("end-down on LT_l is dominated by end-up", k0, "all p, L, l", claim, 8),
        Check("LT_l end-up is dominated by LT_(l+1) end-up", k1, "all p, L, l < L", claim, 8),
        Check(
            "posterior on LT_L, EU lies in {p, 1-p} and swaps between the two probes",
            not sym_bad,
            f"{len(sym_bad)} failures, {elapsed:.1f} s",
            claim,
            8,
        ),
        Check(
            "two walks per last-turn class after time m",
            not walks_bad,
            f"expected 2(L+2) walks, {len(walks_bad)} mismatches",
            claim,
            8,
        ),
        Check("|Delta(L)| strictly increasing in L", all(mono.values()), trend, claim, 8),
        Check(
            "Delta at L = 3 equals the pre-registered value",
            not frozen_bad,
            ", ".join(f"p={p}: {FROZEN_DELTA_L3[p]!r}" for p in ps if p in FROZEN_DELTA_L3),
            claim,
            8,
        ),
    ]
    return [main, ineq], checks


# -- E6 black run ------------------------------------------------------------


def run_black_run(P: dict, seed: int) -> tuple[list, list]:
    n_max = int(P["n_max"])
    t0 = time.perf_counter()
    trend = Table("black_run", ("n", "p_black", "ratio", "log_N", "log_D", "widths", "dn_bound_ok"), key=("n",))
    prev = None
    mono = True
    dn_ok = True
    last = None
    for b in confinement.black_run_trend(n_max, every=2):
        if b.n % 2:
            continue
        trend.add(b.n, b.p_black, b.ratio, b.log_N, b.log_D, b.widths, b.dn_bound_ok)
        if prev is not None and b.p_black < prev:
            mono = False
        prev = b.p_black
        dn_ok &= b.dn_bound_ok
        last = b
    t_trend = time.perf_counter() - t0

    eng = Table("black_run_engine", ("n", "formula", "engine", "abs_error"), key=("n",))
    eng_err = 0.0
    dist = StepDistribution(0.5, 0.0)
    for n in range(1, int(P["engine_n_max"]) + 1):
        f = confinement.black_run_conditional(n)
        e = float(conditional_color_at_origin("B" * n, dist).p_white)
        eng.add(n, f, e, abs(f - e))
        eng_err = max(eng_err, abs(f - e))

    spit = Table("spitzer", ("i", "n", "parity", "base", "constant", "ratio"), key=("i", "n"))
    for i in P["spitzer_i"]:
        for n in P["spitzer_n"]:
            a = confinement.spitzer_asymptote(int(i), "even" if int(n) % 2 == 0 else "odd")
            spit.add(int(i), int(n), "even" if int(n) % 2 == 0 else "odd", a.base, a.constant,
                     confinement.spitzer_ratio(int(n), int(i)))
    s_i, s_n = int(P["spitzer_check"][0]), int(P["spitzer_check"][1])
    s_ratio = confinement.spitzer_ratio(s_n, s_i)

    search = Table("confinement_ratio", ("n", "p_n_4_1", "p_n_3_1", "ratio"), key=("n",))
    hit = None
    for n in range(2, int(P["ratio_search_max"]) + 1, 2):
        a = confinement.confinement_probability(n, 4, 1, exact=True)
        b = confinement.confinement_probability(n, 3, 1, exact=True)
        r = a / b
        search.add(n, float(a), float(b), float(r))
        if r > int(P["ratio_threshold"]):
            hit = n
            break

    claim = "posterior of a black origin given an all-black record tends to 1"
    checks = [
        Check("N/D formula equals the engine on B^n", eng_err <= 1e-9, f"n <= {P['engine_n_max']}, max error {eng_err:.3g}", claim, 9),
        Check("P(C_0 = B | B^n) nondecreasing over even n", mono, f"n in [2, {n_max}], {t_trend:.1f} s", claim, 9),
        Check(
            "final value exceeds the frozen threshold",
            last is not None and last.p_black > BLACK_RUN_THRESHOLD,
            f"{last.p_black!r} at n = {last.n} vs {BLACK_RUN_THRESHOLD}" if last else "no rows",
            claim,
            9,
        ),
        Check("denominator bound D(n) >= sum w 2^-(w+2) u_w(0)", dn_ok, "all n", claim, 9),
        Check(
            f"Spitzer ratio at i = {s_i}, n = {s_n}",
            abs(s_ratio - 1) <= 1e-3,
            f"ratio {s_ratio!r}",
            "confinement asymptotics",
            9,
        ),
        Check(
            "first even n with p(n,4,1)/p(n,3,1) above the threshold",
            hit == CONFINEMENT_RATIO_N,
            f"n = {hit} (frozen {CONFINEMENT_RATIO_N})",
            "confinement asymptotics",
            9,
        ),
    ]
    return [trend, eng, spit, search], checks


# -- E7 good configuration ---------------------------------------------------


def _e7_item(args):
    L, idx, ext, prefix, pivots = args
    dist = StepDistribution(Fraction(1, 2), Fraction(0))
    r = enumerate_compatible(prefix + ext, dist)
    if not r.leaves:
        return None
    nt, aot = no_turn(pivots), at_least_one_turn(pivots)
    p_nt, p_aot = r.probability(nt), r.probability(aot)
    pb = r.probability(None, Color.B)
    half = r.given(aot) == Fraction(1, 2) if p_aot > 0 else None
    return (L, idx, ext, float(p_nt), float(p_aot), float(p_nt / p_aot) if p_aot else math.inf,
            1 / (L + 1), p_nt * (L + 1) <= p_aot, float(pb), float(abs(pb - Fraction(1, 2))),
            abs(pb - Fraction(1, 2)) <= Fraction(1, 2 * (L + 1)), half)


def _e7_candidates(rng, L, ext_max, prefix, pivots):
    idx = 0
    while True:
        yield (L, idx, _word(rng, rng.randint(1, ext_max)), prefix, pivots)
        idx += 1


def run_good_config(P: dict, seed: int) -> tuple[list, list]:
    cols = ("L", "instance", "extension", "P_NT", "P_AOT", "nt_over_aot", "bound", "nt_ok", "p_black", "abs_gap",
            "gap_ok", "half_on_aot")
    main = Table("good_config", cols, key=("L", "instance"))
    variant = Table("good_config_no_leading_bb", cols, key=("L", "instance"))
    rng = random.Random(seed)
    t0 = time.perf_counter()
    rows_main = []
    for L in sorted(int(x) for x in P["L"]):
        pre = probes.good_config_prefix(L).symbols
        piv = probes.good_pivot_times(L)
        found, _ = _collect(_e7_candidates(rng, L, int(P["ext_max"]), pre, piv), _e7_item, int(P["extensions"]))
        rows_main += found
        # same structure without the two leading B's, pivots shifted by 2
        found_v, _ = _collect(
            _e7_candidates(rng, L, int(P["ext_max"]), pre[2:], tuple(t - 2 for t in piv)), _e7_item, int(P["extensions"])
        )
        for r in found_v:
            variant.add(*r)
    for r in rows_main:
        main.add(*r)
    elapsed = time.perf_counter() - t0
    claim = "no-turn paths are rare given a good configuration"
    n_exp = int(P["extensions"]) * len(P["L"])
    worst = max((r[5] * (r[0] + 1) for r in rows_main), default=math.nan)
    checks = [
        Check(
            "P(NT | .) <= P(AOT | .)/(L+1)",
            len(rows_main) == n_exp and all(r[7] for r in rows_main),
            f"{len(rows_main)} instances, worst (L+1) NT/AOT = {worst:.3g}, {elapsed:.1f} s",
            claim,
            10,
        ),
        Check(
            "|P(C_0 = B | .) - 1/2| <= 1/(2(L+1))",
            len(rows_main) == n_exp and all(r[10] for r in rows_main),
            f"max gap {max((r[9] for r in rows_main), default=math.nan):.3g}",
            claim,
            10,
        ),
        Check("P(C_0 = B | AOT, .) is exactly 1/2", all(r[11] for r in rows_main), "exact rational", claim, 10),
        Check(
            "same bounds without the leading BB",
            all(r[7] and r[10] for r in variant.rows),
            f"{sum(1 for r in variant.rows if not (r[7] and r[10]))} of {len(variant.rows)} violate",
            claim,
            10,
            required=False,
        ),
    ]
    return [main, variant], checks


# -- E8 sparse probe ---------------------------------------------------------


def _e8_item(args):
    p, e, prefix, k, K = args
    dist = _fdist(p, e)
    b = probes.sparse_probe(k, K, Color.B).symbols
    w = probes.sparse_probe(k, K, Color.W).symbols
    m = len(prefix) + 1
    r = enumerate_compatible(prefix + b, dist)
    ev = probes.visit_event(m, k * K, prefix + b)
    pe, pne = r.probability(ev), r.probability(~ev)
    pbe, pbne = r.probability(ev, Color.B), r.probability(~ev, Color.B)
    fb = conditional_color_at_origin(prefix + b, dist).p_black
    fw = conditional_color_at_origin(prefix + w, dist).p_black
    target = (1 - float(_frac(e))) * (1 - float(_frac(p)))
    return (p, e, prefix, k, K, len(prefix + b), fb, fw, fb - fw, target, fb - fw >= target, pe,
            abs(pe + pne - 1), abs(pbe + pbne - fb))


def run_sparse_probe(P: dict, seed: int) -> tuple[list, list]:
    items = [(p, e, pre, int(k), int(K)) for p, e in _grid(P["grid"]) for pre in P["prefixes"] for k in P["k"]
             for K in P["K"]]
    t0 = time.perf_counter()
    rows = parallel_map(_e8_item, items)
    elapsed = time.perf_counter() - t0
    tab = Table(
        "sparse_probe",
        ("p", "eps", "prefix", "k", "K", "n", "p_black_B", "p_black_W", "gap", "target", "gap_above_target",
         "P_visit", "partition_error", "joint_partition_error"),
        key=("p", "eps", "prefix", "k", "K"),
    )
    for r in rows:
        tab.add(*r)
    again = _e8_item(items[0]) if items else None
    part = max((max(r[12], r[13]) for r in rows), default=0.0)
    above = sum(1 for r in rows if r[10])
    claim = "sparse probes (expected behavior, not proved)"
    checks = [
        Check("rerun reproduces the first row bit for bit", again == rows[0] if rows else True, "", claim, 13),
        Check("visit event partitions the record's paths", part <= 1e-10, f"max error {part:.3g}, {elapsed:.1f} s", claim, 13),
        Check(
            "gap at or above (1-eps)(1-p)",
            above == len(rows),
            f"{above} of {len(rows)} rows",
            claim,
            13,
            required=False,
        ),
    ]
    return [tab], checks


# -- E9 Cramer ---------------------------------------------------------------


def run_cramer(P: dict, seed: int) -> tuple[list, list]:
    m = int(P["m"])
    tol = float(P["tol"])
    tab = Table(
        "cramer",
        ("p", "eps", "m", "k", "point_mass", "empirical_rate", "rate", "relative_error", "prefactor_corrected",
         "corrected_relative_error"),
        key=("p", "eps", "m"),
    )
    t0 = time.perf_counter()
    res = []
    for p in P["p"]:
        c = rates.cramer_finite_size(m, float(p), float(P["eps"]))
        corr = abs(c.prefactor_corrected - c.rate) / c.rate
        tab.add(float(p), float(P["eps"]), m, 2 * m // 3, c.point_mass, c.empirical_rate, c.rate, c.relative_error,
                c.prefactor_corrected, corr)
        res.append((c, corr))
    elapsed = time.perf_counter() - t0
    claim = "exponential decay rate of P(S_m = 2m/3)"
    checks = [
        Check(
            f"|-(1/m) log P(S_m = 2m/3) - I| <= {tol:g} I",
            all(c.relative_error <= tol for c, _ in res),
            "; ".join(f"p={c.p}: {c.empirical_rate:.6f} vs {c.rate:.6f} ({c.relative_error:.1%})" for c, _ in res)
            + f", {elapsed:.2f} s",
            claim,
            11,
        ),
        Check(
            "same after removing the local-limit prefactor",
            all(corr <= tol for _, corr in res),
            "; ".join(f"p={c.p}: {c.prefactor_corrected:.6f} ({corr:.2%})" for c, corr in res),
            claim,
            11,
            required=False,
        ),
    ]
    return [tab], checks


# -- E10 MC calibration ------------------------------------------------------


def _e10_item(args):
    trial, p, e, rec, particles, seed = args
    dist = _fdist(p, e)
    exact = float(conditional_color_at_origin(rec, dist).p_black)
    est = sis_conditional(rec, dist, particles=particles, seed=seed)
    z = abs(est.mean - exact) / est.stderr if est.stderr > 0 else (0.0 if est.mean == exact else math.inf)
    return (trial, p, e, rec, exact, est.mean, est.stderr, z, est.ess, est.resamples, seed)


def _e10_normalizer(args):
    rec, p, e, particles, seeds = args
    dist = _fdist(p, e)
    want = conditional_color_at_origin(rec, dist).normalizer
    vals = [math.exp(sis_conditional(rec, dist, particles, s).log_normalizer) for s in range(seeds)]
    mean = sum(vals) / len(vals)
    sd = math.sqrt(sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)) / math.sqrt(len(vals))
    return (rec, p, e, seeds, want, mean, sd, abs(mean - want) / sd if sd > 0 else 0.0)


def run_mc_calibration(P: dict, seed: int) -> tuple[list, list]:
    grid = _grid(P["grid"])
    rng = random.Random(seed)
    n = int(P["n"])
    items = []
    for t in range(int(P["trials"])):
        p, e = grid[t % len(grid)]
        items.append((t, p, e, _word(rng, n), int(P["particles"]), seed * 1_000_003 + t))
    t0 = time.perf_counter()
    rows = parallel_map(_e10_item, items)
    elapsed = time.perf_counter() - t0
    tab = Table(
        "mc_calibration",
        ("trial", "p", "eps", "record", "exact", "mean", "stderr", "z", "ess", "resamples", "seed"),
        key=("trial",),
    )
    for r in rows:
        tab.add(*r)
    zmax = float(P["z_max"])
    inside = sum(1 for r in rows if r[7] <= zmax)
    frac = inside / len(rows) if rows else 0.0

    norm_items = [(rec, p, e, int(P["particles"]), int(P["normalizer_seeds"])) for rec, (p, e) in
                  zip(P["normalizer_records"], grid)]
    nrows = parallel_map(_e10_normalizer, norm_items)
    ntab = Table("mc_normalizer", ("record", "p", "eps", "seeds", "exact", "mean", "stderr", "z"), key=("record", "p", "eps"))
    for r in nrows:
        ntab.add(*r)
    checks = [
        Check(
            f"estimates within {zmax:g} stderr of exact",
            frac >= float(P["min_fraction"]),
            f"{inside}/{len(rows)} trials, max z {max((r[7] for r in rows), default=0):.3g}, {elapsed:.1f} s",
            "filter identity behind the particle weights",
            12,
        ),
        Check(
            "mean normalizer estimate matches exp(log normalizer)",
            all(r[7] <= 4 for r in nrows),
            "; ".join(f"{r[0]}: z={r[7]:.2f}" for r in nrows),
            "filter identity behind the particle weights",
            12,
            required=False,
        ),
    ]
    return [tab, ntab], checks


# -- catalog -----------------------------------------------------------------

_SPEC_GRID = [["1/2", "0"], ["7/10", "0"], ["1", "0"], ["1/2", "3/10"], ["7/10", "3/10"], ["1", "3/10"]]

CATALOG: dict[str, Entry] = {
    e.id: e
    for e in [
        Entry("E1", "phase-diagram", run_phase_diagram,
              {"p_points": 200, "eps_points": 100, "deltas": ["0", "1/4", "1/2", "3/4", "19/20"],
               "fd_step": 1e-5, "fd_tol": 1e-8, "flip_width": 1e-10, "flip_tol": 1e-9},
              (1, 2), "crossover sign and goodness criterion over (p, eps)"),
        Entry("E2", "oracle-equivalence", run_oracle_equivalence,
              {"n_max": 10, "grid": _SPEC_GRID, "modes": ["rational", "float"], "float_tol": 1e-12,
               "biased_records": 100, "biased_n_max": 30},
              (3, 4), "forward filter against the direct sum"),
        Entry("E3", "cut-lemmas", run_cut_lemmas,
              {"instances": 500, "n_max": 12, "grid": [["1/2", "0"], ["7/10", "0"], ["1/2", "3/10"], ["7/10", "3/10"]],
               "easy_m": 6, "easy_n": [8, 10, 12], "easy_eps": ["0", "3/10"],
               "f_sizes": [[2, 4], [2, 6], [4, 6], [4, 8]]},
              (5, 6), "cut-time independence, the drift lemma and restricted f"),
        Entry("E4", "delta-chain", run_delta_chain,
              {"instances": 200, "m": [4, 6], "n_max": 12, "grid": [["7/10", "0"], ["9/10", "0"], ["9/10", "3/10"]],
               "reference_grid": [["1/2", "0"], ["7/10", "0"], ["1/2", "3/10"], ["7/10", "3/10"]],
               "reference_instances": 10},
              (7,), "per-instance cut-time bound on the origin-color gap"),
        Entry("E5", "bad-probe", run_bad_probe,
              {"m": 1, "prefix": None, "p": ["3/5", "7/10"], "L": [1, 2, 3]},
              (8,), "probe records with one pivot more or less"),
        Entry("E6", "black-run", run_black_run,
              {"n_max": 10000, "engine_n_max": 20, "spitzer_i": [2, 3, 4, 5], "spitzer_n": [100, 101, 1000, 2000],
               "spitzer_check": [4, 2000], "ratio_threshold": 1000, "ratio_search_max": 400},
              (9,), "all-black record via interval confinement"),
        Entry("E7", "good-config", run_good_config,
              {"L": [1, 2, 3], "extensions": 20, "ext_max": 12},
              (10,), "good configuration prefix at p = 1/2"),
        Entry("E8", "sparse-probe", run_sparse_probe,
              {"grid": [["3/5", "1/5"], ["1/2", "3/10"]], "prefixes": ["", "B", "WB"], "k": [2, 3], "K": [1, 2, 3, 4]},
              (13,), "sparse probes, report only"),
        Entry("E9", "cramer-empirical", run_cramer,
              {"p": [0.9, 0.95], "eps": 0.0, "m": 60, "tol": 0.15},
              (11,), "rate against exact point masses"),
        Entry("E10", "mc-calibration", run_mc_calibration,
              {"trials": 200, "n": 12, "particles": 4096, "z_max": 4.0, "min_fraction": 0.99,
               "grid": [["1/2", "0"], ["7/10", "0"], ["1/2", "3/10"], ["7/10", "3/10"], ["1", "0"], ["1", "3/10"]],
               "normalizer_records": ["BB", "BWB", "BBWWB"], "normalizer_seeds": 50},
              (12,), "particle estimator against the exact engine"),
    ]
}

ALIASES = {e.name: e.id for e in CATALOG.values()}
ALIASES["black-run-trend"] = "E6"


def resolve(exp_id: str) -> Entry:
    key = ALIASES.get(exp_id, exp_id.upper())
    if key not in CATALOG:
        names = ", ".join(f"{e.id} ({e.name})" for e in CATALOG.values())
        raise KeyError(f"unknown experiment {exp_id!r}; known: {names}")
    return CATALOG[key]


def parameters(entry: Entry, overrides: Optional[dict] = None) -> dict:
    P = dict(entry.defaults)
    for k, v in (overrides or {}).items():
        if k not in P:
            raise ValueError(f"experiment {entry.id} has no parameter {k!r}; known: {sorted(P)}")
        P[k] = v
    return P


def run(spec: ExperimentSpec) -> ExperimentResult:
    entry = resolve(spec.id)
    P = parameters(entry, spec.parameters)
    seed = 0 if spec.seed is None else int(spec.seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    t0 = time.perf_counter()
    tables, checks = entry.run(P, seed)
    wall = time.perf_counter() - t0
    full = ExperimentSpec(entry.id, P, seed)
    return ExperimentResult(full, tables, checks, wall)


def write_result(result: ExperimentResult, out: Path, fmt: str = "csv") -> list[Path]:
    """Data tables (byte-identical across reruns) plus ``manifest.json``."""
    out = Path(out)
    files = write_tables(result.tables, out, fmt)
    spec = {"id": result.spec.id, "name": CATALOG[result.spec.id].name, "parameters": result.spec.parameters,
            "seed": result.spec.seed}
    write_manifest(out / "manifest.json", spec, [c.as_dict() for c in result.checks], result.wall_time, files)
    return files
