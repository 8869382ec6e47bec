"""Forward simulation and sequential importance sampling.

Randomness comes from counter-based Philox streams: the key is
``(seed, purpose)`` and the counter encodes the step, so the uniform used by
particle ``i`` at step ``t`` is the ``i``-th value of stream ``(seed, purpose, t)``
regardless of how many particles there are or how work is scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Color, ColorRecord, InducedColoring, StepDistribution, WalkPath
from .inference import RecordLike, _symbols

MAX_SEED = 2**64 - 1
_STEP, _RESAMPLE, _COLOR = 1, 2, 3
UNKNOWN = -1


class ParticleCollapse(RuntimeError):
    pass


def stream(seed: int, purpose: int, step: int) -> np.random.Generator:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError("seed must fit in 64 bits")
    return np.random.Generator(np.random.Philox(key=[seed, purpose], counter=[0, step, 0, 0]))


def _uniforms(seed: int, purpose: int, step: int, size: int) -> np.ndarray:
    return stream(seed, purpose, step).random(size)


def _step_table(dist: StepDistribution):
    d = dist.as_float() if dist.exact else dist
    steps = np.array([-1, 0, 1])
    probs = np.array([d.left, d.pause, d.right], dtype=float)
    return steps, probs


# -- simulation --------------------------------------------------------------


def simulate_batch(dist: StepDistribution, n: int, runs: int, seed: int):
    """``runs`` independent copies; returns ``(positions, records)`` with shapes
    ``(runs, n+1)`` and ``(runs, n)``, records coded 0 = B, 1 = W."""
    if n < 1:
        raise ValueError("need n >= 1")
    steps, probs = _step_table(dist)
    cum = np.cumsum(probs)
    pos = np.zeros((runs, n + 1), dtype=np.int64)
    colors = np.full((runs, 2 * n + 1), UNKNOWN, dtype=np.int8)
    rows = np.arange(runs)
    colors[:, n] = (_uniforms(seed, _COLOR, 0, runs) < 0.5).astype(np.int8)
    rec = np.zeros((runs, n), dtype=np.int8)
    for t in range(1, n + 1):
        u = _uniforms(seed, _STEP, t, runs)
        d = steps[np.minimum(np.searchsorted(cum, u, side="right"), 2)]
        pos[:, t] = pos[:, t - 1] + d
        idx = pos[:, t] + n
        fresh = colors[rows, idx] == UNKNOWN
        coin = (_uniforms(seed, _COLOR, t, runs) < 0.5).astype(np.int8)
        colors[rows[fresh], idx[fresh]] = coin[fresh]
        rec[:, t - 1] = colors[rows, idx]
    return pos, rec


def simulate(dist: StepDistribution, n: int, seed: int) -> tuple[WalkPath, InducedColoring, ColorRecord]:
    """One draw of (walk, colors of the visited sites, record ``Y_1^n``)."""
    pos, rec = simulate_batch(dist, n, 1, seed)
    path = WalkPath(tuple(int(x) for x in pos[0]))
    symbols = "".join("W" if c else "B" for c in rec[0])
    # origin color comes from the time-0 coin; other sites from the record
    c0 = int(_uniforms(seed, _COLOR, 0, 1)[0] < 0.5)
    coloring = {0: Color.W if c0 else Color.B}
    for site, c in zip(path.positions[1:], symbols):
        coloring[site] = Color(c)
    return path, InducedColoring.from_mapping(coloring), ColorRecord(symbols)


# -- sequential importance sampling ------------------------------------------


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    particles: int
    ess: float
    seed: int
    log_normalizer: float = math.nan
    resamples: int = 0


def _systematic(weights: np.ndarray, u: float) -> np.ndarray:
    n = len(weights)
    cum = np.cumsum(weights)
    cum[-1] = 1.0
    return np.searchsorted(cum, (u + np.arange(n)) / n, side="left")


def sis_conditional(record: RecordLike, dist: StepDistribution, particles: int = 4096, seed: int = 0) -> Estimate:
    """Particle estimate of ``P(Y_0 = B | Y_1^n = record)``.

    Each particle carries a position and the colors it has fixed.  Steps are
    proposed from the step law restricted to moves that agree with the next
    record symbol; the weight picks up ``Z * g`` where ``Z`` is the surviving
    step mass and ``g`` is 1/2 on a fresh site, 1 on a revisit.  The origin
    color is summed out: it counts as fresh until first revisited, and a
    particle that never revisits contributes 1/2.  Systematic resampling runs
    when the effective sample size drops below half the particle count.  The
    standard error groups particles by their time-0 ancestor.
    """
    sym = _symbols(record)
    n = len(sym)
    if n < 1:
        raise ValueError("record must have length >= 1")
    if particles < 1000:
        raise ValueError("use at least 1000 particles")
    steps, probs = _step_table(dist)
    N = particles
    rows = np.arange(N)
    pos = np.zeros(N, dtype=np.int64)
    colors = np.full((N, 2 * n + 1), UNKNOWN, dtype=np.int8)
    W = np.full(N, 1.0 / N)
    eve = np.arange(N)
    log_z = 0.0
    resamples = 0
    for t in range(1, n + 1):
        c = 1 if sym[t - 1] == "W" else 0
        seen = np.stack([colors[rows, pos + d + n] for d in steps], axis=1)
        alive = (seen == UNKNOWN) | (seen == c)
        q = probs[None, :] * alive
        Z = q.sum(axis=1)
        live = Z > 0
        u = _uniforms(seed, _STEP, t, N)
        cum = np.cumsum(q, axis=1)
        target = u * Z
        choice = np.minimum((cum <= target[:, None]).sum(axis=1), 2)
        # guard against landing on a zero-mass column through rounding
        bad = ~alive[rows, choice] & live
        if bad.any():
            choice[bad] = np.argmax(alive[bad] * (np.arange(3) + 1), axis=1)
        g = np.where(seen[rows, choice] == UNKNOWN, 0.5, 1.0)
        alpha = np.where(live, Z * g, 0.0)
        pos = pos + steps[choice]
        idx = pos + n
        fresh = colors[rows, idx] == UNKNOWN
        colors[rows[fresh & live], idx[fresh & live]] = c
        inc = float(np.dot(W, alpha))
        if inc <= 0:
            raise ParticleCollapse(f"all particles died at step {t}; increase the particle count")
        log_z += math.log(inc)
        W = W * alpha / inc
        ess = 1.0 / float(np.dot(W, W))
        if ess < N / 2 and t < n:
            a = _systematic(W, float(_uniforms(seed, _RESAMPLE, t, 1)[0]))
            pos, colors, eve = pos[a], colors[a], eve[a]
            W = np.full(N, 1.0 / N)
            resamples += 1
    origin = colors[:, n]
    h = np.where(origin == UNKNOWN, 0.5, (origin == 0).astype(float))
    mean = float(np.dot(W, h))
    resid = W * (h - mean)
    per_eve = np.bincount(eve, weights=resid, minlength=N)
    stderr = float(math.sqrt(np.dot(per_eve, per_eve)))
    ess = 1.0 / float(np.dot(W, W))
    return Estimate(min(max(mean, 0.0), 1.0), stderr, N, ess, seed, log_z, resamples)
