"""Interval confinement of simple random walk and the all-black record.

``p(n, i, j)`` is the probability that simple random walk started at 0 stays in
``[-j+1, i-1]`` at times ``0..n-1``.  It only depends on the width
``w = i + j - 1`` and the start index ``j - 1``, so one transfer-matrix pass
per width serves every ``(i, j)`` with that width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

RENORM_EVERY = 64
TAIL_TOL = 1e-12


class TruncationError(RuntimeError):
    pass


def _check_args(n: int, i: int, j: int):
    if n < 1 or i < 1 or j < 1:
        raise ValueError("need n >= 1, i >= 1, j >= 1")


def confinement_probability(n: int, i: int, j: int, exact: bool = False):
    """``p(n, i, j)`` by the transfer matrix over the ``i + j - 1`` allowed sites."""
    _check_args(n, i, j)
    w = i + j - 1
    if exact:
        # path counts over 2^(n-1)
        u = [0] * w
        u[j - 1] = 1
        for _ in range(n - 1):
            u = [(u[s - 1] if s > 0 else 0) + (u[s + 1] if s + 1 < w else 0) for s in range(w)]
        return Fraction(sum(u), 2 ** (n - 1))
    u = np.zeros(w)
    u[j - 1] = 1.0
    log_scale = 0.0
    for t in range(n - 1):
        u = _step(u)
        if (t + 1) % RENORM_EVERY == 0:
            top = u.max()
            if top == 0:
                return 0.0
            u /= top
            log_scale += math.log(top)
    total = u.sum()
    return 0.0 if total == 0 else math.exp(log_scale + math.log(total))


def _step(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    out[1:] += 0.5 * u[:-1]
    out[:-1] += 0.5 * u[1:]
    return out


def confinement_table(n: int, i_max: int, j_max: int) -> np.ndarray:
    """Array ``T[i-1, j-1] = p(n, i, j)`` for ``1 <= i <= i_max``, ``1 <= j <= j_max``."""
    out = np.zeros((i_max, j_max))
    for w in range(1, i_max + j_max):
        v = _survival_vector(n, w)
        for j in range(1, j_max + 1):
            i = w - j + 1
            if 1 <= i <= i_max:
                out[i - 1, j - 1] = v[j - 1]
    return out


def _survival_vector(n: int, w: int) -> np.ndarray:
    # v[s] = P(stay in w sites for n-1 steps | start at index s); P is symmetric
    v = np.ones(w)
    log_scale = 0.0
    for t in range(n - 1):
        v = _step(v)
        if (t + 1) % RENORM_EVERY == 0:
            top = v.max()
            if top == 0:
                return v
            v /= top
            log_scale += math.log(top)
    return v * math.exp(log_scale) if log_scale > -700 else v * 0.0


def spectral_confinement(n: int, i: int, j: int) -> float:
    """Same quantity from the sine eigenbasis of the killed walk (independent oracle)."""
    _check_args(n, i, j)
    w = i + j - 1
    x = j  # 1-based position inside the w sites
    k = np.arange(1, w + 1)
    y = np.arange(1, w + 1)
    theta = np.pi * k / (w + 1)
    sums = np.sin(np.outer(k, y) * np.pi / (w + 1)).sum(axis=1)
    terms = (2.0 / (w + 1)) * np.sin(theta * x) * np.cos(theta) ** (n - 1) * sums
    return float(max(terms.sum(), 0.0))


@dataclass(frozen=True)
class SpitzerAsymptote:
    base: float
    constant: float


def spitzer_asymptote(i: int, parity: str) -> SpitzerAsymptote:
    """``p(n, i, 1) ~ base^(n-1) * constant`` as ``n`` runs through the given parity."""
    if i < 2:
        raise ValueError("need i >= 2")
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    want = 1 if parity == "even" else 0
    s = sum(math.sin(math.pi * (j + 1) / (i + 1)) for j in range(i) if j % 2 == want)
    return SpitzerAsymptote(math.cos(math.pi / (i + 1)), 4 / (i + 1) * math.sin(math.pi / (i + 1)) * s)


def spitzer_ratio(n: int, i: int) -> float:
    """``p(n, i, 1) / (base^(n-1) constant)``, evaluated in log space."""
    a = spitzer_asymptote(i, "even" if n % 2 == 0 else "odd")
    num = log_confinement(n, i, 1)
    return math.exp(num - ((n - 1) * math.log(a.base) + math.log(a.constant)))


def log_confinement(n: int, i: int, j: int) -> float:
    """``log p(n, i, j)`` without underflow."""
    _check_args(n, i, j)
    w = i + j - 1
    u = np.zeros(w)
    u[j - 1] = 1.0
    log_scale = 0.0
    for t in range(n - 1):
        u = _step(u)
        top = u.max()
        if top == 0:
            return -math.inf
        if top < 1e-200 or (t + 1) % RENORM_EVERY == 0:
            u /= top
            log_scale += math.log(top)
    return log_scale + math.log(u.sum())


# -- the all-black record ----------------------------------------------------


@dataclass(frozen=True)
class BlackRun:
    n: int
    ratio: float  # N(n)/D(n) = P(C_0 = W | Y_1^n = B^n)
    log_N: float
    log_D: float
    widths: int
    dn_bound_ok: bool

    @property
    def p_black(self) -> float:
        return 1.0 - self.ratio


def _logsumexp(a: np.ndarray) -> float:
    a = a[np.isfinite(a)]
    if a.size == 0:
        return -math.inf
    top = a.max()
    return float(top + math.log(np.exp(a - top).sum()))


def black_run_trend(n_max: int, i_max: Optional[int] = None, every: int = 1) -> Iterator[BlackRun]:
    """``N(n)/D(n)`` for ``n = 1..n_max`` (every ``every``-th value, plus ``n_max``).

    All widths ``1..i_max`` advance together as rows of one array with their
    own log scale.  ``i_max`` defaults to a size for which the dropped
    geometric tail is below ``1e-12`` of the retained mass at ``n_max``; an
    explicit value that is too small raises :class:`TruncationError`.
    """
    if n_max < 1:
        raise ValueError("need n_max >= 1")
    W = i_max if i_max is not None else default_truncation(n_max)
    widths = np.arange(1, W + 1)
    mask = np.arange(W)[None, :] < widths[:, None]
    v = mask.astype(float)
    log_scale = np.zeros(W)
    log_weight = -(widths + 2) * math.log(2.0)
    for n in range(1, n_max + 1):
        if n > 1:
            nv = np.zeros_like(v)
            nv[:, 1:] += 0.5 * v[:, :-1]
            nv[:, :-1] += 0.5 * v[:, 1:]
            nv *= mask
            v = nv
            top = v.max(axis=1)
            live = top > 0
            fix = live & ((top < 1e-100) | (n % RENORM_EVERY == 0))
            v[fix] /= top[fix, None]
            log_scale[fix] += np.log(top[fix])
            log_scale[~live] = -math.inf
        if n % every and n != n_max:
            continue
        with np.errstate(divide="ignore"):
            log_u0 = np.log(v[:, 0]) + log_scale
            log_tot = np.log(v.sum(axis=1)) + log_scale
        log_N = _logsumexp(log_weight + log_u0)
        log_D = _logsumexp(log_weight + log_tot)
        # tails dropped beyond W: sum_{w>W} 2^-(w+2) (numerator),
        # sum_{w>W} w 2^-(w+2) = (W+2) 2^-(W+2) (denominator)
        tail_N = -(W + 2) * math.log(2.0)
        tail_D = math.log(W + 2) - (W + 2) * math.log(2.0)
        if tail_N - log_N > math.log(TAIL_TOL) or tail_D - log_D > math.log(TAIL_TOL):
            raise TruncationError(f"i_max={W} leaves a tail above {TAIL_TOL} of the retained mass at n={n}")
        bound = _logsumexp(log_weight + np.log(widths) + log_u0)
        yield BlackRun(n, math.exp(log_N - log_D), log_N, log_D, W, bool(log_D >= bound - 1e-12))


def default_truncation(n: int) -> int:
    """Width cutoff so the dropped tail is negligible; grows like ``n^(1/3)``."""
    # retained mass is at least the best single width, 2^-(w+2) cos(pi/(w+1))^(n-1)
    best = max(
        -(w + 2) * math.log(2) + (n - 1) * math.log(math.cos(math.pi / (w + 1)))
        for w in range(2, 400)
    )
    W = 8
    while -(W + 2) * math.log(2) + math.log(W + 2) - best > math.log(TAIL_TOL) - 8:
        W += 1
    return W


def black_run_conditional(n: int, i_max: Optional[int] = None) -> float:
    """``P(C_0 = W | Y_1^n = B^n) = N(n)/D(n)``; ``1 -`` this is the black posterior."""
    *_, last = black_run_trend(n, i_max, every=n)
    return last.ratio
