"""Entropy costs and Cramér rates for the lazy biased walk.

The step law is ``(eps, p(1-eps), (1-p)(1-eps))`` on ``(0, +1, -1)``.  The
rate of interest is ``I(p, eps) = sup_l [d l - log M(l)]`` for drift
``d = 2/3``, where ``M`` is the moment generating function of one step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DRIFT = 2.0 / 3.0
BRACKET = (-40.0, 40.0)
BISECT_WIDTH = 1e-8
NEWTON_STEPS = 2


class UnattainableDrift(ValueError):
    pass


def _check(p, eps, name="p", low=0.5):
    if not low <= p <= 1:
        raise ValueError(f"{name} must lie in [{low}, 1], got {p}")
    if not 0 <= eps < 1:
        raise ValueError(f"epsilon must lie in [0, 1), got {eps}")


def step_law(p: float, eps: float) -> tuple[float, float, float]:
    """Probabilities of (pause, right, left)."""
    return eps, p * (1 - eps), (1 - p) * (1 - eps)


def _xlogy(a: float, b: float) -> float:
    if a == 0:
        return 0.0
    if b == 0:
        return math.inf
    return a * math.log(a / b)


def relative_entropy(q: float, delta: float, p: float, eps: float) -> float:
    """``H((q, delta) | (p, eps))`` between the corresponding step laws.

    ``q`` may go below 1/2 so that derivatives at ``q = 1/2`` can be taken
    by central differences.
    """
    _check(q, delta, "q", low=0.0)
    _check(p, eps)
    return math.fsum(_xlogy(a, b) for a, b in zip(step_law(q, delta), step_law(p, eps)))


def crossover_cost(q: float, delta: float, p: float, eps: float) -> float:
    """Entropy cost of drift ``(2q-1)(1-delta)`` minus the coloring gain ``log 2`` per fresh site."""
    return relative_entropy(q, delta, p, eps) + (1 - delta) * (2 * q - 1) * math.log(2)


def crossover_derivative(q: float, delta: float, p: float) -> float:
    """``dC/dq``; independent of ``eps``.  At ``q = 1/2`` it is ``(1-delta) log(4(1-p)/p)``."""
    if p == 1:
        return -math.inf
    if q in (0, 1):
        return math.inf if q == 1 else -math.inf
    return (1 - delta) * (math.log(q * (1 - p) / ((1 - q) * p)) + 2 * math.log(2))


def crossover_sign(p, delta: float = 0.0) -> int:
    """Exact sign of ``dC/dq`` at ``q = 1/2``: the sign of ``4 - 5p`` (``delta < 1``)."""
    if not 0 <= delta < 1:
        raise ValueError("delta must lie in [0, 1)")
    x = 4 - 5 * Fraction(p)
    return (x > 0) - (x < 0)


def moment_generating(lam: float, p: float, eps: float) -> float:
    e, r, l = step_law(p, eps)
    return e + r * math.exp(lam) + l * math.exp(-lam)


def log_mgf_derivative(lam: float, p: float, eps: float) -> float:
    """``M'(lam) / M(lam)``, the mean of the tilted step law."""
    e, r, l = step_law(p, eps)
    # divide through by the largest exponential to stay finite at |lam| = 40
    if lam >= 0:
        a, b, c = e * math.exp(-lam), r, l * math.exp(-2 * lam)
    else:
        a, b, c = e * math.exp(lam), r * math.exp(2 * lam), l
    return (b - c) / (a + b + c)


def _log_mgf_second(lam: float, p: float, eps: float) -> float:
    e, r, l = step_law(p, eps)
    m = moment_generating(lam, p, eps)
    m1 = r * math.exp(lam) - l * math.exp(-lam)
    m2 = r * math.exp(lam) + l * math.exp(-lam)
    return m2 / m - (m1 / m) ** 2


@dataclass(frozen=True)
class TiltSolution:
    lambda_bar: float
    rate: float
    drift: float = DRIFT


def solve_tilt(p: float, eps: float, drift: float = DRIFT) -> TiltSolution:
    """Solve ``M'/M = drift`` by bisection on ``[-40, 40]`` then Newton polish."""
    _check(p, eps)
    e, r, l = step_law(p, eps)
    hi_lim = 1.0 if r > 0 else (0.0 if e > 0 else -1.0)
    lo_lim = -1.0 if l > 0 else (0.0 if e > 0 else 1.0)
    if not lo_lim < drift < hi_lim:
        raise UnattainableDrift(f"drift {drift} outside the attainable range ({lo_lim}, {hi_lim}) at p={p}, eps={eps}")
    a, b = BRACKET
    fa = log_mgf_derivative(a, p, eps) - drift
    fb = log_mgf_derivative(b, p, eps) - drift
    if fa > 0 or fb < 0:
        raise UnattainableDrift(f"tilt for drift {drift} lies outside {BRACKET}")
    while b - a > BISECT_WIDTH:
        c = 0.5 * (a + b)
        if log_mgf_derivative(c, p, eps) - drift < 0:
            a = c
        else:
            b = c
    lam = 0.5 * (a + b)
    for _ in range(NEWTON_STEPS):
        g = log_mgf_derivative(lam, p, eps) - drift
        h = _log_mgf_second(lam, p, eps)
        if h > 0:
            lam -= g / h
    rate = drift * lam - math.log(moment_generating(lam, p, eps))
    return TiltSolution(lam, max(rate, 0.0), drift)


def rate(p: float, eps: float, drift: float = DRIFT) -> float:
    """``I(p, eps)``; ``+inf`` when the drift cannot be attained (e.g. p=1, eps=0)."""
    try:
        return solve_tilt(p, eps, drift).rate
    except UnattainableDrift:
        return math.inf


def zero_eps_tilt(p: float) -> float:
    """Closed form ``(1/2) log(5(1-p)/p)`` of the tilt at ``eps = 0``."""
    return 0.5 * math.log(5 * (1 - p) / p)


def zero_eps_rate(p: float) -> float:
    """Closed form ``log C(p)`` with ``C(p) = (5/(6p))^{5/6} (1/(6(1-p)))^{1/6}``."""
    return (5 / 6) * math.log(5 / (6 * p)) + (1 / 6) * math.log(1 / (6 * (1 - p)))


@dataclass(frozen=True)
class Goodness:
    holds: bool
    margin: float
    drift_ok: bool


def goodness_criterion(p: float, eps: float) -> Goodness:
    """``(2p-1)(1-eps) > 2/3`` and ``-I(p, eps) < log(p(1-eps)/2)``; margin ``log(p(1-eps)/2) + I``."""
    _check(p, eps)
    drift_ok = (2 * p - 1) * (1 - eps) > DRIFT
    margin = math.log(p * (1 - eps) / 2) + rate(p, eps)
    return Goodness(bool(drift_ok and margin > 0), margin, bool(drift_ok))


def p_star_zero_eps() -> Fraction:
    """Threshold ``1/(1 + 5^5 12^-6)`` above which the criterion holds at ``eps = 0``."""
    return Fraction(12**6, 12**6 + 5**5)


def locate_flip(eps: float = 0.0, lo: float = 0.99, hi: float = 0.9999, width: float = 1e-10) -> float:
    """Bisect the p at which the goodness criterion switches on."""
    if goodness_criterion(lo, eps).holds or not goodness_criterion(hi, eps).holds:
        raise ValueError("criterion does not switch inside the bracket")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if goodness_criterion(mid, eps).holds:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# -- exact point masses ------------------------------------------------------


def position_distribution(m: int, p, eps, exact: bool = False):
    """Law of ``S_m`` as a vector indexed by ``S_m + m``.

    With ``exact`` the entries are Fractions (``p`` and ``eps`` are converted
    through their string form), otherwise floats from repeated convolution.
    """
    if exact:
        p, eps = Fraction(str(p)), Fraction(str(eps))
        e, r, l = eps, p * (1 - eps), (1 - p) * (1 - eps)
        dist = [Fraction(1)]
        for _ in range(m):
            out = [Fraction(0)] * (len(dist) + 2)
            for i, w in enumerate(dist):
                out[i] += w * l
                out[i + 1] += w * e
                out[i + 2] += w * r
            dist = out
        return dist
    kernel = np.array([(1 - p) * (1 - eps), eps, p * (1 - eps)], dtype=float)
    dist = np.ones(1)
    for _ in range(m):
        dist = np.convolve(dist, kernel)
    return dist


def point_mass(m: int, k: int, p, eps, exact: bool = False):
    """``P(S_m = k)``."""
    if abs(k) > m:
        return Fraction(0) if exact else 0.0
    return position_distribution(m, p, eps, exact)[k + m]


@dataclass(frozen=True)
class CramerCheck:
    m: int
    p: float
    eps: float
    point_mass: float
    empirical_rate: float
    rate: float
    relative_error: float
    prefactor_corrected: float


def cramer_finite_size(m: int, p: float, eps: float = 0.0) -> CramerCheck:
    """Compare ``-(1/m) log P(S_m = 2m/3)`` with ``I(p, eps)``.

    The ``prefactor_corrected`` value subtracts the local-limit correction
    ``log(sqrt(2 pi m sigma^2)) / m`` of the tilted walk.
    """
    if (2 * m) % 3:
        raise ValueError("2m/3 must be an integer")
    k = 2 * m // 3
    pm = point_mass(m, k, p, eps, exact=True)
    logp = math.log(pm.numerator) - math.log(pm.denominator)
    emp = -logp / m
    tilt = solve_tilt(p, eps)
    var = _log_mgf_second(tilt.lambda_bar, p, eps)
    # lattice span 2 at eps = 0 doubles the local mass
    span = 2 if eps == 0 else 1
    corrected = emp - math.log(math.sqrt(2 * math.pi * m * var) / span) / m
    return CramerCheck(m, p, eps, float(pm), emp, tilt.rate, abs(emp - tilt.rate) / tilt.rate, corrected)
