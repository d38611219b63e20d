"""
Generating-function model of query dissemination.

A node forwards the query over each of its links independently with the
transmit probability ``tau``. Reach statistics then follow from branching
process arguments on the configuration model: the number of links a node
forwards over is distributed as ``G(tau x + 1 - tau)`` for the originator
and ``G_excess(tau x + 1 - tau)`` for every other node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .degree import (
    DegreeDistribution,
    excess_distribution,
    excess_pgf_eval,
    mean,
    second_moment,
)

BISECTION_TOL = 1e-6
BISECTION_MAX_ITER = 200
EXTINCTION_TOL = 1e-10
EXTINCTION_MAX_ITER = 10_000_000


@dataclass(frozen=True)
class ProtocolParams:
    """Parameters of one protocol configuration.

    ``ttl=None`` means unbounded for the analytic model and "pick a default"
    for the simulator.
    """

    rho: float
    gamma: float
    k: int
    ttl: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho!r}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"k must be a nonnegative integer, got {self.k!r}")
        if self.ttl is not None and (int(self.ttl) != self.ttl or self.ttl < 1):
            raise ValueError(f"ttl must be a positive integer, got {self.ttl!r}")


@dataclass(frozen=True)
class AnalyticResult:
    tau: float
    mean_reach: float
    mean_hits: float
    percolates: bool


@dataclass(frozen=True)
class ReachDistribution:
    """Truncated distribution of the number of nodes a query reaches.

    ``probs[i - 1]`` is the probability of reaching exactly ``i`` nodes for
    ``1 <= i <= max_count``; ``tail`` is the remaining mass (larger finite
    reaches plus, above the transition, the infinite outbreak).
    """

    probs: np.ndarray
    tail: float

    @property
    def counts(self) -> np.ndarray:
        return np.arange(1, self.probs.size + 1)

    def partial_mean(self) -> float:
        return float(self.counts @ self.probs)


def transmit_probability(dist: DegreeDistribution, rho: float, gamma: float, k: int) -> float:
    """Probability that a node sends the query over a given link.

    With knowledge depth ``k`` a link stays silent only if nothing within
    ``k - 1`` further hops behind it holds the resource and the gossip draw
    fails. ``k = 0`` is pure gossip.
    """
    if k == 0:
        return float(gamma)
    w = 1.0
    for _ in range(k - 1):
        w = min(1.0, excess_pgf_eval(dist, (1.0 - rho) * w))
    return 1.0 - (1.0 - rho) * (1.0 - gamma) * w


def forwarding_distribution(
    dist: DegreeDistribution, tau: float, use_excess: bool = False, max_i: int | None = None
) -> np.ndarray:
    """Distribution of the number of links a node forwards over.

    Each of the node's ``j`` links (or ``j`` further links, with
    ``use_excess``) is used independently with probability ``tau``.

    Parameters
    ----------
    dist : DegreeDistribution
    tau : float
        Transmit probability in [0, 1].
    use_excess : bool
        Start from the excess degree distribution, i.e. a node reached over
        a link.
    max_i : int, optional
        Highest coefficient returned. Defaults to the maximum degree, which
        gives the full distribution.

    Returns
    -------
    f : ndarray
        ``f[i]`` is the probability of forwarding to exactly ``i`` links.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau!r}")
    p = excess_distribution(dist).probs if use_excess else dist.probs
    top = p.size - 1
    f = np.zeros(top + 1)
    for j in np.flatnonzero(p):
        f[: j + 1] += p[j] * binom.pmf(np.arange(j + 1), j, tau)
    if max_i is None:
        return f
    if max_i < 0:
        raise ValueError("max_i must be nonnegative")
    out = np.zeros(max_i + 1)
    n = min(max_i + 1, f.size)
    out[:n] = f[:n]
    return out


def mean_forward(dist: DegreeDistribution, tau: float) -> float:
    return tau * mean(dist)


def mean_excess_forward(dist: DegreeDistribution, tau: float) -> float:
    return tau * mean(excess_distribution(dist))


def _tau(dist, params: ProtocolParams) -> float:
    return transmit_probability(dist, params.rho, params.gamma, params.k)


def reach_from_tau(dist: DegreeDistribution, tau: float) -> float:
    """Mean number of nodes reached, ``inf`` at or beyond the transition."""
    m1 = mean(dist)
    if m1 == 0.0:
        return 1.0
    m2 = second_moment(dist)
    denom = (1.0 + tau) * m1 - tau * m2
    if denom <= 0.0:
        return math.inf
    return 1.0 + tau * m1 * m1 / denom


def expected_reach(dist: DegreeDistribution, params: ProtocolParams) -> float:
    return reach_from_tau(dist, _tau(dist, params))


def expected_hits(dist: DegreeDistribution, params: ProtocolParams) -> float:
    if params.rho == 0.0:
        return 0.0
    return params.rho * expected_reach(dist, params)


def analyze(dist: DegreeDistribution, params: ProtocolParams) -> AnalyticResult:
    tau = _tau(dist, params)
    reach = reach_from_tau(dist, tau)
    hits = 0.0 if params.rho == 0.0 else params.rho * reach
    return AnalyticResult(tau=tau, mean_reach=reach, mean_hits=hits, percolates=math.isinf(reach))


def critical_tau(dist: DegreeDistribution) -> float | None:
    """Smallest transmit probability at which queries percolate.

    Returns ``None`` when no ``tau`` in [0, 1] percolates.
    """
    m1 = mean(dist)
    if m1 <= 0:
        raise ValueError("critical tau undefined for a zero-mean distribution")
    m2 = second_moment(dist)
    if m2 <= m1:
        return None
    tc = m1 / (m2 - m1)
    return tc if tc <= 1.0 else None


def _bisect_gamma(ok) -> float | None:
    # ok(gamma) must be monotone: False ... False True ... True.
    if ok(0.0):
        return 0.0
    if not ok(1.0):
        return None
    lo, hi = 0.0, 1.0
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOL:
            break
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def min_gamma_percolation(dist: DegreeDistribution, rho: float, k: int) -> float | None:
    """Smallest gossip probability for which queries percolate, or ``None``."""
    tc = critical_tau(dist)
    if tc is None:
        return None
    return _bisect_gamma(lambda g: transmit_probability(dist, rho, g, k) >= tc)


def min_gamma_one_hit(dist: DegreeDistribution, rho: float, k: int) -> float | None:
    """Smallest gossip probability giving at least one expected hit, or ``None``."""
    if rho == 0.0:
        return None
    return _bisect_gamma(lambda g: expected_hits(dist, ProtocolParams(rho, g, k)) >= 1.0)


def _truncated_product(a: np.ndarray, b: np.ndarray, size: int) -> np.ndarray:
    return np.convolve(a, b)[:size]


def reach_distribution(dist: DegreeDistribution, params: ProtocolParams, max_count: int) -> ReachDistribution:
    """Probabilities of reaching exactly 1..max_count nodes.

    Coefficients of ``R_link(x) = x F_excess(R_link(x))`` are extracted with
    Lagrange inversion, ``r_link[n] = [x^(n-1)] F_excess(x)^n / n``, and
    ``R(x) = x F(R_link(x))`` is accumulated from truncated convolution
    powers of ``R_link``.
    """
    return reach_distribution_for_tau(dist, _tau(dist, params), max_count)


def reach_distribution_for_tau(dist: DegreeDistribution, tau: float, max_count: int) -> ReachDistribution:
    if max_count < 1:
        raise ValueError("max_count must be at least 1")
    f = forwarding_distribution(dist, tau)
    if mean(dist) > 0:
        f_link = forwarding_distribution(dist, tau, use_excess=True)
    else:
        f_link = np.array([1.0])

    size = max_count + 1
    f_link = f_link[:size]
    # r_link[n] for n = 0..max_count, r_link[0] = 0
    r_link = np.zeros(size)
    power = np.array([1.0])
    for n in range(1, size):
        power = _truncated_product(power, f_link, size)
        if n - 1 < power.size:
            r_link[n] = power[n - 1] / n

    # F(R_link) truncated to degree max_count - 1, then shifted by x.
    comp = np.zeros(max_count)
    rpow = np.zeros(max_count)
    rpow[0] = 1.0
    for j in range(min(f.size, max_count)):
        if f[j] != 0.0:
            comp += f[j] * rpow
        rpow = _truncated_product(rpow, r_link, max_count)
    probs = np.clip(comp, 0.0, None)
    tail = max(0.0, 1.0 - float(probs.sum()))
    return ReachDistribution(probs=probs, tail=tail)


def extinction_probability(dist: DegreeDistribution, params: ProtocolParams) -> float:
    """Probability that the dissemination behind a followed link stays finite.

    Smallest fixed point of ``u = F_excess(u)`` on [0, 1].
    """
    tau = _tau(dist, params)
    if mean(dist) == 0.0 or mean_excess_forward(dist, tau) < 1.0:
        return 1.0
    q = excess_distribution(dist).probs
    u = 0.0
    for _ in range(EXTINCTION_MAX_ITER):
        nxt = float(np.polynomial.polynomial.polyval(tau * u + 1.0 - tau, q))
        if abs(nxt - u) < EXTINCTION_TOL:
            return nxt
        u = nxt
    return u


def finite_reach_probability(dist: DegreeDistribution, params: ProtocolParams) -> float:
    """Probability that a query from a random node reaches finitely many nodes."""
    u = extinction_probability(dist, params)
    tau = _tau(dist, params)
    return float(np.polynomial.polynomial.polyval(tau * u + 1.0 - tau, dist.probs))
