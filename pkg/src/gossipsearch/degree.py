"""
Finite degree distributions and their generating functions.

A distribution is stored densely: ``probs[i]`` is the probability that a
node has degree ``i``. Only finite supports are supported, so every
moment and every generating-function evaluation is an exact finite sum.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

# Sums off by more than this are treated as bugs rather than rounding.
RENORMALIZE_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """Probability mass function over node degrees.

    Parameters
    ----------
    probs : array_like
        ``probs[i]`` is the probability of degree ``i``. Trailing zeros are
        trimmed. The sum must be within ``1e-6`` of one; it is then
        renormalized exactly.
    """

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).ravel()
        if p.size == 0:
            raise ValueError("degree distribution needs at least one entry")
        if not np.all(np.isfinite(p)):
            raise ValueError("degree probabilities must be finite")
        if np.any(p < 0):
            raise ValueError("degree probabilities must be nonnegative")
        total = p.sum()
        if abs(total - 1.0) > RENORMALIZE_TOLERANCE:
            raise ValueError(f"degree probabilities sum to {total!r}, not 1")
        p = p / total
        nz = np.flatnonzero(p)
        p = p[: nz[-1] + 1]
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "DegreeDistribution":
        """Build from ``(degree, probability)`` pairs with distinct degrees."""
        pairs = list(pairs)
        degrees = [int(d) for d, _ in pairs]
        if len(set(degrees)) != len(degrees):
            raise ValueError("degrees must be distinct")
        if any(d < 0 for d in degrees):
            raise ValueError("degrees must be nonnegative")
        if not degrees:
            raise ValueError("degree distribution needs at least one entry")
        p = np.zeros(max(degrees) + 1)
        for d, prob in zip(degrees, (float(x) for _, x in pairs)):
            p[d] = prob
        return cls(p)

    @classmethod
    def regular(cls, degree: int) -> "DegreeDistribution":
        p = np.zeros(degree + 1)
        p[degree] = 1.0
        return cls(p)

    @property
    def max_degree(self) -> int:
        return self.probs.size - 1

    @property
    def entries(self) -> list[tuple[int, float]]:
        """Nonzero ``(degree, probability)`` pairs sorted by degree."""
        return [(int(i), float(self.probs[i])) for i in np.flatnonzero(self.probs)]

    def __repr__(self):
        return f"DegreeDistribution(max_degree={self.max_degree}, mean={mean(self):.6g})"

    def __eq__(self, other):
        if not isinstance(other, DegreeDistribution):
            return NotImplemented
        return self.probs.shape == other.probs.shape and bool(np.all(self.probs == other.probs))

    def __hash__(self):
        return hash(self.probs.tobytes())


def from_power_law(alpha: float, min_degree: int, cutoff: int) -> DegreeDistribution:
    """Power law ``p_x ~ x**alpha`` restricted to ``min_degree <= x <= cutoff``."""
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    if min_degree < 1:
        raise ValueError("min_degree must be positive")
    if min_degree > cutoff:
        raise ValueError(f"min_degree {min_degree} exceeds cutoff {cutoff}")
    x = np.arange(min_degree, cutoff + 1, dtype=float)
    w = x**alpha
    p = np.zeros(cutoff + 1)
    p[min_degree:] = w / w.sum()
    return DegreeDistribution(p)


def aiello_counts(a: float, b: float) -> np.ndarray:
    """Number of nodes of each degree in the Aiello-Chung-Lu construction.

    Returns an array ``counts`` with ``counts[x] = floor(e**a / x**b)`` for
    ``1 <= x <= floor(e**(a/b))`` and ``counts[0] = 0``.
    """
    if not a >= 0:
        raise ValueError("a must be nonnegative")
    if not b > 0:
        raise ValueError("b must be positive")
    top = math.floor(math.exp(a / b))
    x = np.arange(1, top + 1, dtype=float)
    counts = np.zeros(top + 1, dtype=np.int64)
    counts[1:] = np.floor(math.exp(a) / x**b).astype(np.int64)
    if counts.sum() == 0:
        raise ValueError(f"Aiello parameters a={a}, b={b} yield no nodes")
    return counts


def from_aiello(a: float, b: float) -> tuple[DegreeDistribution, int, np.ndarray]:
    """Aiello histogram as a distribution, plus node count and degree sequence."""
    counts = aiello_counts(a, b)
    n = int(counts.sum())
    seq = np.repeat(np.arange(counts.size, dtype=np.int64), counts)
    return DegreeDistribution(counts / n), n, seq


def from_sequence(degrees) -> DegreeDistribution:
    """Empirical histogram of a degree sequence."""
    degrees = np.asarray(degrees, dtype=np.int64)
    if degrees.size == 0:
        raise ValueError("empty degree sequence")
    counts = np.bincount(degrees)
    return DegreeDistribution(counts / degrees.size)


def from_graph(graph) -> DegreeDistribution:
    """Empirical degree histogram of an :class:`~gossipsearch.overlay.OverlayGraph`."""
    if graph.node_count == 0:
        raise ValueError("empty graph")
    return from_sequence(graph.degrees())


def mean(dist: DegreeDistribution) -> float:
    i = np.arange(dist.probs.size)
    return float(i @ dist.probs)


def second_moment(dist: DegreeDistribution) -> float:
    i = np.arange(dist.probs.size, dtype=float)
    return float((i * i) @ dist.probs)


@functools.lru_cache(maxsize=256)
def excess_distribution(dist: DegreeDistribution) -> DegreeDistribution:
    """Distribution of the number of further links at the end of a random edge.

    ``q_i = (i + 1) p_{i+1} / <p>``.
    """
    m = mean(dist)
    if m <= 0:
        raise ValueError("excess degree undefined for a zero-mean distribution")
    p = dist.probs
    q = np.arange(1, p.size) * p[1:] / m
    return DegreeDistribution(q)


def _check_unit(x: float):
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"generating functions are evaluated on [0, 1], got {x!r}")


def pgf_eval(dist: DegreeDistribution, x: float) -> float:
    """``G(x) = sum_i p_i x**i``."""
    _check_unit(x)
    return float(np.polynomial.polynomial.polyval(x, dist.probs))


def excess_pgf_eval(dist: DegreeDistribution, x: float) -> float:
    """``G_excess(x) = sum_i q_i x**i``."""
    _check_unit(x)
    return float(np.polynomial.polynomial.polyval(x, excess_distribution(dist).probs))
