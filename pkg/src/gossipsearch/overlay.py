"""
Overlay graph construction: degree sequences, configuration-model wiring
and resource placement.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components, shortest_path

from .degree import DegreeDistribution, aiello_counts
from .rng import as_generator

logger = logging.getLogger(__name__)


class WiringError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class OverlayGraph:
    """Undirected simple graph in compressed sparse row form.

    ``indices[indptr[n]:indptr[n + 1]]`` are the neighbors of ``n`` in
    increasing order. ``holders[n]`` flags nodes holding a matching resource.
    """

    indptr: np.ndarray
    indices: np.ndarray
    holders: np.ndarray

    def __post_init__(self):
        for name in ("indptr", "indices", "holders"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, node_count: int, edges, holders=None) -> "OverlayGraph":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= node_count):
            raise ValueError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self-loops are not allowed")
        u = np.concatenate([edges[:, 0], edges[:, 1]])
        v = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((v, u))
        u, v = u[order], v[order]
        if u.size > 1 and np.any((u[1:] == u[:-1]) & (v[1:] == v[:-1])):
            raise ValueError("duplicate edges are not allowed")
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(u, minlength=node_count), out=indptr[1:])
        if holders is None:
            holders = np.zeros(node_count, dtype=bool)
        else:
            holders = np.array(holders, dtype=bool)
            if holders.shape != (node_count,):
                raise ValueError("holders must have one flag per node")
        return cls(indptr, v.astype(np.int64), holders)

    @property
    def node_count(self) -> int:
        return self.indptr.size - 1

    @property
    def edge_count(self) -> int:
        return self.indices.size // 2

    @property
    def holder_count(self) -> int:
        return int(self.holders.sum())

    @property
    def adjacency(self) -> list[np.ndarray]:
        return [self.neighbors(n) for n in range(self.node_count)]

    def neighbors(self, node: int) -> np.ndarray:
        return self.indices[self.indptr[node] : self.indptr[node + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edges(self) -> np.ndarray:
        """Edge list with ``u < v``, sorted."""
        u = np.repeat(np.arange(self.node_count), self.degrees())
        keep = u < self.indices
        return np.column_stack([u[keep], self.indices[keep]])

    def with_holders(self, holders) -> "OverlayGraph":
        holders = np.array(holders, dtype=bool)
        if holders.shape != (self.node_count,):
            raise ValueError("holders must have one flag per node")
        return OverlayGraph(self.indptr, self.indices, holders)

    def to_sparse(self) -> csr_matrix:
        n = self.node_count
        data = np.ones(self.indices.size, dtype=np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def validate(self):
        """Full scan of the symmetry, simplicity and ordering invariants."""
        n = self.node_count
        if self.indptr[0] != 0 or np.any(np.diff(self.indptr) < 0):
            raise ValueError("malformed indptr")
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= n):
            raise ValueError("neighbor id out of range")
        u = np.repeat(np.arange(n), self.degrees())
        if np.any(u == self.indices):
            raise ValueError("self-loop present")
        same_row = u[1:] == u[:-1]
        if np.any(same_row & (self.indices[1:] <= self.indices[:-1])):
            raise ValueError("adjacency lists not strictly increasing")
        fwd = u * n + self.indices
        rev = np.sort(self.indices * n + u)
        if not np.array_equal(fwd, rev):
            raise ValueError("adjacency is not symmetric")
        if self.holders.shape != (n,):
            raise ValueError("holders must have one flag per node")

    def __eq__(self, other):
        if not isinstance(other, OverlayGraph):
            return NotImplemented
        return (
            np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.holders, other.holders)
        )

    __hash__ = None

    def __repr__(self):
        return f"OverlayGraph(nodes={self.node_count}, edges={self.edge_count}, holders={self.holder_count})"


def ring(node_count: int) -> OverlayGraph:
    i = np.arange(node_count)
    return OverlayGraph.from_edges(node_count, np.column_stack([i, (i + 1) % node_count]))


def aiello_sequence(a: float, b: float) -> np.ndarray:
    """Degree sequence with ``floor(e**a / x**b)`` nodes of each degree ``x``."""
    counts = aiello_counts(a, b)
    return np.repeat(np.arange(counts.size, dtype=np.int64), counts)


def sample_sequence(dist: DegreeDistribution, n: int, rng_seed) -> np.ndarray:
    """``n`` independent degree draws from ``dist``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = as_generator(rng_seed)
    return rng.choice(dist.probs.size, size=n, p=dist.probs).astype(np.int64)


def wire_configuration(
    seq,
    rng_seed,
    max_rewire_attempts: int | None = None,
    max_discard_fraction: float = 0.01,
) -> OverlayGraph:
    """Random simple graph realizing ``seq`` by stub matching.

    Stubs are shuffled and paired. Pairs that would form a self-loop or a
    repeated edge go back to a residual pool, which is then matched one
    random pair at a time; a pair that still cannot be joined directly is
    resolved by swapping it with a random existing edge ``(x, y)`` into
    ``(a, x), (b, y)``. Stubs left over after ``max_rewire_attempts`` tries
    are dropped, reducing those nodes' degrees.

    An odd stub total is fixed first by decrementing one node of maximum
    degree.

    Raises
    ------
    WiringError
        If more than ``max_discard_fraction`` of the stubs had to be dropped.
    """
    deg = np.array(seq, dtype=np.int64)
    if deg.size == 0:
        raise ValueError("empty degree sequence")
    if np.any(deg < 0):
        raise ValueError("degrees must be nonnegative")
    n = deg.size
    if deg.sum() % 2:
        deg[np.argmax(deg)] -= 1
    total_stubs = int(deg.sum())
    if max_rewire_attempts is None:
        max_rewire_attempts = 100 * total_stubs
    rng = as_generator(rng_seed)

    stubs = rng.permutation(np.repeat(np.arange(n, dtype=np.int64), deg))
    pairs = stubs.reshape(-1, 2)
    lo = pairs.min(axis=1)
    hi = pairs.max(axis=1)
    keys = lo * n + hi
    ok = np.flatnonzero(lo != hi)
    _, first = np.unique(keys[ok], return_index=True)
    accepted = np.zeros(len(pairs), dtype=bool)
    accepted[ok[first]] = True

    edges = [(int(a), int(b)) for a, b in zip(lo[accepted], hi[accepted])]
    position = {a * n + b: i for i, (a, b) in enumerate(edges)}
    residual = [int(s) for s in pairs[~accepted].ravel()]

    def add(a, b):
        if a > b:
            a, b = b, a
        position[a * n + b] = len(edges)
        edges.append((a, b))

    def remove(i):
        a, b = edges[i]
        del position[a * n + b]
        last = edges.pop()
        if i < len(edges):
            edges[i] = last
            position[last[0] * n + last[1]] = i

    def key(a, b):
        return a * n + b if a < b else b * n + a

    def take(i, j):
        for idx in sorted((i, j), reverse=True):
            residual[idx] = residual[-1]
            residual.pop()

    attempts = 0
    while len(residual) >= 2 and attempts < max_rewire_attempts:
        attempts += 1
        i, j = rng.choice(len(residual), size=2, replace=False)
        a, b = residual[i], residual[j]
        if a != b and key(a, b) not in position:
            add(a, b)
            take(i, j)
            continue
        if not edges:
            continue
        e = int(rng.integers(len(edges)))
        x, y = edges[e]
        if rng.random() < 0.5:
            x, y = y, x
        if a == x or b == y:
            continue
        k1, k2 = key(a, x), key(b, y)
        if k1 == k2 or k1 in position or k2 in position:
            continue
        remove(e)
        add(a, x)
        add(b, y)
        take(i, j)

    if residual:
        logger.info("wiring discarded %d of %d stubs", len(residual), total_stubs)
    if len(residual) > max_discard_fraction * total_stubs:
        raise WiringError(
            f"{len(residual)} of {total_stubs} stubs left unmatched after {attempts} rewiring attempts"
        )
    return OverlayGraph.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2))


def residual_stubs(seq, graph: OverlayGraph) -> int:
    """Stubs requested by ``seq`` but missing from ``graph``."""
    return int(np.asarray(seq).sum() - graph.degrees().sum())


def place_resources(graph: OverlayGraph, rho: float, rng_seed) -> OverlayGraph:
    """Flag each node as a resource holder independently with probability ``rho``."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho!r}")
    rng = as_generator(rng_seed)
    return graph.with_holders(rng.random(graph.node_count) < rho)


def component_of(graph: OverlayGraph, node: int) -> np.ndarray:
    """Sorted node ids of the connected component containing ``node``."""
    if not 0 <= node < graph.node_count:
        raise ValueError(f"node {node} not in graph")
    order = breadth_first_order(graph.to_sparse(), node, directed=False, return_predecessors=False)
    return np.sort(order)


def component_labels(graph: OverlayGraph) -> tuple[int, np.ndarray]:
    return connected_components(graph.to_sparse(), directed=False)


def largest_component(graph: OverlayGraph) -> np.ndarray:
    """Sorted node ids of the largest connected component (lowest label on ties)."""
    _, labels = component_labels(graph)
    sizes = np.bincount(labels)
    return np.flatnonzero(labels == np.argmax(sizes))


def eccentricity(graph: OverlayGraph, node: int) -> int:
    """Largest hop distance from ``node`` within its component."""
    d = shortest_path(graph.to_sparse(), directed=False, unweighted=True, indices=[node])[0]
    return int(d[np.isfinite(d)].max())


def diameter_bound(graph: OverlayGraph, samples: int = 10, rng_seed=0) -> int:
    """Upper bound on the diameter of the largest component.

    Twice the largest eccentricity seen from ``samples`` random nodes of the
    largest component; every eccentricity is at least half the diameter.
    """
    comp = largest_component(graph)
    rng = as_generator(rng_seed)
    picks = rng.choice(comp, size=min(samples, comp.size), replace=False)
    d = shortest_path(graph.to_sparse(), directed=False, unweighted=True, indices=picks)
    return 2 * int(d[np.isfinite(d)].max())
