"""
Query dissemination over an overlay: k-hop knowledge tables, relay plus
gossip forwarding, and per-query metrics.

Semantics of one dissemination:

* Deliveries are processed hop by hop, first in first out within a hop.
  A node processes only the first delivery of a query; later ones are
  dropped but still count as messages.
* A processing node holding the resource answers the originator out of
  band (a hit, not a message).
* The query carries a TTL equal to the hops it may still travel. The
  originator starts with ``ttl``; a node reached after ``h`` hops forwards
  only while ``h < ttl``, so no message ever carries a negative TTL.
* A forwarding node first sends one message to each distinct next hop
  towards the resource holders in its table, skipping the node it heard
  the query from, then draws one uniform number per remaining neighbor
  (increasing id order) and gossips where the draw is below ``gamma``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .analytic import ProtocolParams
from .overlay import OverlayGraph, largest_component
from .rng import as_generator


@dataclass(frozen=True, eq=False)
class KnowledgeTable:
    """Resource holders within ``k`` hops of every node.

    Entries of node ``n`` live at ``indptr[n]:indptr[n + 1]`` sorted by
    holder id. ``relay_mask`` is aligned with the graph's adjacency arrays and
    marks the neighbors that are a next hop for at least one entry.
    """

    k: int
    indptr: np.ndarray
    holder: np.ndarray
    next_hop: np.ndarray
    distance: np.ndarray
    relay_mask: np.ndarray

    def entries(self, node: int) -> dict[int, tuple[int, int]]:
        sl = slice(self.indptr[node], self.indptr[node + 1])
        return {
            int(m): (int(r), int(d))
            for m, r, d in zip(self.holder[sl], self.next_hop[sl], self.distance[sl])
        }

    def relays(self, node: int) -> np.ndarray:
        sl = slice(self.indptr[node], self.indptr[node + 1])
        return np.unique(self.next_hop[sl])

    def __len__(self):
        return self.indptr.size - 1


def build_knowledge(graph: OverlayGraph, k: int) -> KnowledgeTable:
    """Index every resource holder within ``k`` hops of each node.

    The next hop is the smallest-id neighbor on a shortest path.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    n = graph.node_count
    empty = np.empty(0, np.int64)
    counts = _kernels.scan_knowledge(
        graph.indptr, graph.indices, graph.holders, k, False, empty, empty, empty, empty
    )
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    total = int(indptr[-1])
    holder = np.empty(total, np.int64)
    next_hop = np.empty(total, np.int64)
    distance = np.empty(total, np.int64)
    _kernels.scan_knowledge(
        graph.indptr, graph.indices, graph.holders, k, True, indptr, holder, next_hop, distance
    )
    rows = np.repeat(np.arange(n, dtype=np.int64), counts)
    order = np.lexsort((holder, rows))
    holder, next_hop, distance = holder[order], next_hop[order], distance[order]

    relay_mask = np.zeros(graph.indices.size, dtype=bool)
    if total:
        adj_rows = np.repeat(np.arange(n, dtype=np.int64), graph.degrees())
        adj_keys = adj_rows * n + graph.indices
        relay_mask[np.searchsorted(adj_keys, rows * n + next_hop)] = True
    for arr in (indptr, holder, next_hop, distance, relay_mask):
        arr.setflags(write=False)
    return KnowledgeTable(k, indptr, holder, next_hop, distance, relay_mask)


@dataclass(frozen=True)
class Delivery:
    query_id: int
    hop: int
    sender: int
    receiver: int
    kind: str  # "origin", "relay" or "gossip"

    def format(self) -> str:
        return f"{self.query_id} {self.hop} {self.sender} {self.receiver} {self.kind}"


@dataclass(frozen=True)
class DisseminationOutcome:
    hits: int
    reached: int
    messages: int
    answered_nodes: frozenset
    processed: tuple = ()
    trace: tuple = field(default=(), repr=False)


def default_ttl(node_count: int) -> int:
    return max(1, math.ceil(2 * math.log2(max(node_count, 2))))


def _resolve_ttl(graph, params) -> int:
    return default_ttl(graph.node_count) if params.ttl is None else int(params.ttl)


def _check(graph, table, params, originator):
    if table.k != params.k:
        raise ValueError(f"knowledge table built for k={table.k}, params ask for k={params.k}")
    if len(table) != graph.node_count:
        raise ValueError("knowledge table does not match the graph")
    if not 0 <= originator < graph.node_count:
        raise ValueError(f"originator {originator} not in graph")


def disseminate(
    graph: OverlayGraph,
    table: KnowledgeTable,
    params: ProtocolParams,
    originator: int,
    rng_stream,
    trace: bool = False,
    query_id: int = 0,
) -> DisseminationOutcome:
    """Disseminate one query from ``originator``.

    With ``trace=True`` a pure-Python implementation records every delivery
    (including the ones dropped as duplicates); otherwise the compiled
    kernel runs. Both consume ``rng_stream`` identically.
    """
    _check(graph, table, params, originator)
    ttl = _resolve_ttl(graph, params)
    rng = as_generator(rng_stream)
    if trace:
        return _disseminate_traced(graph, table, params.gamma, originator, ttl, rng, query_id)
    n = graph.node_count
    queue = np.empty(n, np.int64)
    reached, messages = _kernels.spread(
        graph.indptr, graph.indices, table.relay_mask, originator, ttl, float(params.gamma), rng,
        np.zeros(n, np.int64), 1, queue, np.empty(n, np.int64), np.empty(n, np.int64),
    )
    processed = queue[:reached]
    answered = processed[graph.holders[processed]]
    return DisseminationOutcome(
        hits=int(answered.size),
        reached=int(reached),
        messages=int(messages),
        answered_nodes=frozenset(answered.tolist()),
        processed=tuple(processed.tolist()),
    )


def _disseminate_traced(graph, table, gamma, originator, ttl, rng, query_id):
    log = [Delivery(query_id, 0, -1, originator, "origin")]
    handled = {originator}
    pending = deque([(originator, -1, 0)])
    processed = []
    messages = 0

    def send(src, dst, h, kind):
        nonlocal messages
        messages += 1
        log.append(Delivery(query_id, h, src, dst, kind))
        if dst not in handled:
            handled.add(dst)
            pending.append((dst, src, h))

    while pending:
        node, src, h = pending.popleft()
        processed.append(node)
        if h >= ttl:
            continue
        relays = table.relays(node)
        for r in relays:
            if r != src:
                send(node, int(r), h + 1, "relay")
        relay_set = set(relays.tolist())
        eligible = [int(m) for m in graph.neighbors(node) if m not in relay_set and m != src]
        draws = rng.random(len(eligible))
        for m, u in zip(eligible, draws):
            if u < gamma:
                send(node, m, h + 1, "gossip")

    answered = [m for m in processed if graph.holders[m]]
    return DisseminationOutcome(
        hits=len(answered),
        reached=len(processed),
        messages=messages,
        answered_nodes=frozenset(answered),
        processed=tuple(processed),
        trace=tuple(log),
    )


@dataclass(frozen=True)
class QueryStats:
    """Per-query samples from :func:`run_queries` with summary accessors."""

    hits: np.ndarray
    reached: np.ndarray
    messages: np.ndarray
    percolated: np.ndarray

    @property
    def query_count(self) -> int:
        return self.hits.size

    @property
    def mean_hits(self) -> float:
        return float(self.hits.mean())

    @property
    def mean_reached(self) -> float:
        return float(self.reached.mean())

    @property
    def mean_messages(self) -> float:
        return float(self.messages.mean())

    @property
    def var_hits(self) -> float:
        return float(self.hits.var())

    @property
    def var_reached(self) -> float:
        return float(self.reached.var())

    @property
    def var_messages(self) -> float:
        return float(self.messages.var())

    @property
    def percolation_fraction(self) -> float:
        return float(self.percolated.mean())

    @classmethod
    def concat(cls, parts) -> "QueryStats":
        parts = list(parts)
        return cls(*(np.concatenate([getattr(p, f) for p in parts]) for f in ("hits", "reached", "messages", "percolated")))


def run_queries(
    graph: OverlayGraph,
    table: KnowledgeTable,
    params: ProtocolParams,
    query_count: int,
    rng_stream,
    trace_sink=None,
    query_offset: int = 0,
) -> QueryStats:
    """Disseminate ``query_count`` queries from uniformly random originators.

    Originators are drawn from ``rng_stream``; each query then gets its own
    child stream (``Generator.spawn``) for gossip draws. A query counts as
    percolated when it reaches at least half of the largest component.

    If ``trace_sink`` is given, every :class:`Delivery` is passed to it, with
    query ids numbered from ``query_offset``. Results are identical either
    way.
    """
    if query_count < 1:
        raise ValueError("query_count must be at least 1")
    _check(graph, table, params, 0)
    rng = as_generator(rng_stream)
    n = graph.node_count
    ttl = _resolve_ttl(graph, params)
    origins = rng.integers(n, size=query_count)
    children = rng.spawn(query_count)
    giant = largest_component(graph).size

    mark = np.zeros(n, np.int64)
    queue = np.empty(n, np.int64)
    sender = np.empty(n, np.int64)
    hop = np.empty(n, np.int64)
    hits = np.empty(query_count, np.int64)
    reached = np.empty(query_count, np.int64)
    messages = np.empty(query_count, np.int64)
    gamma = float(params.gamma)
    for q in range(query_count):
        if trace_sink is not None:
            out = _disseminate_traced(
                graph, table, gamma, int(origins[q]), ttl, children[q], query_offset + q
            )
            for d in out.trace:
                trace_sink(d)
            hits[q], reached[q], messages[q] = out.hits, out.reached, out.messages
            continue
        r, m = _kernels.spread(
            graph.indptr, graph.indices, table.relay_mask, int(origins[q]), ttl, gamma,
            children[q], mark, q + 1, queue, sender, hop,
        )
        reached[q] = r
        messages[q] = m
        hits[q] = np.count_nonzero(graph.holders[queue[:r]])
    return QueryStats(hits, reached, messages, reached >= 0.5 * giant)
