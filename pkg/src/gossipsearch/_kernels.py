"""Compiled inner loops for knowledge construction and dissemination."""

import numpy as np
from numba import njit


@njit(cache=True)
def scan_knowledge(indptr, indices, holders, k, fill, ptr, holder_out, next_out, dist_out):
    # Depth-limited BFS from every node. Neighbors are seeded in increasing
    # order, so the first discovery of a node carries the smallest first hop
    # among its shortest paths.
    n = indptr.size - 1
    seen = np.full(n, -1, np.int64)
    hop = np.zeros(n, np.int64)
    via = np.zeros(n, np.int64)
    queue = np.empty(n, np.int64)
    counts = np.zeros(n, np.int64)
    for s in range(n):
        if k < 1:
            continue
        seen[s] = s
        tail = 0
        for e in range(indptr[s], indptr[s + 1]):
            v = indices[e]
            seen[v] = s
            hop[v] = 1
            via[v] = v
            queue[tail] = v
            tail += 1
        head = 0
        while head < tail:
            u = queue[head]
            head += 1
            if hop[u] >= k:
                continue
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if seen[v] != s:
                    seen[v] = s
                    hop[v] = hop[u] + 1
                    via[v] = via[u]
                    queue[tail] = v
                    tail += 1
        c = 0
        for t in range(tail):
            v = queue[t]
            if holders[v]:
                if fill:
                    pos = ptr[s] + c
                    holder_out[pos] = v
                    next_out[pos] = via[v]
                    dist_out[pos] = hop[v]
                c += 1
        counts[s] = c
    return counts


@njit(cache=True)
def spread(indptr, indices, relay_mask, originator, ttl, gamma, rng, mark, stamp, queue, sender, hop):
    """Hop-synchronous dissemination of one query.

    Returns ``(reached, messages)``; the processed nodes are
    ``queue[:reached]`` in processing order.
    """
    mark[originator] = stamp
    queue[0] = originator
    sender[0] = -1
    hop[0] = 0
    head = 0
    tail = 1
    messages = 0
    while head < tail:
        n = queue[head]
        s = sender[head]
        h = hop[head]
        head += 1
        if h >= ttl:
            continue
        for e in range(indptr[n], indptr[n + 1]):
            if relay_mask[e]:
                m = indices[e]
                if m != s:
                    messages += 1
                    if mark[m] != stamp:
                        mark[m] = stamp
                        queue[tail] = m
                        sender[tail] = n
                        hop[tail] = h + 1
                        tail += 1
        for e in range(indptr[n], indptr[n + 1]):
            if not relay_mask[e]:
                m = indices[e]
                if m != s:
                    if rng.random() < gamma:
                        messages += 1
                        if mark[m] != stamp:
                            mark[m] = stamp
                            queue[tail] = m
                            sender[tail] = n
                            hop[tail] = h + 1
                            tail += 1
    return tail, messages
