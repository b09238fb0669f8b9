"""Pure-Python graph kernels.

Reference implementation of the routines in ``_kernels.pyx``.  Both take the
out-adjacency in CSR form (``indptr``, ``indices``; neighbours sorted
ascending) and return plain numpy arrays, so callers cannot tell them apart.
"""
from collections import deque

import numpy as np


def hopcroft_karp(n, indptr, indices):
    """Maximum bipartite matching between out-copies and in-copies.

    Returns ``(match_out, match_in)``: ``match_out[u] = v`` when edge u->v is
    matched, ``-1`` otherwise; ``match_in`` is the inverse map.
    """
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    match_out = [-1] * n
    match_in = [-1] * n
    inf = n + 2
    dist = [0] * n
    it = [0] * n

    while True:
        # BFS layering from free out-copies
        queue = deque()
        for u in range(n):
            if match_out[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        dist_nil = inf
        while queue:
            u = queue.popleft()
            if dist[u] >= dist_nil:
                continue
            for e in range(indptr[u], indptr[u + 1]):
                w = match_in[indices[e]]
                if w == -1:
                    if dist_nil == inf:
                        dist_nil = dist[u] + 1
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if dist_nil == inf:
            break

        for u in range(n):
            it[u] = indptr[u]
        for root in range(n):
            if match_out[root] != -1:
                continue
            stack = [root]
            via = []
            while stack:
                top = stack[-1]
                if it[top] == indptr[top + 1]:
                    dist[top] = inf
                    stack.pop()
                    if via:
                        via.pop()
                    continue
                v = indices[it[top]]
                it[top] += 1
                w = match_in[v]
                if w == -1:
                    if dist[top] + 1 == dist_nil:
                        via.append(v)
                        for node, target in zip(stack, via):
                            match_out[node] = target
                            match_in[target] = node
                        break
                elif dist[w] == dist[top] + 1:
                    stack.append(w)
                    via.append(v)

    return np.asarray(match_out, dtype=np.int64), np.asarray(match_in, dtype=np.int64)


def bfs_layers(n, indptr, indices, sources):
    """Multi-source BFS along edge directions.

    Returns ``(depth, count, parent)``.  ``depth`` is counted in nodes (a
    source has depth 1, unreachable nodes 0); ``count`` is the number of
    distinct shortest source->node paths (float, may be large); ``parent``
    is the first predecessor found in ascending order, ``-1`` for sources.
    """
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    depth = [0] * n
    count = [0.0] * n
    parent = [-1] * n
    queue = deque()
    for s in sorted(int(s) for s in sources):
        if depth[s] == 0:
            depth[s] = 1
            count[s] = 1.0
            queue.append(s)
    while queue:
        u = queue.popleft()
        du = depth[u]
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if depth[v] == 0:
                depth[v] = du + 1
                count[v] = count[u]
                parent[v] = u
                queue.append(v)
            elif depth[v] == du + 1:
                count[v] += count[u]
    return (np.asarray(depth, dtype=np.int64), np.asarray(count, dtype=np.float64),
            np.asarray(parent, dtype=np.int64))


def max_finite_distance(n, indptr, indices):
    """Largest finite shortest-path edge distance over ordered node pairs."""
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    best = 0
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if dist[v] < 0:
                    dist[v] = du
                    if du > best:
                        best = du
                    queue.append(v)
    return best
