# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels; signatures mirror ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t i64


def hopcroft_karp(Py_ssize_t n, indptr, indices):
    cdef const i64[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    out_arr = np.full(n, -1, dtype=np.int64)
    in_arr = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] match_out = out_arr
    cdef i64[::1] match_in = in_arr
    if n == 0:
        return out_arr, in_arr

    cdef i64 inf = n + 2
    cdef i64 *dist = <i64 *> malloc(n * sizeof(i64))
    cdef i64 *it = <i64 *> malloc(n * sizeof(i64))
    cdef i64 *queue = <i64 *> malloc(n * sizeof(i64))
    cdef i64 *stack = <i64 *> malloc(n * sizeof(i64))
    cdef i64 *via = <i64 *> malloc(n * sizeof(i64))
    cdef i64 head, tail, u, v, w, e, dist_nil, root, top, sp, k
    try:
        while True:
            head = 0
            tail = 0
            for u in range(n):
                if match_out[u] == -1:
                    dist[u] = 0
                    queue[tail] = u
                    tail += 1
                else:
                    dist[u] = inf
            dist_nil = inf
            while head < tail:
                u = queue[head]
                head += 1
                if dist[u] >= dist_nil:
                    continue
                for e in range(ptr[u], ptr[u + 1]):
                    w = match_in[idx[e]]
                    if w == -1:
                        if dist_nil == inf:
                            dist_nil = dist[u] + 1
                    elif dist[w] == inf:
                        dist[w] = dist[u] + 1
                        queue[tail] = w
                        tail += 1
            if dist_nil == inf:
                break

            for u in range(n):
                it[u] = ptr[u]
            for root in range(n):
                if match_out[root] != -1:
                    continue
                sp = 1
                stack[0] = root
                while sp > 0:
                    top = stack[sp - 1]
                    if it[top] == ptr[top + 1]:
                        dist[top] = inf
                        sp -= 1
                        continue
                    v = idx[it[top]]
                    it[top] += 1
                    w = match_in[v]
                    if w == -1:
                        if dist[top] + 1 == dist_nil:
                            via[sp - 1] = v
                            for k in range(sp):
                                match_out[stack[k]] = via[k]
                                match_in[via[k]] = stack[k]
                            break
                    elif dist[w] == dist[top] + 1:
                        via[sp - 1] = v
                        stack[sp] = w
                        sp += 1
    finally:
        free(dist)
        free(it)
        free(queue)
        free(stack)
        free(via)
    return out_arr, in_arr


def bfs_layers(Py_ssize_t n, indptr, indices, sources):
    cdef const i64[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const i64[::1] src = np.sort(np.asarray(sources, dtype=np.int64))
    depth_arr = np.zeros(n, dtype=np.int64)
    count_arr = np.zeros(n, dtype=np.float64)
    parent_arr = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] depth = depth_arr
    cdef double[::1] count = count_arr
    cdef i64[::1] parent = parent_arr
    queue_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef i64[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0, k
    cdef i64 s, u, v, e, du
    for k in range(src.shape[0]):
        s = src[k]
        if depth[s] == 0:
            depth[s] = 1
            count[s] = 1.0
            queue[tail] = s
            tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = depth[u]
        for e in range(ptr[u], ptr[u + 1]):
            v = idx[e]
            if depth[v] == 0:
                depth[v] = du + 1
                count[v] = count[u]
                parent[v] = u
                queue[tail] = v
                tail += 1
            elif depth[v] == du + 1:
                count[v] += count[u]
    return depth_arr, count_arr, parent_arr


def max_finite_distance(Py_ssize_t n, indptr, indices):
    cdef const i64[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    if n == 0:
        return 0
    dist_arr = np.empty(n, dtype=np.int64)
    queue_arr = np.empty(n, dtype=np.int64)
    cdef i64[::1] dist = dist_arr
    cdef i64[::1] queue = queue_arr
    cdef i64 best = 0, s, u, v, e, du
    cdef Py_ssize_t head, tail, k
    for s in range(n):
        for k in range(n):
            dist[k] = -1
        dist[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u] + 1
            for e in range(ptr[u], ptr[u + 1]):
                v = idx[e]
                if dist[v] < 0:
                    dist[v] = du
                    if du > best:
                        best = du
                    queue[tail] = v
                    tail += 1
    return int(best)
