# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels.

Same contracts as ``_pykernels``; weights arrive as int64 (exact, already
scaled to a common denominator) or float64 arrays.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()

BACKEND = "cython"

ctypedef fused num_t:
    int64_t
    double


def strong_components(Py_ssize_t n, const int64_t[:] indptr, const int64_t[:] indices):
    cdef int64_t[:] index = np.full(n, -1, dtype=np.int64)
    cdef int64_t[:] low = np.zeros(n, dtype=np.int64)
    cdef char[:] onstack = np.zeros(n, dtype=np.int8)
    cdef int64_t[:] comp = np.full(n, -1, dtype=np.int64)
    cdef int64_t[:] stack = np.empty(n, dtype=np.int64)
    cdef int64_t[:] work_v = np.empty(n, dtype=np.int64)
    cdef int64_t[:] work_pos = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t sp = 0, wp = 0, root, v, w, u, pos, end
    cdef int64_t counter = 0, ncomp = 0
    cdef bint advanced
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        onstack[root] = 1
        work_v[wp] = root
        work_pos[wp] = indptr[root]
        wp += 1
        while wp > 0:
            v = work_v[wp - 1]
            pos = work_pos[wp - 1]
            end = indptr[v + 1]
            advanced = False
            while pos < end:
                w = indices[pos]
                pos += 1
                if index[w] == -1:
                    work_pos[wp - 1] = pos
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    onstack[w] = 1
                    work_v[wp] = w
                    work_pos[wp] = indptr[w]
                    wp += 1
                    advanced = True
                    break
                if onstack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            wp -= 1
            if low[v] == index[v]:
                while True:
                    sp -= 1
                    w = stack[sp]
                    onstack[w] = 0
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if wp > 0:
                u = work_v[wp - 1]
                if low[v] < low[u]:
                    low[u] = low[v]
    return np.asarray(comp).tolist()


def min_mean_cycle(Py_ssize_t n, const int64_t[:] src, const int64_t[:] dst, num_t[:] w):
    cdef Py_ssize_t m = src.shape[0], k, e, v
    cdef num_t[:, :] rows
    cdef char[:, :] seen = np.zeros((n + 1, n), dtype=np.int8)
    cdef num_t cand, num, wnum, bnum
    cdef int64_t den, wden, bden
    cdef bint have_best = False, have_worst
    if num_t is int64_t:
        rows = np.zeros((n + 1, n), dtype=np.int64)
    else:
        rows = np.zeros((n + 1, n), dtype=np.float64)
    seen[0, :] = 1
    for k in range(1, n + 1):
        for e in range(m):
            if not seen[k - 1, src[e]]:
                continue
            cand = rows[k - 1, src[e]] + w[e]
            v = dst[e]
            if not seen[k, v] or cand < rows[k, v]:
                rows[k, v] = cand
                seen[k, v] = 1
    bnum = 0
    bden = 1
    for v in range(n):
        if not seen[n, v]:
            continue
        have_worst = False
        wnum = 0
        wden = 1
        for k in range(n):
            if not seen[k, v]:
                continue
            num = rows[n, v] - rows[k, v]
            den = n - k
            if not have_worst or num * wden > wnum * den:
                wnum = num
                wden = den
                have_worst = True
        if have_worst and (not have_best or wnum * bden < bnum * wden):
            bnum = wnum
            bden = wden
            have_best = True
    if not have_best:
        return None
    return (bnum, bden)


def longest_from(Py_ssize_t n, const int64_t[:] src, const int64_t[:] dst, num_t[:] w,
                 num_t[:] init, double tol=0.0):
    cdef Py_ssize_t m = src.shape[0], e, s, it, v, u
    cdef num_t[:] f = init.copy()
    cdef int64_t[:] pred = np.full(n, -1, dtype=np.int64)
    cdef num_t cand
    cdef Py_ssize_t changed = -1
    for it in range(n + 1):
        changed = -1
        for e in range(m):
            s = src[e]
            cand = w[e] + f[dst[e]]
            if num_t is int64_t:
                if cand > f[s]:
                    f[s] = cand
                    pred[s] = e
                    changed = s
            else:
                if cand > f[s] + tol:
                    f[s] = cand
                    pred[s] = e
                    changed = s
        if changed == -1:
            return np.asarray(f), None
    v = changed
    for it in range(n):
        v = dst[pred[v]]
    cycle = []
    u = v
    while True:
        e = pred[u]
        cycle.append(e)
        u = dst[e]
        if u == v:
            break
    return None, cycle


cdef inline void _heap_push(num_t[:] keys, int64_t[:] vals, Py_ssize_t *size,
                            num_t key, int64_t val) noexcept:
    cdef Py_ssize_t i = size[0], parent
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if keys[parent] <= key:
            break
        keys[i] = keys[parent]
        vals[i] = vals[parent]
        i = parent
    keys[i] = key
    vals[i] = val


cdef inline void _heap_pop(num_t[:] keys, int64_t[:] vals, Py_ssize_t *size) noexcept:
    cdef Py_ssize_t n = size[0] - 1, i = 0, child
    cdef num_t key = keys[n]
    cdef int64_t val = vals[n]
    size[0] = n
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and keys[child + 1] < keys[child]:
            child += 1
        if keys[child] >= key:
            break
        keys[i] = keys[child]
        vals[i] = vals[child]
        i = child
    if n > 0:
        keys[i] = key
        vals[i] = val


def min_cycle_through(Py_ssize_t n, const int64_t[:] src, const int64_t[:] dst, num_t[:] w,
                      const char[:] mask):
    cdef Py_ssize_t m = src.shape[0], e, s, u, v, size, i
    cdef int64_t[:] out_ptr = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[:] out_idx = np.empty(m, dtype=np.int64)
    cdef int64_t[:] fill = np.zeros(n, dtype=np.int64)
    cdef char[:] has_in = np.zeros(n, dtype=np.int8)
    cdef char[:] done = np.zeros(n, dtype=np.int8)
    cdef char[:] reached = np.zeros(n, dtype=np.int8)
    cdef num_t[:] dist
    cdef num_t[:] keys
    cdef int64_t[:] vals = np.empty(m + n + 1, dtype=np.int64)
    cdef num_t d, nd, best = 0
    cdef bint have_best = False
    cdef int64_t best_v = -1
    if num_t is int64_t:
        dist = np.zeros(n, dtype=np.int64)
        keys = np.zeros(m + n + 1, dtype=np.int64)
    else:
        dist = np.zeros(n, dtype=np.float64)
        keys = np.zeros(m + n + 1, dtype=np.float64)
    for e in range(m):
        out_ptr[src[e] + 1] += 1
        has_in[dst[e]] = 1
    for u in range(n):
        out_ptr[u + 1] += out_ptr[u]
    for e in range(m):
        u = src[e]
        out_idx[out_ptr[u] + fill[u]] = e
        fill[u] += 1
    for s in range(n):
        if not mask[s] or not has_in[s]:
            continue
        for u in range(n):
            done[u] = 0
            reached[u] = 0
        size = 0
        dist[s] = 0
        reached[s] = 1
        _heap_push(keys, vals, &size, dist[s], s)
        while size > 0:
            d = keys[0]
            u = vals[0]
            _heap_pop(keys, vals, &size)
            if done[u] or d > dist[u]:
                continue
            if have_best and d >= best:
                break
            done[u] = 1
            for i in range(out_ptr[u], out_ptr[u + 1]):
                e = out_idx[i]
                v = dst[e]
                nd = d + w[e]
                if v == s:
                    if not have_best or nd < best:
                        best = nd
                        best_v = s
                        have_best = True
                    continue
                if not reached[v] or nd < dist[v]:
                    dist[v] = nd
                    reached[v] = 1
                    if size < keys.shape[0]:
                        _heap_push(keys, vals, &size, nd, v)
    if not have_best:
        return None, -1
    return best, best_v
