"""Pure-Python graph kernels.

Reference implementations of the hot loops in ``_kernels.pyx``.  They accept
plain sequences of Python numbers (ints of any size, floats, Fractions), so
they double as the big-integer path when scaled weights overflow int64.
"""

import heapq

BACKEND = "python"


def strong_components(n, indptr, indices):
    """Iterative Tarjan.  Component ids are assigned sinks-first."""
    index = [-1] * n
    low = [0] * n
    onstack = [False] * n
    comp = [-1] * n
    stack = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, indptr[root])]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack[root] = True
        while work:
            v, pos = work[-1]
            end = indptr[v + 1]
            advanced = False
            while pos < end:
                w = indices[pos]
                pos += 1
                if index[w] == -1:
                    work[-1] = (v, pos)
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack[w] = True
                    work.append((w, indptr[w]))
                    advanced = True
                    break
                if onstack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
    return comp


def min_mean_cycle(n, src, dst, w):
    """Karp's minimum cycle mean.

    Walks start anywhere (a virtual source with zero edges to every vertex),
    so the graph need not be strongly connected.  Returns ``(num, den)`` with the mean equal to ``num / den``.  For integer
    weights both parts are integers and the comparison is exact.
    """
    m = len(src)
    rows = [[None] * n for _ in range(n + 1)]
    rows[0] = [0] * n
    for k in range(1, n + 1):
        prev = rows[k - 1]
        cur = rows[k]
        for e in range(m):
            du = prev[src[e]]
            if du is None:
                continue
            cand = du + w[e]
            v = dst[e]
            if cur[v] is None or cand < cur[v]:
                cur[v] = cand
    best = None
    last = rows[n]
    for v in range(n):
        if last[v] is None:
            continue
        worst = None
        for k in range(n):
            dk = rows[k][v]
            if dk is None:
                continue
            num, den = last[v] - dk, n - k
            if worst is None or num * worst[1] > worst[0] * den:
                worst = (num, den)
        if worst is not None and (best is None or worst[0] * best[1] < best[0] * worst[1]):
            best = worst
    return best


def longest_from(n, src, dst, w, init, tol=0):
    """Longest walk value ``f(u) = max(init(u), w(u->v) + f(v))``.

    Returns ``(values, None)`` on convergence, or ``(None, cycle)`` where
    ``cycle`` is a list of edge indices forming a positive cycle.
    """
    f = list(init)
    pred = [-1] * n
    m = len(src)
    changed_vertex = -1
    for _ in range(n + 1):
        changed_vertex = -1
        for e in range(m):
            s = src[e]
            cand = w[e] + f[dst[e]]
            if cand > f[s] + tol:
                f[s] = cand
                pred[s] = e
                changed_vertex = s
        if changed_vertex == -1:
            return f, None
    v = changed_vertex
    for _ in range(n):
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


def min_cycle_through(n, src, dst, w, mask):
    """Minimum weight of a closed walk through some vertex with ``mask`` set.

    Weights must be nonnegative.  Returns ``(best, vertex)`` or
    ``(None, -1)`` when no masked vertex lies on a cycle.
    """
    out = [[] for _ in range(n)]
    into = [[] for _ in range(n)]
    for e in range(len(src)):
        out[src[e]].append(e)
        into[dst[e]].append(e)
    best, best_v = None, -1
    for s in range(n):
        if not mask[s] or not into[s]:
            continue
        dist = {s: 0}
        heap = [(0, s)]
        done = set()
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            if best is not None and d >= best:
                break
            done.add(u)
            for e in out[u]:
                v = dst[e]
                nd = d + w[e]
                if v == s:
                    if best is None or nd < best:
                        best, best_v = nd, s
                    continue
                if v not in dist or nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
    return best, best_v
