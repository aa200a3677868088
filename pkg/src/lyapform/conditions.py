"""Conditions (A) and (B), drift certificates and Fried's criterion.

(A) asks that the class vanish on the twisted recurrent set: every closed
walk inside ``R_xi`` has weight zero.  (B) asks for a uniform negative bound
on closed walks through ``C_xi``; the bound ``b`` is reported together with
the scaling ``s = 1/b`` that brings it to the normalised ``<= -1``.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import kernels
from .errors import NotApplicable
from .forms import Cochain1, CycleBasis
from .transition import RecurrenceReport, TransitionGraph
from .twisted import SignClass, default_eta


@dataclass(frozen=True)
class WalkWitness:
    """Closed walk ``prefix + loop * repeats + suffix`` (edge indices)."""

    prefix: tuple
    loop: tuple
    repeats: int
    suffix: tuple
    weight: object

    def edges(self) -> list[int]:
        return list(self.prefix) + list(self.loop) * self.repeats + list(self.suffix)

    @property
    def length(self) -> int:
        return len(self.prefix) + len(self.loop) * self.repeats + len(self.suffix)


@dataclass(frozen=True)
class ConditionA:
    holds: bool
    potential: Optional[dict] = None
    violation: Optional[WalkWitness] = None


@dataclass(frozen=True)
class ConditionB:
    holds: bool
    b: Optional[object] = None
    s: Optional[object] = None
    witness: Optional[WalkWitness] = None
    vertex: Optional[int] = None


@dataclass(frozen=True)
class DriftCertificate:
    """Walks of ``n`` edges inside ``C_xi`` weigh at most ``-mu*n + nu``.

    ``mu``/``nu`` are the empirical constants for the raw class; the
    ``*_paper`` fields are the analytic constants for the class scaled by
    ``s`` (so every cycle through ``C_xi`` weighs at most -1), with one edge
    as the time unit.
    """

    mu: object
    nu: object
    k: int
    T: int
    M: object
    eta: object
    c: object
    s: object
    mu_paper: object
    nu_paper: object
    T_paper: int


@dataclass(frozen=True)
class FriedReport:
    per_scc: dict
    max_normalized: Optional[float]
    verdict: bool
    samples: int
    worst: Optional[WalkWitness] = None


@dataclass(frozen=True)
class NecessityReport:
    applicable: bool
    holds: bool
    c: Optional[object] = None
    b_implied: Optional[object] = None
    b_observed: Optional[object] = None


@dataclass(frozen=True)
class ConditionsReport:
    a: ConditionA
    b: ConditionB
    c_xi_closed: bool
    drift: Optional[DriftCertificate] = None
    fried: Optional[FriedReport] = None

    @property
    def condition_a(self) -> bool:
        return self.a.holds

    @property
    def condition_b(self) -> bool:
        return self.b.holds


# -- small graph helpers ------------------------------------------------------


def _zero(xi: Cochain1):
    return Fraction(0) if xi.exact else 0.0


def r_xi_pieces(graph: TransitionGraph, r_xi) -> tuple[list[list[int]], list[int]]:
    """SCCs of the ``R_xi``-induced subgraph that carry an edge, and the
    edges inside them (the ``R_xi``-internal edges)."""
    r = sorted(r_xi)
    if not r:
        return [], []
    loc = {v: i for i, v in enumerate(r)}
    cand = [e for e in range(graph.m)
            if int(graph.src[e]) in loc and int(graph.dst[e]) in loc]
    s = [loc[int(graph.src[e])] for e in cand]
    d = [loc[int(graph.dst[e])] for e in cand]
    comp = kernels.strong_components(len(r), s, d)
    internal = [e for e, a, b in zip(cand, s, d) if comp[a] == comp[b]]
    groups: dict[int, set[int]] = {}
    for e in internal:
        groups.setdefault(comp[loc[int(graph.src[e])]], set()).add(int(graph.src[e]))
    return [sorted(g) for _, g in sorted(groups.items())], internal


def _edges_within(graph: TransitionGraph, verts) -> list[int]:
    vs = set(verts)
    return [e for v in sorted(vs) for e in graph.out_edges(v).tolist() if int(graph.dst[e]) in vs]


def _bfs_path(graph: TransitionGraph, allowed: set[int], s: int, t: int) -> Optional[list[int]]:
    """Fewest-edge walk ``s -> t`` using ``allowed`` edges (empty if s == t)."""
    if s == t:
        return []
    prev = {s: -1}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for e in graph.out_edges(u).tolist():
            if e not in allowed:
                continue
            v = int(graph.dst[e])
            if v not in prev:
                prev[v] = e
                if v == t:
                    path = []
                    while v != s:
                        e = prev[v]
                        path.append(e)
                        v = int(graph.src[e])
                    return path[::-1]
                queue.append(v)
    return None


def _weight(xi: Cochain1, edges) -> object:
    total = _zero(xi)
    for e in edges:
        total += xi.weights[e]
    return total


def _cycle_from_kernel(graph, edges_local, cyc_local):
    return [edges_local[i] for i in cyc_local]


def _positive_cycle(graph, xi, edges, sign=1, tol=0.0):
    """A cycle of positive ``sign * xi`` weight among ``edges``, or None."""
    verts = sorted({int(graph.src[e]) for e in edges} | {int(graph.dst[e]) for e in edges})
    loc = {v: i for i, v in enumerate(verts)}
    s = [loc[int(graph.src[e])] for e in edges]
    d = [loc[int(graph.dst[e])] for e in edges]
    w = [sign * xi.weights[e] for e in edges]
    pot, cyc = kernels.longest_from(len(verts), s, d, w, tol=tol)
    if pot is not None:
        return None, (verts, loc, s, d, w, pot)
    return _order_cycle(graph, [edges[i] for i in cyc]), None


def _order_cycle(graph, cyc: list[int]) -> list[int]:
    """Arrange cycle edges head to tail."""
    by_src = {int(graph.src[e]): e for e in cyc}
    start = cyc[0]
    out = [start]
    v = int(graph.dst[start])
    while v != int(graph.src[start]):
        e = by_src[v]
        out.append(e)
        v = int(graph.dst[e])
    return out


def _through(graph, xi, allowed: set[int], loop: list[int], v: int) -> WalkWitness:
    """Closed walk through ``v`` repeating ``loop`` until its weight is > 0."""
    a = int(graph.src[loop[0]])
    pre = _bfs_path(graph, allowed, v, a)
    suf = _bfs_path(graph, allowed, a, v)
    base = _weight(xi, pre) + _weight(xi, suf)
    c = _weight(xi, loop)
    k = 1 if base > 0 else int(math.floor(-base / c)) + 1
    return WalkWitness(tuple(pre), tuple(loop), k, tuple(suf), base + k * c)


# -- (A) ----------------------------------------------------------------------


def check_condition_a(graph: TransitionGraph, xi: Cochain1, r_xi,
                      eta_zero: Optional[float] = None) -> ConditionA:
    """Every closed walk inside ``R_xi`` has weight zero.

    Checked per strongly connected piece of the ``R_xi``-induced subgraph:
    no cycle of positive and none of negative weight.  The witness is a
    potential ``g`` on ``R_xi`` with ``dg = xi`` on every internal edge.
    """
    eta = default_eta(xi) if eta_zero is None else eta_zero
    tol = 0.0 if xi.exact else eta
    pieces, internal = r_xi_pieces(graph, r_xi)
    by_piece: dict[int, list[int]] = {}
    where = {v: i for i, p in enumerate(pieces) for v in p}
    for e in internal:
        by_piece.setdefault(where[int(graph.src[e])], []).append(e)
    for i in sorted(by_piece):
        edges = by_piece[i]
        for sign in (1, -1):
            cyc, _ = _positive_cycle(graph, xi, edges, sign, tol)
            if cyc is not None:
                return ConditionA(False, violation=WalkWitness((), tuple(cyc), 1, (), _weight(xi, cyc)))
    basis = CycleBasis(graph, internal)
    pot = basis.tree_potential(xi.weights)
    zero = _zero(xi)
    g = {v: pot.get(v, zero) for v in sorted(r_xi)}
    return ConditionA(True, potential=g)


# -- (B) ----------------------------------------------------------------------


def check_condition_b(graph: TransitionGraph, xi: Cochain1, report: RecurrenceReport,
                      eta_zero: Optional[float] = None) -> ConditionB:
    """Uniform negative bound on closed walks through ``C_xi`` vertices.

    For each SCC meeting ``C_xi``: a positive cycle anywhere in it yields an
    unbounded walk through every vertex (refusal with a constructed
    witness).  Otherwise a feasible potential turns weights into
    nonpositive slacks and the cheapest cycle through a ``C_xi`` vertex
    gives ``b``.
    """
    if report.c_xi is None:
        raise ValueError("run compute_r_xi first")
    eta = default_eta(xi) if eta_zero is None else eta_zero
    tol = 0.0 if xi.exact else eta
    c_xi = report.c_xi
    best_b = None
    best_v = None
    for cid in report.nontrivial_ids():
        verts = report.components[cid]
        targets = [v for v in verts if v in c_xi]
        if not targets:
            continue
        edges = _edges_within(graph, verts)
        cyc, data = _positive_cycle(graph, xi, edges, 1, tol)
        if cyc is not None:
            wit = _through(graph, xi, set(edges), cyc, targets[0])
            return ConditionB(False, witness=wit, vertex=targets[0])
        lverts, loc, s, d, w, pot = data
        slack = [-(x + pot[b] - pot[a]) for a, b, x in zip(s, d, w)]
        if not xi.exact:
            slack = [max(0.0, x) for x in slack]
        mask = [v in c_xi for v in lverts]
        val, lv = kernels.min_cycle_through(len(lverts), s, d, slack, mask)
        if val is None:  # pragma: no cover - SCC vertices lie on cycles
            continue
        if best_b is None or val < best_b:
            best_b, best_v = val, lverts[lv]
    if best_b is None:
        return ConditionB(True, None, None)
    if best_b <= (0 if xi.exact else eta):
        # a zero cycle through a C_xi vertex contradicts the R_xi split
        return ConditionB(False, b=best_b, vertex=best_v)
    s_val = 1 / best_b if isinstance(best_b, Fraction) else 1.0 / best_b
    return ConditionB(True, best_b, s_val, vertex=best_v)


def check_c_xi_closed(report: RecurrenceReport) -> bool:
    """No SCC contains both ``R_xi`` and ``C_xi`` vertices."""
    r = report.r_xi or frozenset()
    for cid in report.nontrivial_ids():
        inside = [v in r for v in report.components[cid]]
        if any(inside) and not all(inside):
            return False
    return True


# -- drift --------------------------------------------------------------------


def paper_mu(k: int, T: int) -> Fraction:
    return Fraction(1, 2 * k * T)


def paper_nu(k: int, M) -> object:
    return (2 * k - 1) * M + Fraction(1, 2)


def paper_T(eta, c) -> int:
    return int(math.floor((1 + eta) / c)) + 2


def c_xi_edges(graph: TransitionGraph, c_xi) -> list[int]:
    return [e for e in range(graph.m) if int(graph.src[e]) in c_xi and int(graph.dst[e]) in c_xi]


def drift_certificate(graph: TransitionGraph, xi: Cochain1, report: RecurrenceReport,
                      cond_b: Optional[ConditionB] = None) -> DriftCertificate:
    """Constants ``mu > 0``, ``nu >= 0`` with ``sum_{n edges} w <= -mu n + nu``
    for walks inside the ``C_xi``-induced subgraph."""
    cond_b = cond_b or check_condition_b(graph, xi, report)
    if not cond_b.holds:
        raise NotApplicable("condition (B) fails; no drift certificate")
    c_xi = sorted(report.c_xi)
    edges = c_xi_edges(graph, report.c_xi)
    exact = xi.exact
    loc = {v: i for i, v in enumerate(c_xi)}
    s = [loc[int(graph.src[e])] for e in edges]
    d = [loc[int(graph.dst[e])] for e in edges]
    w = [xi.weights[e] for e in edges]
    max_mean = None
    if edges:
        neg = kernels.min_mean_cycle(len(c_xi), s, d, [-x for x in w])
        max_mean = None if neg is None else -neg
    if max_mean is None:
        mu = cond_b.b if cond_b.b is not None else (Fraction(1) if exact else 1.0)
    else:
        mu = -max_mean
    pot, cyc = kernels.longest_from(len(c_xi), s, d, [x + mu for x in w],
                                    tol=0.0 if exact else default_eta(xi))
    if pot is None:  # pragma: no cover - mu is the exact max mean
        raise NotApplicable("drift potential diverged")
    nu = max(pot, default=Fraction(0) if exact else 0.0)

    # analytic constants for s * xi, one edge per time unit
    k = max(1, len(c_xi))
    s_val = cond_b.s if cond_b.s is not None else (Fraction(1) if exact else 1.0)
    M = max((abs(x) * s_val for x in w), default=Fraction(0) if exact else 0.0)
    c = mu * s_val
    eta = M
    return DriftCertificate(mu=mu, nu=nu, k=k, T=1, M=M, eta=eta, c=c, s=s_val,
                            mu_paper=paper_mu(k, 1), nu_paper=paper_nu(k, M),
                            T_paper=paper_T(eta, c) if c > 0 else 0)


def sample_walks(graph: TransitionGraph, vertices, count: int, length: int,
                 seed: int = 0) -> list[list[int]]:
    """Uniform random walks that stay inside ``vertices`` (stopping early at
    vertices with no such out-edge)."""
    rng = random.Random(seed)
    vs = sorted(vertices)
    allowed = set(vs)
    outs = {v: [e for e in graph.out_edges(v).tolist() if int(graph.dst[e]) in allowed] for v in vs}
    walks = []
    for _ in range(count if vs else 0):
        v = rng.choice(vs)
        walk = []
        for _ in range(length):
            if not outs[v]:
                break
            e = rng.choice(outs[v])
            walk.append(e)
            v = int(graph.dst[e])
        walks.append(walk)
    return walks


def validate_drift(graph: TransitionGraph, xi: Cochain1, report: RecurrenceReport,
                   cert: DriftCertificate, count: int = 1000, length: int = 64,
                   seed: int = 0) -> dict:
    """Count prefix violations of both the empirical and the analytic bound."""
    walks = sample_walks(graph, report.c_xi, count, length, seed)
    emp = paper = 0
    for walk in walks:
        total = _zero(xi)
        for n, e in enumerate(walk, 1):
            total += xi.weights[e]
            if total > -cert.mu * n + cert.nu:
                emp += 1
                break
        total = _zero(xi)
        for n, e in enumerate(walk, 1):
            total += xi.weights[e] * cert.s
            if total > -cert.mu_paper * n + cert.nu_paper:
                paper += 1
                break
    return {"walks": len(walks), "empirical_violations": emp, "paper_violations": paper}


def necessity_check(graph: TransitionGraph, xi: Cochain1, omega: Cochain1,
                    report: RecurrenceReport) -> NecessityReport:
    """Graph form of the necessity argument for (B).

    If ``omega`` (cohomologous to ``xi``) descends by at least ``c > 0`` on
    every edge outside the ``R_xi``-internal set and ``C_xi`` is a union of
    SCCs, each closed walk through ``C_xi`` weighs at most ``-c``, so (B)
    holds with ``b >= c``.
    """
    if not check_c_xi_closed(report):
        return NecessityReport(False, True)
    _, internal = r_xi_pieces(graph, report.r_xi or ())
    internal = set(internal)
    outside = [omega.weights[e] for e in range(graph.m) if e not in internal]
    if not outside or max(outside) >= 0:
        return NecessityReport(False, True)
    c = -max(outside)
    cond = check_condition_b(graph, xi, report)
    observed = cond.b
    holds = cond.holds and (observed is None or observed >= c - (0 if xi.exact else 1e-9))
    return NecessityReport(True, holds, c, c, observed)


# -- Fried --------------------------------------------------------------------


def fried_check(graph: TransitionGraph, xi: Cochain1, report: RecurrenceReport,
                samples: int = 500, seed: int = 0, c_xi=None,
                basis: Optional[CycleBasis] = None) -> FriedReport:
    """Sign of ``<xi, z> / |z|_1`` over directed cycles through ``C_xi``.

    Candidates per SCC meeting ``C_xi``: the directed cycle closing each
    internal chord (at most ``samples`` of them, drawn at random) by a
    shortest return path, random closed walks, and,
    when the SCC holds a positive cycle, a closed walk through a ``C_xi``
    vertex that repeats it.  Norms use coordinates in the fixed basis.
    """
    c_xi = report.c_xi if c_xi is None else frozenset(c_xi)
    basis = basis or CycleBasis(graph)
    rng = random.Random(seed)
    per_scc = {}
    worst = None
    worst_val = None
    total = 0
    tol = 0.0 if xi.exact else default_eta(xi)

    def consider(cid, walk_edges, witness=None):
        nonlocal worst, worst_val, total
        counts: dict[int, int] = {}
        for e in walk_edges:
            counts[e] = counts.get(e, 0) + 1
        z = basis.coordinates(counts)
        norm = z.l1()
        if norm == 0:
            return
        val = float(_weight(xi, walk_edges)) / norm
        total += 1
        if cid not in per_scc or val > per_scc[cid]:
            per_scc[cid] = val
        if worst_val is None or val > worst_val:
            worst_val = val
            worst = witness or WalkWitness((), tuple(walk_edges), 1, (), _weight(xi, walk_edges))

    for cid in report.nontrivial_ids():
        verts = report.components[cid]
        targets = [v for v in verts if v in c_xi]
        if not targets:
            continue
        tset = set(targets)
        edges = _edges_within(graph, verts)
        allowed = set(edges)
        # chord cycles through C_xi
        chords = list(CycleBasis(graph, edges).chords)
        if len(chords) > samples:
            chords = sorted(rng.sample(chords, samples))
        for ch in chords:
            u, v = int(graph.src[ch]), int(graph.dst[ch])
            back = _bfs_path(graph, allowed, v, u)
            cyc = [ch] + back
            if any(int(graph.src[e]) in tset for e in cyc):
                consider(cid, cyc)
        # random closed walks from C_xi vertices
        outs = {x: [e for e in graph.out_edges(x).tolist() if e in allowed] for x in verts}
        for _ in range(max(1, samples // max(1, len(report.nontrivial_ids())))):
            start = rng.choice(targets)
            x, walk = start, []
            for _ in range(4 * len(verts) + 4):
                e = rng.choice(outs[x])
                walk.append(e)
                x = int(graph.dst[e])
                if x == start:
                    break
            if x != start:
                walk += _bfs_path(graph, allowed, x, start)
            consider(cid, walk)
        # a repeated positive cycle, when there is one
        cyc, _ = _positive_cycle(graph, xi, edges, 1, tol)
        if cyc is not None:
            wit = _through(graph, xi, allowed, cyc, targets[0])
            consider(cid, wit.edges() if wit.length < 10**5 else cyc, wit)
    verdict = worst_val is not None and worst_val < -tol
    if worst_val is None:
        verdict = True
    return FriedReport(per_scc, worst_val, verdict, total, worst)


def analyze_conditions(graph: TransitionGraph, xi: Cochain1, report: RecurrenceReport,
                       with_fried: bool = True) -> ConditionsReport:
    a = check_condition_a(graph, xi, report.r_xi or (), report.eta_zero)
    b = check_condition_b(graph, xi, report, report.eta_zero)
    drift = drift_certificate(graph, xi, report, b) if b.holds else None
    fried = fried_check(graph, xi, report) if with_fried else None
    return ConditionsReport(a, b, check_c_xi_closed(report), drift, fried)
