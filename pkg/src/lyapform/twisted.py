"""Twisted recurrence: the part of R carried by closed walks of zero weight.

For every non-trivial SCC the extreme cycle means decide a sign class; the
zero-weight closed walks are then located exactly:

* boundary classes (zero is an extreme mean) use the tight-edge subgraph of
  a feasible potential;
* mixed classes with commensurable weights are entirely zero-recurrent,
  since positive and negative cycles combine to exactly zero;
* mixed classes whose weights are rational combinations of rationally
  independent reals are resolved by a circulation LP on the rational
  components.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .errors import NoCycle
from .forms import Cochain1, CycleBasis
from .transition import RecurrenceReport, TransitionGraph, scc_decompose


class SignClass(enum.Enum):
    AllZero = "AllZero"
    AllNegative = "AllNegative"
    AllPositive = "AllPositive"
    MixedSigns = "MixedSigns"
    NonNegWithZero = "NonNegWithZero"
    NonPosWithZero = "NonPosWithZero"


@dataclass(frozen=True)
class SccSignClass:
    scc: int
    kind: SignClass
    min_mean: object
    max_mean: object
    bound: Optional[object] = None


@dataclass(frozen=True)
class PeriodLattice:
    """Subgroup of R generated by the cycle pairings of one SCC.

    ``generator == 0`` with ``dense`` unset means the trivial group.
    """

    generator: object
    dense: bool
    pairings: tuple


def default_eta(xi: Cochain1) -> float:
    if xi.exact:
        return 0.0
    return 1e-9 * max(1.0, float(xi.max_abs()))


def _is_zero(x, eta) -> bool:
    if isinstance(x, Fraction):
        return x == 0
    return abs(x) <= eta


def _internal_edges(graph: TransitionGraph, verts: Iterable[int]) -> list[int]:
    vs = set(verts)
    src, dst = graph.src, graph.dst
    out = set()
    for v in vs:
        for e in graph.out_edges(v).tolist():
            if int(dst[e]) in vs:
                out.add(e)
    return sorted(out)


def _local(graph: TransitionGraph, verts, edges):
    verts = sorted(verts)
    loc = {v: i for i, v in enumerate(verts)}
    s = [loc[int(graph.src[e])] for e in edges]
    d = [loc[int(graph.dst[e])] for e in edges]
    return verts, s, d


def cycle_mean_range(graph: TransitionGraph, xi: Cochain1, scc: Iterable[int]):
    """``(min_mean, max_mean)`` over cycles inside the vertex set ``scc``."""
    edges = _internal_edges(graph, scc)
    if not edges:
        raise NoCycle("SCC has no internal edge")
    verts, s, d = _local(graph, scc, edges)
    w = [xi.weights[e] for e in edges]
    lo = kernels.min_mean_cycle(len(verts), s, d, w)
    hi = kernels.min_mean_cycle(len(verts), s, d, [-x for x in w])
    return lo, -hi


def classify(min_mean, max_mean, eta: float, scc: int = -1) -> SccSignClass:
    lo_zero, hi_zero = _is_zero(min_mean, eta), _is_zero(max_mean, eta)
    if lo_zero and hi_zero:
        kind, bound = SignClass.AllZero, None
    elif max_mean < 0 and not hi_zero:
        kind, bound = SignClass.AllNegative, -max_mean
    elif min_mean > 0 and not lo_zero:
        kind, bound = SignClass.AllPositive, min_mean
    elif lo_zero:
        kind, bound = SignClass.NonNegWithZero, None
    elif hi_zero:
        kind, bound = SignClass.NonPosWithZero, None
    else:
        kind, bound = SignClass.MixedSigns, None
    return SccSignClass(scc, kind, min_mean, max_mean, bound)


def _tight_recurrent(graph, xi, verts, edges, sign: int, eta: float) -> set[int]:
    """Vertices on zero cycles when ``sign * w`` has no positive cycle."""
    verts, s, d = _local(graph, verts, edges)
    w = [sign * xi.weights[e] for e in edges]
    tol = 0.0 if xi.exact else eta
    pot, cyc = kernels.longest_from(len(verts), s, d, w, tol=tol)
    if pot is None:  # pragma: no cover - excluded by the sign class
        raise RuntimeError("unexpected positive cycle in a boundary class")
    slack_tol = 0.0 if xi.exact else eta * (len(verts) + 1)
    ts, td = [], []
    for a, b, x in zip(s, d, w):
        if _is_zero(x + pot[b] - pot[a], slack_tol):
            ts.append(a)
            td.append(b)
    if not ts:
        return set()
    comp = kernels.strong_components(len(verts), ts, td)
    size: dict[int, int] = {}
    for c in comp:
        size[c] = size.get(c, 0) + 1
    loops = {comp[a] for a, b in zip(ts, td) if a == b}
    return {verts[i] for i, c in enumerate(comp) if size[c] > 1 or c in loops}


def _zero_circulation_support(graph, xi, verts, edges) -> set[int]:
    """Vertices on closed walks with zero rational displacement.

    Used when weights are ``components . generators`` with rationally
    independent generators; such a walk has weight zero iff its summed
    components vanish.  A max-support LP over nonnegative circulations is
    refined per connected piece until the support is stable.
    """
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix, hstack, identity, vstack

    comps = np.array([[float(c) for c in xi.components[e]] for e in edges])
    pending = [(sorted(verts), list(range(len(edges))))]
    found: set[int] = set()
    while pending:
        vs, idx = pending.pop()
        if not idx:
            continue
        sub = comps[idx]
        # a coordinate of one strict sign on every edge forbids zero sums
        if np.any(np.all(sub > 0, axis=0)) or np.any(np.all(sub < 0, axis=0)):
            continue
        loc = {v: i for i, v in enumerate(vs)}
        m, nv = len(idx), len(vs)
        rows, cols, vals = [], [], []
        for j, k in enumerate(idx):
            e = edges[k]
            rows += [loc[int(graph.src[e])], loc[int(graph.dst[e])]]
            cols += [j, j]
            vals += [1.0, -1.0]
        flow = coo_matrix((vals, (rows, cols)), shape=(nv, m))
        a_eq = vstack([flow, coo_matrix(sub.T)])
        a_eq = hstack([a_eq, coo_matrix((a_eq.shape[0], m))])
        a_ub = hstack([-identity(m), identity(m)])
        res = linprog(np.concatenate([np.zeros(m), -np.ones(m)]),
                      A_ub=a_ub, b_ub=np.zeros(m), A_eq=a_eq, b_eq=np.zeros(a_eq.shape[0]),
                      bounds=[(0, None)] * m + [(0, 1)] * m, method="highs")
        if res.status != 0:  # pragma: no cover - the zero circulation is always feasible
            raise RuntimeError(f"circulation LP failed: {res.message}")
        support = [idx[j] for j in range(m) if res.x[m + j] > 1e-7]
        if not support:
            continue
        sv = sorted({int(graph.src[edges[k]]) for k in support} | {int(graph.dst[edges[k]]) for k in support})
        lv, s, d = _local(graph, sv, [edges[k] for k in support])
        comp = kernels.strong_components(len(lv), s, d)
        pieces: dict[int, list[int]] = {}
        for k, a in zip(support, s):
            pieces.setdefault(comp[a], []).append(k)
        if len(pieces) == 1 and len(support) == m:
            found.update(sv)
            continue
        for c, ks in pieces.items():
            pv = sorted({lv[i] for i, cc in enumerate(comp) if cc == c})
            pending.append((pv, ks))
    return found


def _independent(generators) -> bool:
    import mpmath

    gens = [float(g) for g in generators]
    if len(gens) < 2:
        return True
    rel = mpmath.pslq(gens, maxcoeff=10**6, maxsteps=10**5)
    return rel is None


def zero_walk_vertices(graph: TransitionGraph, xi: Cochain1, scc: Iterable[int],
                       eta_zero: Optional[float] = None,
                       sign: Optional[SccSignClass] = None) -> set[int]:
    """Vertices of ``scc`` lying on a closed walk of total weight zero."""
    eta = default_eta(xi) if eta_zero is None else eta_zero
    verts = sorted(set(scc))
    edges = _internal_edges(graph, verts)
    if not edges:
        return set()
    if sign is None:
        sign = classify(*cycle_mean_range(graph, xi, verts), eta)
    kind = sign.kind
    if kind is SignClass.AllZero:
        return set(verts)
    if kind in (SignClass.AllNegative, SignClass.AllPositive):
        return set()
    if kind is SignClass.NonPosWithZero:
        return _tight_recurrent(graph, xi, verts, edges, 1, eta)
    if kind is SignClass.NonNegWithZero:
        return _tight_recurrent(graph, xi, verts, edges, -1, eta)
    # mixed signs
    if xi.exact:
        return set(verts)
    if xi.components is not None and _independent(xi.generators):
        return _zero_circulation_support(graph, xi, verts, edges)
    # closure semantics: zero is approached arbitrarily well
    return set(verts)


def compute_r_xi(graph: TransitionGraph, xi: Cochain1, eta_zero: Optional[float] = None,
                 report: Optional[RecurrenceReport] = None) -> RecurrenceReport:
    """Augment the SCC report with ``R_xi``, ``C_xi`` and sign classes."""
    if xi.graph_hash != graph.fingerprint:
        from .errors import GraphMismatch

        raise GraphMismatch("cochain does not belong to this graph")
    report = report or scc_decompose(graph)
    eta = default_eta(xi) if eta_zero is None else eta_zero
    r_xi: set[int] = set()
    classes = {}
    for c in report.nontrivial_ids():
        verts = report.components[c]
        sign = classify(*cycle_mean_range(graph, xi, verts), eta, scc=c)
        classes[c] = sign
        r_xi |= zero_walk_vertices(graph, xi, verts, eta, sign)
    r_xi_f = frozenset(r_xi)
    return dataclasses.replace(report, r_xi=r_xi_f, c_xi=report.recurrent - r_xi_f,
                               sign_classes=classes, eta_zero=eta)


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    a, b = abs(a), abs(b)
    if a == 0:
        return b
    if b == 0:
        return a
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    return Fraction(math.gcd(int(a * den), int(b * den)), den)


def period_lattice(graph: TransitionGraph, xi: Cochain1, scc: Optional[Iterable[int]] = None,
                   eta_zero: Optional[float] = None) -> PeriodLattice:
    """Generator of the group of cycle pairings inside ``scc`` (all
    vertices by default)."""
    verts = range(graph.n) if scc is None else scc
    edges = _internal_edges(graph, verts)
    if not edges:
        raise NoCycle("no internal edge")
    basis = CycleBasis(graph, edges)
    pairs = tuple(basis.chord_pairings(xi.weights))
    if xi.exact:
        g = Fraction(0)
        for p in pairs:
            g = _frac_gcd(g, p)
        return PeriodLattice(g, False, pairs)
    import mpmath

    eta = default_eta(xi) if eta_zero is None else eta_zero
    tol = max(eta, 1e-12)
    g = 0.0
    for p in pairs:
        p = float(p)
        if abs(p) <= tol:
            continue
        if g == 0.0:
            g = abs(p)
            continue
        rel = mpmath.pslq([g, p], tol=tol, maxcoeff=10**4, maxsteps=10**4)
        if rel is None:
            return PeriodLattice(0.0, True, pairs)
        a, b = rel  # a*g + b*p = 0, so p = (-a/b) g
        g = g / abs(Fraction(-a, b).denominator)
    return PeriodLattice(g, False, pairs)


@dataclass(frozen=True)
class LiftResult:
    projection: frozenset
    window: float
    quantum: float
    levels: int


def lift_graph(graph: TransitionGraph, xi: Cochain1, window: float, quantum: float,
               max_doublings: int = 6) -> LiftResult:
    """Truncated abelian-cover oracle for ``R_xi``.

    Vertices ``(v, k)`` with ``|k| * quantum <= window``; edge weights are
    rounded to multiples of ``quantum``.  The projection of the recurrent
    vertices is recomputed with the window doubled until it stops changing.
    """
    if quantum <= 0:
        raise ValueError("quantum must be > 0")
    steps = [int(round(float(w) / quantum)) for w in xi.weights]
    src, dst = graph.src.tolist(), graph.dst.tolist()
    previous = None
    for _ in range(max_doublings + 1):
        K = int(math.floor(window / quantum))
        span = 2 * K + 1
        ls, ld = [], []
        for u, v, st in zip(src, dst, steps):
            for k in range(-K, K + 1):
                k2 = k + st
                if -K <= k2 <= K:
                    ls.append(u * span + k + K)
                    ld.append(v * span + k2 + K)
        n = graph.n * span
        comp = kernels.strong_components(n, ls, ld) if n else []
        size: dict[int, int] = {}
        for c in comp:
            size[c] = size.get(c, 0) + 1
        loops = {comp[a] for a, b in zip(ls, ld) if a == b}
        proj = frozenset(x // span for x, c in enumerate(comp) if size[c] > 1 or c in loops)
        if proj == previous:
            return LiftResult(proj, window, quantum, span)
        previous = proj
        window *= 2
    return LiftResult(previous, window / 2, quantum, span)
