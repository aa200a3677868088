"""Closed one-forms, edge cochains and the graph cycle space.

A continuous closed one-form is given by a finite family of charts, each an
open box in the universal cover carrying a local potential.  Integrating it
along box-map edges yields a :class:`Cochain1`; cochains pair with cycles of
the graph through a fixed fundamental-cycle basis.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import ChartCoverageError, GraphMismatch, NotClosed, NotCohomologous
from .transition import TransitionGraph


def _exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def as_number(x):
    """Keep ints/Fractions exact, turn everything else into float."""
    if _exact(x):
        return Fraction(x)
    return float(x)


@dataclass(frozen=True, eq=False)
class Cochain1:
    """Real weight per edge of a transition graph.

    ``components``/``generators`` optionally record that each weight is
    ``sum(components[e][j] * generators[j])`` with rational components; the
    twisted analysis uses this to decide exact vanishing when the generators
    are rationally independent.
    """

    graph_hash: str
    weights: tuple
    components: Optional[tuple] = None
    generators: Optional[tuple] = None

    @classmethod
    def of(cls, graph: TransitionGraph, values: Iterable) -> "Cochain1":
        vals = tuple(as_number(v) for v in values)
        if len(vals) != graph.m:
            raise ValueError(f"expected {graph.m} weights, got {len(vals)}")
        if any(isinstance(v, float) and not math.isfinite(v) for v in vals):
            raise ValueError("cochain weights must be finite")
        return cls(graph.fingerprint, vals)

    @classmethod
    def zero(cls, graph: TransitionGraph) -> "Cochain1":
        return cls(graph.fingerprint, (Fraction(0),) * graph.m)

    @functools.cached_property
    def exact(self) -> bool:
        return all(_exact(w) for w in self.weights)

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, e):
        return self.weights[e]

    def _check(self, other: "Cochain1"):
        if self.graph_hash != other.graph_hash:
            raise GraphMismatch("cochains live on different graphs")

    def __add__(self, other: "Cochain1") -> "Cochain1":
        self._check(other)
        return Cochain1(self.graph_hash, tuple(a + b for a, b in zip(self.weights, other.weights)))

    def __sub__(self, other: "Cochain1") -> "Cochain1":
        self._check(other)
        return Cochain1(self.graph_hash, tuple(a - b for a, b in zip(self.weights, other.weights)))

    def __neg__(self) -> "Cochain1":
        return self.scale(-1)

    def scale(self, lam) -> "Cochain1":
        lam = as_number(lam)
        comps = self.components
        gens = None
        if comps is not None:
            gens = tuple(g * float(lam) for g in self.generators)
        return Cochain1(self.graph_hash, tuple(w * lam for w in self.weights), comps, gens)

    def max_abs(self):
        return max((abs(w) for w in self.weights), default=Fraction(0))


@dataclass(frozen=True)
class Potential0:
    """Real value per vertex."""

    values: tuple

    @classmethod
    def of(cls, values: Iterable) -> "Potential0":
        return cls(tuple(as_number(v) for v in values))

    def __getitem__(self, v):
        return self.values[v]

    def __len__(self):
        return len(self.values)


def coboundary(g, graph: TransitionGraph) -> Cochain1:
    """``(dg)(u -> v) = g(v) - g(u)``."""
    vals = g.values if isinstance(g, Potential0) else tuple(as_number(x) for x in g)
    if len(vals) != graph.n:
        raise ValueError("potential must be defined on every vertex")
    return Cochain1(graph.fingerprint,
                    tuple(vals[v] - vals[u] for u, v in graph.edges()))


# -- cycle space -----------------------------------------------------------


@dataclass(frozen=True)
class CycleVector:
    """Integer coordinates over the chords of a fixed spanning forest."""

    basis_id: str
    coeffs: tuple

    def l1(self) -> int:
        return sum(map(abs, self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)


class CycleBasis:
    """Fundamental cycles of a BFS spanning forest.

    Works on the undirected multigraph underlying ``graph`` restricted to
    ``edge_ids`` (all edges by default).  Chord ``c = u -> v`` closes the
    fundamental cycle ``c`` followed by the tree path from ``v`` back to
    ``u``.
    """

    def __init__(self, graph: TransitionGraph, edge_ids: Optional[Iterable[int]] = None):
        self.graph = graph
        if edge_ids is None:
            edge_ids = range(graph.m)
        self.edge_ids = sorted(set(int(e) for e in edge_ids))
        src, dst = graph.src, graph.dst
        incident: dict[int, list[int]] = {}
        for e in self.edge_ids:
            incident.setdefault(int(src[e]), []).append(e)
            if dst[e] != src[e]:
                incident.setdefault(int(dst[e]), []).append(e)
        for lst in incident.values():
            lst.sort()
        self.vertices = sorted(incident)
        self.parent_edge: dict[int, int] = {}
        self.root: dict[int, int] = {}
        self.order: list[int] = []
        tree = set()
        for r in self.vertices:
            if r in self.root:
                continue
            self.root[r] = r
            self.parent_edge[r] = -1
            queue = deque([r])
            while queue:
                u = queue.popleft()
                self.order.append(u)
                for e in incident[u]:
                    w = int(dst[e]) if src[e] == u else int(src[e])
                    if w not in self.root:
                        self.root[w] = r
                        self.parent_edge[w] = e
                        tree.add(e)
                        queue.append(w)
        self.tree = frozenset(tree)
        self.chords = [e for e in self.edge_ids if e not in tree]
        self.chord_index = {e: i for i, e in enumerate(self.chords)}
        self.basis_id = f"{graph.fingerprint}:{hash(tuple(self.edge_ids)) & 0xffffffff:08x}"

    @property
    def rank(self) -> int:
        return len(self.chords)

    def tree_potential(self, weights: Sequence) -> dict:
        """Potential ``P`` with ``P(v) - P(u) = w(e)`` on every tree edge."""
        src, dst = self.graph.src, self.graph.dst
        pot = {}
        for v in self.order:
            e = self.parent_edge[v]
            if e < 0:
                pot[v] = Fraction(0) if _exact(weights[0] if weights else 0) else 0.0
                continue
            if dst[e] == v:
                pot[v] = pot[int(src[e])] + weights[e]
            else:
                pot[v] = pot[int(dst[e])] - weights[e]
        return pot

    def chord_pairings(self, weights: Sequence) -> list:
        pot = self.tree_potential(weights)
        src, dst = self.graph.src, self.graph.dst
        return [weights[c] + pot[int(src[c])] - pot[int(dst[c])] for c in self.chords]

    def coordinates(self, edge_counts) -> CycleVector:
        """Coordinates of an integer 1-cycle given as ``{edge: count}``."""
        coeffs = [0] * self.rank
        for e, k in edge_counts.items():
            i = self.chord_index.get(e)
            if i is not None:
                coeffs[i] += k
        return CycleVector(self.basis_id, tuple(coeffs))

    def fundamental_cycle(self, chord: int) -> dict:
        """Edge coefficients of the fundamental cycle of ``chord``."""
        src, dst = self.graph.src, self.graph.dst
        coef = {chord: 1}
        u, v = int(src[chord]), int(dst[chord])

        def path_to_root(x):
            out = []
            while self.parent_edge[x] >= 0:
                e = self.parent_edge[x]
                out.append((x, e))
                x = int(src[e]) if dst[e] == x else int(dst[e])
            return out

        # walk v -> root (forward) then root -> u
        for x, e in path_to_root(v):
            coef[e] = coef.get(e, 0) + (1 if src[e] == x else -1)
        for x, e in path_to_root(u):
            coef[e] = coef.get(e, 0) + (-1 if src[e] == x else 1)
        return {e: c for e, c in coef.items() if c}


def pairing(xi: Cochain1, z: CycleVector, basis: CycleBasis):
    """``<xi, z>`` as the sum of chord pairings weighted by coordinates."""
    if z.basis_id != basis.basis_id or xi.graph_hash != basis.graph.fingerprint:
        raise GraphMismatch("cycle vector and cochain use different bases")
    total = Fraction(0) if xi.exact else 0.0
    for k, p in zip(z.coeffs, basis.chord_pairings(xi.weights)):
        if k:
            total += k * p
    return total


def walk_weight(xi: Cochain1, walk: Sequence[int]):
    total = Fraction(0) if xi.exact else 0.0
    for e in walk:
        total += xi.weights[e]
    return total


def check_walk(graph: TransitionGraph, walk: Sequence[int], closed: bool = True):
    src, dst = graph.src, graph.dst
    for a, b in zip(walk, walk[1:]):
        if dst[a] != src[b]:
            raise NotClosed(f"edges {a} and {b} are not consecutive")
    if closed and walk and dst[walk[-1]] != src[walk[0]]:
        raise NotClosed("walk does not return to its start")


def associated_cycle(graph: TransitionGraph, walk: Sequence[int],
                     basis: Optional[CycleBasis] = None) -> CycleVector:
    """Cycle vector of a closed walk given as a list of edge indices.

    Closing jumps are already folded into each box-map edge, so the walk
    itself is the loop.
    """
    basis = basis or CycleBasis(graph)
    check_walk(graph, walk, closed=True)
    counts: dict[int, int] = {}
    for e in walk:
        counts[e] = counts.get(e, 0) + 1
    return basis.coordinates(counts)


def extend_form(graph: TransitionGraph, sub: Iterable[int], omega_sub: Cochain1,
                xi: Cochain1) -> Cochain1:
    """Cochain agreeing with ``omega_sub`` on the ``sub``-induced edges and
    cohomologous to ``xi``.

    The difference ``omega_sub - xi`` is integrated to a potential on
    ``sub`` and the zero-extended potential's coboundary is added to ``xi``.
    """
    sub = set(sub)
    if not sub:
        return xi
    src, dst = graph.src, graph.dst
    induced = [e for e in range(graph.m) if int(src[e]) in sub and int(dst[e]) in sub]
    diff = [omega_sub.weights[e] - xi.weights[e] for e in range(graph.m)]
    basis = CycleBasis(graph, induced)
    pot = basis.tree_potential(diff)
    zero = Fraction(0) if xi.exact and omega_sub.exact else 0.0
    h = [pot.get(v, zero) for v in range(graph.n)]
    for e in induced:
        mismatch = diff[e] - (h[int(dst[e])] - h[int(src[e])])
        if mismatch != 0 and not (isinstance(mismatch, float) and abs(mismatch) <= 1e-9):
            raise NotCohomologous(f"edge {e}: pairing mismatch {mismatch}")
    return xi + coboundary(h, graph)


# -- chart families ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Chart:
    """Open box ``(lo, hi)`` in the universal cover with a local potential."""

    lo: np.ndarray
    hi: np.ndarray
    potential: Callable[[np.ndarray], np.ndarray]


class ClosedOneForm:
    """Continuous closed one-form given by a finite chart family."""

    def __init__(self, charts: Sequence[Chart], periods: Sequence[Optional[float]], label: str = ""):
        self.charts = list(charts)
        self.periods = list(periods)
        self.label = label
        self.dim = len(self.periods)

    def _translates(self, p: np.ndarray, chart: Chart):
        """Lattice shifts ``k`` putting ``p + k`` inside ``chart``."""
        choices = []
        for i, per in enumerate(self.periods):
            lo, hi = chart.lo[i], chart.hi[i]
            if per is None or not (math.isfinite(lo) and math.isfinite(hi)):
                choices.append([0.0] if lo < p[i] < hi else [])
                continue
            k0 = math.floor((lo - p[i]) / per)
            opts = [k * per for k in range(k0, k0 + 3) if lo < p[i] + k * per < hi]
            choices.append(opts)
        return [np.array(c) for c in itertools.product(*choices)]

    def locate(self, p: np.ndarray, q: np.ndarray):
        """A chart and shift containing the whole segment ``[p, q]``."""
        for chart in self.charts:
            for shift in self._translates(p, chart):
                qs = q + shift
                if np.all(chart.lo < qs) and np.all(qs < chart.hi):
                    return chart, shift
        return None

    def segment_integral(self, p: np.ndarray, q: np.ndarray, depth: int = 0) -> float:
        hit = self.locate(p, q)
        if hit is not None:
            chart, shift = hit
            vals = chart.potential(np.vstack([q + shift, p + shift]))
            return float(vals[0] - vals[1])
        if depth > 24:
            raise ChartCoverageError(f"no chart contains the segment near {p}")
        mid = 0.5 * (p + q)
        return self.segment_integral(p, mid, depth + 1) + self.segment_integral(mid, q, depth + 1)

    def check_overlaps(self, samples: int = 400, tol: float = 1e-9, seed: int = 0) -> bool:
        """Potential differences are locally constant on chart overlaps."""
        rng = np.random.default_rng(seed)
        for a, b in itertools.combinations(self.charts, 2):
            lo = np.maximum(a.lo, b.lo)
            hi = np.minimum(a.hi, b.hi)
            lo = np.where(np.isfinite(lo), lo, -2.0)
            hi = np.where(np.isfinite(hi), hi, 2.0)
            if np.any(lo >= hi):
                continue
            pts = rng.uniform(lo, hi, size=(samples, self.dim))
            diff = a.potential(pts) - b.potential(pts)
            # neighbouring samples in the same overlap box must agree
            near = np.abs(diff[1:] - diff[:-1]) <= tol
            if not np.all(near | (np.linalg.norm(pts[1:] - pts[:-1], axis=1) > 1e-3)):
                return False
            if np.ptp(diff) > tol:
                return False
        return True


class LinearForm(ClosedOneForm):
    """``sum_i c_i dx_i`` on a flat space, with its natural chart family."""

    def __init__(self, coeffs: Sequence, lo: Sequence, hi: Sequence,
                 periodic: Sequence[bool], label: str = ""):
        self.coeffs = tuple(as_number(c) for c in coeffs)
        self._cf = np.array([float(c) for c in self.coeffs])
        periods = [float(h - l) if per else None for l, h, per in zip(lo, hi, periodic)]
        axes = []
        for l, h, per in zip(lo, hi, periodic):
            l, h = float(l), float(h)
            if per:
                p = h - l
                axes.append([(l - p / 4, l + 3 * p / 4), (l + p / 4, l + 5 * p / 4)])
            else:
                axes.append([(l - 1.0, h + 1.0)])
        cf = self._cf
        charts = [Chart(np.array([a[0] for a in box]), np.array([a[1] for a in box]),
                        lambda x, cf=cf: np.atleast_2d(x) @ cf)
                  for box in itertools.product(*axes)]
        super().__init__(charts, periods, label)

    @property
    def rational(self) -> bool:
        return all(_exact(c) for c in self.coeffs)

    def exact_potential(self, x: Sequence):
        return sum(c * v for c, v in zip(self.coeffs, x))


def exact_form(potential: Callable[[np.ndarray], np.ndarray], periods, label: str = "") -> ClosedOneForm:
    """``dg`` for a globally defined (periodic) function ``g``: one chart."""
    d = len(periods)
    chart = Chart(np.full(d, -np.inf), np.full(d, np.inf), potential)
    return ClosedOneForm([chart], periods, label)


def line_integral(form: ClosedOneForm, path) -> float:
    """Sum of chart-potential differences along a polyline.

    Points are in universal-cover coordinates; segments that fit in no chart
    are bisected.
    """
    pts = np.atleast_2d(np.asarray(path, dtype=float))
    total = 0.0
    for p, q in zip(pts[:-1], pts[1:]):
        if np.array_equal(p, q):
            continue
        total += form.segment_integral(p, q)
    return total


@dataclass(frozen=True)
class Scale:
    eps: float
    delta: float


def _space_diameter(form: ClosedOneForm, grid) -> float:
    half = []
    for i, per in enumerate(form.periods):
        span = float(grid.hi[i] - grid.lo[i])
        half.append((per / 2) if per is not None else span)
    return float(np.linalg.norm(half))


def compute_scale(form: ClosedOneForm, grid) -> Scale:
    """Scale of the class: ``eps`` is the radius version of the Lebesgue
    number of the chart cover over grid sample points (capped at half the
    space diameter), ``delta = eps`` since cells are convex."""
    diam = _space_diameter(form, grid)
    samples = grid.sample_points()
    worst = math.inf
    for x in samples:
        best = 0.0
        for chart in form.charts:
            for shift in form._translates(x, chart):
                y = x + shift
                r = np.min(np.minimum(y - chart.lo, chart.hi - y))
                best = max(best, float(r))
        if best <= 0:
            raise ChartCoverageError(f"sample {x} is not covered by any chart")
        worst = min(worst, best)
    eps = min(worst, diam / 2)
    return Scale(eps=eps, delta=eps)


def pull_back(form: ClosedOneForm, graph: TransitionGraph, closing: bool = True) -> Cochain1:
    """Integrate ``form`` over every edge of a box-map graph.

    Each edge is the trajectory of its source-box centre followed, when
    ``closing`` is set, by the short jump to the centre of the lattice
    translate of the target box the edge lands on.  For rational linear
    forms the telescoped value is computed in exact arithmetic.
    """
    geo = graph.geometry
    if geo is None:
        raise ValueError("graph carries no trajectory data")
    grid = geo.grid
    src, dst = graph.src, graph.dst
    if closing and isinstance(form, LinearForm):
        # centre displacements are integer multiples of the cell widths
        res = np.array(grid.res, dtype=np.int64)
        mi = np.stack(np.unravel_index(np.arange(graph.n), grid.res), axis=1)
        steps = mi[dst] - mi[src] + np.asarray(geo.offsets, dtype=np.int64) * res
        width = grid.width
        cache: dict = {}
        weights, comps = [], []
        for key in map(tuple, steps.tolist()):
            hit = cache.get(key)
            if hit is None:
                disp = tuple(k * w for k, w in zip(key, width))
                hit = cache[key] = (disp, form.exact_potential(disp))
            comps.append(hit[0])
            weights.append(hit[1])
        if form.rational:
            return Cochain1(graph.fingerprint, tuple(Fraction(w) for w in weights))
        return Cochain1(graph.fingerprint, tuple(float(w) for w in weights), tuple(comps),
                        tuple(float(c) for c in form.coeffs))
    along = [line_integral(form, geo.paths[v]) for v in range(graph.n)]
    weights = []
    for e in range(graph.m):
        u = int(src[e])
        w = along[u]
        if closing:
            end = geo.paths[u][-1]
            target = grid.center(int(dst[e]), geo.offsets[e])
            w += line_integral(form, np.vstack([end, target]))
        weights.append(w)
    return Cochain1(graph.fingerprint, tuple(weights))


def closing_jumps(form: ClosedOneForm, graph: TransitionGraph) -> np.ndarray:
    """Integral of ``form`` over each edge's closing jump alone.

    The jump runs from the image of the source centre to the centre of the
    target translate; its absolute integral bounds how far an edge weight
    can sit from the true trajectory integral.
    """
    geo = graph.geometry
    if geo is None:
        raise ValueError("graph carries no trajectory data")
    grid = geo.grid
    out = np.empty(graph.m)
    for e in range(graph.m):
        u = int(graph.src[e])
        end = geo.paths[u][-1]
        target = grid.center(int(graph.dst[e]), geo.offsets[e])
        if isinstance(form, LinearForm):
            out[e] = float(np.dot(form._cf, target - end))
        else:
            out[e] = line_integral(form, np.vstack([end, target]))
    return out
