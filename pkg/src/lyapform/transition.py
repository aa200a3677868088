"""Transition graphs and chain recurrence.

A :class:`TransitionGraph` is the combinatorial stand-in for a flow: boxes
are vertices and an edge ``u -> v`` means some point of box ``u`` reaches
box ``v`` after the graph's flow time.  A vertex admits a closed walk exactly
when it sits in a non-trivial strongly connected component, which is the
graph-level chain recurrent set.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

import numpy as np

from . import kernels


@dataclass(frozen=True, eq=False)
class EdgeGeometry:
    """Geometric data attached to graphs built from a flow.

    ``offsets[e]`` is the lattice translate (in periods) of the target box
    that the edge actually lands on; ``paths[v]`` is the unwrapped trajectory
    of the centre of box ``v`` over one graph step.
    """

    grid: object
    offsets: np.ndarray
    paths: np.ndarray
    tau: float


@dataclass(frozen=True, eq=False)
class TransitionGraph:
    n: int
    src: np.ndarray
    dst: np.ndarray
    duration: np.ndarray
    geometry: Optional[EdgeGeometry] = None

    def __post_init__(self):
        src = np.ascontiguousarray(self.src, dtype=np.int64)
        dst = np.ascontiguousarray(self.dst, dtype=np.int64)
        dur = np.ascontiguousarray(self.duration, dtype=np.float64)
        if src.shape != dst.shape or src.shape != dur.shape:
            raise ValueError("edge arrays must have equal length")
        if src.size and (src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= self.n):
            raise ValueError("edge references a vertex outside 0..n-1")
        if dur.size and dur.min() < 1:
            raise ValueError("edge durations must be >= 1")
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "duration", dur)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, duration: float = 1.0) -> "TransitionGraph":
        src, dst, dur = [], [], []
        for e in edges:
            src.append(e[0])
            dst.append(e[1])
            dur.append(e[2] if len(e) > 2 else duration)
        return cls(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
                   np.array(dur, dtype=np.float64))

    @property
    def m(self) -> int:
        return int(self.src.size)

    def edges(self):
        return zip(self.src.tolist(), self.dst.tolist())

    @cached_property
    def _out(self):
        order = np.argsort(self.src, kind="stable")
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(ptr, self.src + 1, 1)
        return np.cumsum(ptr), order

    @cached_property
    def _in(self):
        order = np.argsort(self.dst, kind="stable")
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(ptr, self.dst + 1, 1)
        return np.cumsum(ptr), order

    def out_edges(self, v: int) -> np.ndarray:
        ptr, order = self._out
        return order[ptr[v]:ptr[v + 1]]

    def in_edges(self, v: int) -> np.ndarray:
        ptr, order = self._in
        return order[ptr[v]:ptr[v + 1]]

    def successors(self, v: int) -> list[int]:
        return self.dst[self.out_edges(v)].tolist()

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"V {self.n}\n".encode())
        for u, v, d in zip(self.src.tolist(), self.dst.tolist(), self.duration.tolist()):
            h.update(f"E {u} {v} {d!r}\n".encode())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class RecurrenceReport:
    """SCC structure of a graph plus, once computed, the twisted split of R.

    ``components`` is indexed by SCC id; ids are numbered sinks-first so
    every condensation edge goes from a larger id to a smaller one.
    """

    graph_hash: str
    scc_of: tuple
    components: tuple
    nontrivial: tuple
    condensation: frozenset
    r_xi: Optional[frozenset] = None
    c_xi: Optional[frozenset] = None
    sign_classes: Optional[dict] = field(default=None, compare=False)
    eta_zero: Optional[float] = None

    @property
    def recurrent(self) -> frozenset:
        return frozenset(v for c, verts in enumerate(self.components) if self.nontrivial[c]
                         for v in verts)

    @property
    def transitive_components(self) -> list[frozenset]:
        return [frozenset(vs) for c, vs in enumerate(self.components) if self.nontrivial[c]]

    def nontrivial_ids(self) -> list[int]:
        return [c for c, nt in enumerate(self.nontrivial) if nt]

    def internal_mask(self, graph: TransitionGraph) -> np.ndarray:
        """Edges whose endpoints share an SCC."""
        comp = np.asarray(self.scc_of)
        return comp[graph.src] == comp[graph.dst]


def scc_decompose(graph: TransitionGraph) -> RecurrenceReport:
    comp = kernels.strong_components(graph.n, graph.src, graph.dst)
    ncomp = max(comp) + 1 if comp else 0
    members: list[list[int]] = [[] for _ in range(ncomp)]
    for v, c in enumerate(comp):
        members[c].append(v)
    nontrivial = [len(ms) > 1 for ms in members]
    cond = set()
    for u, v in graph.edges():
        cu, cv = comp[u], comp[v]
        if cu == cv:
            nontrivial[cu] = True
        else:
            cond.add((cu, cv))
    return RecurrenceReport(
        graph_hash=graph.fingerprint,
        scc_of=tuple(comp),
        components=tuple(tuple(ms) for ms in members),
        nontrivial=tuple(nontrivial),
        condensation=frozenset(cond),
    )


def reachable(graph: TransitionGraph, sources: Iterable[int]) -> set[int]:
    seen = set(sources)
    stack = list(seen)
    while stack:
        u = stack.pop()
        for v in graph.successors(u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def chain_exists(graph: TransitionGraph, u: int, v: int, n_min: int,
                 report: Optional[RecurrenceReport] = None) -> bool:
    """Is there a walk from ``u`` to ``v`` with at least ``n_min`` edges?"""
    if n_min < 1:
        raise ValueError("n_min must be >= 1")
    if n_min >= graph.n:
        # long walks must revisit a vertex, i.e. pass through R
        report = report or scc_decompose(graph)
        rec = report.recurrent
        mid = [w for w in reachable(graph, [u]) if w in rec]
        return v in reachable(graph, mid) if mid else False
    layer = {u}
    for _ in range(n_min):
        layer = {w for x in layer for w in graph.successors(x)}
        if not layer:
            return False
    return v in reachable(graph, layer)
