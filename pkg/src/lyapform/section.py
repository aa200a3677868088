"""Circle-valued maps and cross sections for integral classes.

When every cycle pairs to an integer with the class and the certified form
is strictly negative on every edge, integrating it over a spanning forest
gives a lift ``F``; its value mod 1 is a map to the circle that decreases
along every edge.  A level set of that map, read on edges, is a cross
section: every closed walk crosses it as many times as minus its pairing.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import NotASection, NotIntegral
from .forms import Cochain1, CycleBasis
from .transition import TransitionGraph


def _is_int(x, eta: float) -> bool:
    if isinstance(x, Fraction):
        return x.denominator == 1
    return abs(x - round(x)) <= eta


def is_integral(graph: TransitionGraph, xi: Cochain1, eta_zero: Optional[float] = None) -> bool:
    """All fundamental-cycle pairings are integers."""
    eta = 1e-9 if eta_zero is None else eta_zero
    return all(_is_int(p, eta) for p in CycleBasis(graph).chord_pairings(xi.weights))


@dataclass(frozen=True)
class CircleMap:
    graph_hash: str
    lift: tuple
    angle: tuple
    base: tuple
    edge_start: tuple
    edge_end: tuple
    generator: object = 1


@dataclass(frozen=True)
class CrossSection:
    theta: object
    edges: tuple
    crossings: dict
    params: dict

    def count(self, walk) -> int:
        return sum(self.crossings.get(e, 0) for e in walk)


def build_circle_map(graph: TransitionGraph, cert, eta_zero: Optional[float] = None) -> CircleMap:
    """Integrate the certified form from one base vertex per weakly connected
    component, following out-edges first so forward paths read as descent."""
    if cert.r_xi:
        raise NotASection("R_xi is not empty; level sets would meet invariant pieces")
    if not cert.valid:
        raise NotASection("certificate does not verify")
    omega = cert.omega3
    if not is_integral(graph, omega, eta_zero):
        raise NotIntegral("some cycle pairs to a non-integer")
    zero = Fraction(0) if omega.exact else 0.0
    lift: list = [None] * graph.n
    bases = []
    adj: dict[int, list[tuple[int, int]]] = {}
    for e in range(graph.m):
        u, v = int(graph.src[e]), int(graph.dst[e])
        adj.setdefault(v, []).append((u, e))
    for s in range(graph.n):
        if lift[s] is not None:
            continue
        bases.append(s)
        lift[s] = zero
        queue = deque([s])
        pending = []
        while queue or pending:
            if not queue:
                # backward step when forward search is exhausted
                v, val = pending.pop(0)
                if lift[v] is not None:
                    continue
                lift[v] = val
                queue.append(v)
                continue
            u = queue.popleft()
            for e in graph.out_edges(u).tolist():
                v = int(graph.dst[e])
                if lift[v] is None:
                    lift[v] = lift[u] + omega.weights[e]
                    queue.append(v)
            for w_, e in adj.get(u, ()):
                if lift[w_] is None:
                    pending.append((w_, lift[u] - omega.weights[e]))
    angle = tuple(x - math.floor(x) for x in lift)
    start = tuple(lift[int(graph.src[e])] for e in range(graph.m))
    end = tuple(lift[int(graph.src[e])] + omega.weights[e] for e in range(graph.m))
    return CircleMap(graph.fingerprint, tuple(lift), angle, tuple(bases), start, end)


def extract_cross_section(cmap: CircleMap, theta) -> CrossSection:
    """Edges whose lifted interval ``[F(u) + w, F(u))`` holds ``theta + n``.

    The closed lower end makes crossing counts exact integers.
    """
    theta = theta - math.floor(theta)
    crossings, params = {}, {}
    for e, (a, b) in enumerate(zip(cmap.edge_start, cmap.edge_end)):
        lo, hi = b, a
        if not lo < hi:
            continue
        n0 = math.ceil(lo - theta)
        n1 = math.ceil(hi - theta) - 1  # theta + n < hi
        k = n1 - n0 + 1
        if k > 0:
            crossings[e] = k
            first = theta + n1
            params[e] = (hi - first) / (hi - lo)
    return CrossSection(theta, tuple(sorted(crossings)), crossings, params)


def signed_crossings(graph: TransitionGraph, section: CrossSection, coeffs: dict) -> int:
    """Crossings of an integer 1-chain ``{edge: coefficient}``."""
    return sum(k * section.crossings.get(e, 0) for e, k in coeffs.items())
