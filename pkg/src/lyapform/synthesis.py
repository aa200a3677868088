"""Synthesis of a Lyapunov cochain in a prescribed class.

The construction follows three reweightings, each by a coboundary:

1. ``omega1 = xi + df``, with ``f`` a sup-potential over walks inside the
   SCCs, so every SCC-internal edge becomes nonpositive and edges off the
   ``R_xi``-internal set descend by a margin ``sigma``;
2. ``omega2 = omega1 - dg``, with ``g`` integrating ``omega1`` on the
   ``R_xi`` pieces, so ``omega2`` vanishes there;
3. ``omega3 = omega2 + lam * dL1``, with ``L1`` a Conley-type potential on
   the condensation, which makes every edge between SCCs strictly negative.

All potentials are recorded, so a checker can rebuild ``omega3`` from ``xi``
and confirm it edge by edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import kernels
from .conditions import (ConditionA, ConditionB, WalkWitness, check_condition_a,
                         check_condition_b, r_xi_pieces)
from .errors import EmptyInput, NotApplicable, SynthesisContractViolated
from .forms import Cochain1, CycleBasis, Potential0, coboundary
from .transition import RecurrenceReport, TransitionGraph
from .twisted import compute_r_xi, default_eta


def decompose_word(word: Sequence, alphabet: Optional[int] = None) -> list:
    """Split ``word`` into blocks whose first and last letters agree.

    The first block ends at the last occurrence of the word's first letter;
    the rest is split the same way.  Letters never repeat across blocks, so
    there are at most as many blocks as distinct letters.
    """
    if len(word) == 0:
        raise EmptyInput("cannot decompose the empty word")
    if alphabet is not None and len(set(word)) > alphabet:
        raise ValueError("word uses more letters than the alphabet has")
    blocks = []
    i = 0
    n = len(word)
    while i < n:
        first = word[i]
        j = n - 1
        while word[j] != first:
            j -= 1
        blocks.append(word[i:j + 1])
        i = j + 1
    return blocks


def _zero(xi: Cochain1):
    return Fraction(0) if xi.exact else 0.0


def sup_potential(graph: TransitionGraph, xi: Cochain1, c_xi, drift=0,
                  edges: Optional[Sequence[int]] = None,
                  shifted: Optional[set] = None, strict: bool = True) -> Potential0:
    """``f(v) = sup`` of walk weights from ``v``, empty walk included.

    By default walks run inside the ``C_xi``-induced subgraph and ``f`` is 0
    elsewhere.  ``edges`` overrides the admissible edge set; ``drift`` is
    added to the weight of each admissible edge (only those in ``shifted``
    when given).  ``strict`` rejects zero-weight cycles as well, as the
    sup over ``C_xi`` requires; the pipeline relaxes it on ``R_xi`` pieces.
    """
    zero = _zero(xi)
    if edges is None:
        cs = set(c_xi)
        edges = [e for e in range(graph.m) if int(graph.src[e]) in cs and int(graph.dst[e]) in cs]
    edges = list(edges)
    if not edges:
        return Potential0(tuple(zero for _ in range(graph.n)))
    w = []
    for e in edges:
        x = xi.weights[e]
        if drift and (shifted is None or e in shifted):
            x = x + drift
        w.append(x)
    s = [int(graph.src[e]) for e in edges]
    d = [int(graph.dst[e]) for e in edges]
    neg = kernels.min_mean_cycle(graph.n, s, d, [-x for x in w]) if strict and drift == 0 else None
    if neg is not None and neg <= 0:
        raise NotApplicable("a cycle of nonnegative weight makes the sup-potential infinite")
    tol = 0.0 if xi.exact else default_eta(xi)
    pot, cyc = kernels.longest_from(graph.n, s, d, w, tol=tol)
    if pot is None:
        raise NotApplicable(f"positive cycle {cyc} makes the sup-potential infinite")
    return Potential0(tuple(pot))


def zero_on_r_xi(graph: TransitionGraph, omega: Cochain1, r_xi,
                 cond_a: Optional[ConditionA] = None) -> tuple[Cochain1, Potential0]:
    """``omega - dg`` with ``g`` integrating ``omega`` on the ``R_xi`` pieces
    (zero elsewhere); the result vanishes on every ``R_xi``-internal edge."""
    cond_a = cond_a or check_condition_a(graph, omega, r_xi)
    if not cond_a.holds:
        raise NotApplicable("condition (A) fails on R_xi")
    zero = _zero(omega)
    g = [cond_a.potential.get(v, zero) if cond_a.potential else zero for v in range(graph.n)]
    _, internal = r_xi_pieces(graph, r_xi)
    inside = {int(graph.src[e]) for e in internal}
    g = [x if v in inside else zero for v, x in enumerate(g)]
    pot = Potential0(tuple(g))
    return omega - coboundary(pot, graph), pot


def conley_potential(graph: TransitionGraph, report: RecurrenceReport) -> Potential0:
    """Longest-path level on the condensation, scaled into ``[0, 1]``.

    Constant on SCCs and strictly decreasing along every edge between
    different SCCs.
    """
    ncomp = len(report.components)
    level = [0] * ncomp
    succ: dict[int, list[int]] = {}
    for a, b in report.condensation:
        succ.setdefault(a, []).append(b)
    # ids are sinks-first, so successors always have smaller ids
    for c in range(ncomp):
        level[c] = max((level[d] + 1 for d in succ.get(c, ())), default=0)
    top = max(level, default=0)
    if top == 0:
        return Potential0(tuple(Fraction(0) for _ in range(graph.n)))
    return Potential0(tuple(Fraction(level[c], top) for c in report.scc_of))


@dataclass(frozen=True)
class LyapunovCertificate:
    graph_hash: str
    xi: Cochain1
    omega3: Cochain1
    f: Potential0
    g: Potential0
    L1: Potential0
    lam: object
    r_xi: frozenset
    r_internal: frozenset
    sigma: object
    margin: object
    verdicts: tuple
    class_pairings: tuple = field(repr=False)
    xi_pairings: tuple = field(repr=False)

    @property
    def valid(self) -> bool:
        return all(self.verdicts) and self.class_pairings == self.xi_pairings

    def potential(self) -> list:
        """``h`` with ``omega3 = xi + dh``."""
        return [f - g + self.lam * L for f, g, L in zip(self.f.values, self.g.values, self.L1.values)]


@dataclass(frozen=True)
class Refusal:
    reason: str
    witness: Optional[WalkWitness]
    report: RecurrenceReport
    detail: str = ""


def combine(graph: TransitionGraph, omega2: Cochain1, L1: Potential0, report: RecurrenceReport,
            r_internal: Optional[set] = None):
    """``omega3 = omega2 + lam * dL1`` with ``lam = 1 + max w2+ / (-dL1)``.

    Returns ``(omega3, lam)``.  Raises when ``omega2`` breaks the input
    contract: positive on an SCC-internal edge or nonzero on an
    ``R_xi``-internal one.
    """
    if r_internal is None:
        _, r_internal = r_xi_pieces(graph, report.r_xi or ())
        r_internal = set(r_internal)
    dl = coboundary(L1, graph).weights
    exact = omega2.exact
    tol = 0.0 if exact else default_eta(omega2)
    comp = report.scc_of
    lam = Fraction(1) if exact else 1.0
    ratio = None
    for e in range(graph.m):
        w = omega2.weights[e]
        u, v = int(graph.src[e]), int(graph.dst[e])
        if e in r_internal:
            if abs(w) > tol:
                raise SynthesisContractViolated(f"edge {e} is R_xi-internal but weighs {w}")
        elif comp[u] == comp[v]:
            if w > tol:
                raise SynthesisContractViolated(f"SCC-internal edge {e} has positive weight {w}")
        if dl[e] < 0:
            r = max(w, 0) / (-dl[e])
            ratio = r if ratio is None or r > ratio else ratio
    if ratio is not None:
        lam = lam + ratio
    return omega2 + coboundary(Potential0(tuple(lam * x for x in L1.values)), graph), lam


def _verdicts(graph, omega3, r_internal, exact, tol):
    out = []
    for e in range(graph.m):
        w = omega3.weights[e]
        if e in r_internal:
            out.append(w == 0 if exact else abs(w) <= tol)
        else:
            out.append(w < 0 if exact else w < -tol)
    return tuple(out)


def pipeline(graph: TransitionGraph, xi: Cochain1, eta_zero: Optional[float] = None,
             report: Optional[RecurrenceReport] = None) -> Union[LyapunovCertificate, Refusal]:
    """Full construction, or a refusal carrying the violating walk."""
    report = report if report is not None and report.r_xi is not None else compute_r_xi(graph, xi, eta_zero, report)
    eta = report.eta_zero
    cond_a = check_condition_a(graph, xi, report.r_xi, eta)
    if not cond_a.holds:
        return Refusal("A", cond_a.violation, report, "closed walk of nonzero weight inside R_xi")
    cond_b = check_condition_b(graph, xi, report, eta)
    if not cond_b.holds:
        return Refusal("B", cond_b.witness, report,
                       "closed walk through C_xi without a negative bound")
    exact = xi.exact
    _, internal = r_xi_pieces(graph, report.r_xi)
    r_internal = frozenset(internal)
    comp = report.scc_of
    scc_edges = [e for e in range(graph.m) if comp[int(graph.src[e])] == comp[int(graph.dst[e])]]
    biggest = max((len(c) for c in report.components), default=1)
    zero = _zero(xi)
    if cond_b.b is None:
        sigma = zero
    else:
        sigma = cond_b.b / (biggest + 1)
    shifted = {e for e in scc_edges if e not in r_internal}
    f = sup_potential(graph, xi, (), drift=sigma, edges=scc_edges, shifted=shifted,
                      strict=False) if scc_edges \
        else Potential0(tuple(zero for _ in range(graph.n)))
    omega1 = xi + coboundary(f, graph)
    omega2, g = zero_on_r_xi(graph, omega1, report.r_xi, check_condition_a(graph, omega1, report.r_xi, eta))
    L1 = conley_potential(graph, report)
    omega3, lam = combine(graph, omega2, L1, report, set(r_internal))
    tol = 0.0 if exact else max(default_eta(xi), eta or 0.0) * (graph.n + 1)
    verdicts = _verdicts(graph, omega3, r_internal, exact, tol)
    outside = [-omega3.weights[e] for e in range(graph.m) if e not in r_internal]
    margin = min(outside) if outside else None
    basis = CycleBasis(graph)
    cp = tuple(basis.chord_pairings(omega3.weights))
    xp = tuple(basis.chord_pairings(xi.weights))
    if not exact:
        cp = tuple(round(x, 9) for x in cp)
        xp = tuple(round(x, 9) for x in xp)
    return LyapunovCertificate(graph.fingerprint, xi, omega3, f, g, L1, lam, report.r_xi,
                               r_internal, sigma, margin, verdicts, cp, xp)


# -- independent checker ------------------------------------------------------


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    problems: tuple

    def __bool__(self):
        return self.ok


def _scc_ids(n: int, succ: dict) -> list[int]:
    """Kosaraju on an adjacency dict; kept separate from the kernels."""
    order, seen = [], [False] * n
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        stack = [(s, iter(succ.get(s, ())))]
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                order.append(v)
                stack.pop()
            elif not seen[nxt]:
                seen[nxt] = True
                stack.append((nxt, iter(succ.get(nxt, ()))))
    pred: dict[int, list[int]] = {}
    for v, ws in succ.items():
        for w in ws:
            pred.setdefault(w, []).append(v)
    comp = [-1] * n
    c = 0
    for s in reversed(order):
        if comp[s] >= 0:
            continue
        comp[s] = c
        stack = [s]
        while stack:
            v = stack.pop()
            for w in pred.get(v, ()):
                if comp[w] < 0:
                    comp[w] = c
                    stack.append(w)
        c += 1
    return comp


def verify(graph: TransitionGraph, xi: Cochain1, cert: LyapunovCertificate,
           tol: Optional[float] = None) -> VerifyResult:
    """Re-check a certificate from raw data.

    * the claimed set ``Y`` splits into strongly connected pieces with
      internal edges, which puts ``Y`` inside ``R_xi``; the form being zero
      there and negative elsewhere puts ``R_xi`` inside ``Y``;
    * (L2) zero on ``Y``-internal edges, (L1) strictly negative elsewhere;
    * ``omega3 = xi + dh`` edge by edge for the recorded ``h``;
    * ``omega3 - xi`` integrates consistently over a spanning forest.
    """
    from .errors import GraphMismatch

    if cert.graph_hash != graph.fingerprint or xi.graph_hash != graph.fingerprint:
        raise GraphMismatch("certificate, class and graph disagree")
    exact = xi.exact and cert.omega3.exact
    if tol is None:
        tol = 0.0 if exact else 1e-9 * max(1.0, float(xi.max_abs())) * (graph.n + 1)
    problems = []
    w3 = cert.omega3.weights
    if len(w3) != graph.m:
        return VerifyResult(False, ("omega3 has the wrong length",))

    def is_zero(x):
        return x == 0 if exact else abs(x) <= tol

    ys = sorted(cert.r_xi)
    yset = set(ys)
    succ: dict[int, list[int]] = {}
    for e in range(graph.m):
        u, v = int(graph.src[e]), int(graph.dst[e])
        if u in yset and v in yset:
            succ.setdefault(u, []).append(v)
    comp = _scc_ids(graph.n, succ)
    internal = set()
    for e in range(graph.m):
        u, v = int(graph.src[e]), int(graph.dst[e])
        if u in yset and v in yset and comp[u] == comp[v]:
            internal.add(e)
    covered = {int(graph.src[e]) for e in internal}
    if covered != yset:
        problems.append(f"vertices {sorted(yset - covered)[:5]} of the claimed set lie on no internal cycle")
    for e in range(graph.m):
        if e in internal:
            if not is_zero(w3[e]):
                problems.append(f"(L2) edge {e} weighs {w3[e]}")
        elif not (w3[e] < 0 if exact else w3[e] < -tol):
            problems.append(f"(L1) edge {e} weighs {w3[e]}")
    h = [f - g + cert.lam * L for f, g, L in zip(cert.f.values, cert.g.values, cert.L1.values)]
    for e in range(graph.m):
        u, v = int(graph.src[e]), int(graph.dst[e])
        if not is_zero(w3[e] - (xi.weights[e] + h[v] - h[u])):
            problems.append(f"edge {e} differs from xi + dh")
    # class: omega3 - xi must integrate without conflict
    diff = [a - b for a, b in zip(w3, xi.weights)]
    adj: dict[int, list[tuple[int, int, int]]] = {}
    for e in range(graph.m):
        u, v = int(graph.src[e]), int(graph.dst[e])
        adj.setdefault(u, []).append((v, e, 1))
        adj.setdefault(v, []).append((u, e, -1))
    pot: dict[int, object] = {}
    for s in range(graph.n):
        if s in pot:
            continue
        pot[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for v, e, sgn in adj.get(u, ()):
                val = pot[u] + sgn * diff[e]
                if v not in pot:
                    pot[v] = val
                    stack.append(v)
                elif not is_zero(pot[v] - val):
                    problems.append(f"class changed around edge {e}")
                    break
    return VerifyResult(not problems, tuple(problems))
