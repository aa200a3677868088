"""Line-oriented text formats for graphs, classes, certificates and reports.

Every artifact starts with a ``# lyapform <kind>`` header and a ``GRAPH
<hash>`` line.  Rationals are written ``p/q``, floats with ``repr`` so a
dump/load round trip is bit-exact.  Sets are written sorted, so the same
run always produces the same bytes.
"""

from __future__ import annotations

import io
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .errors import GraphMismatch, SpecError
from .forms import Cochain1, Potential0
from .transition import TransitionGraph


def fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def parse_number(tok: str):
    """``p/q`` and integer literals become :class:`Fraction`, anything else a float."""
    try:
        if "/" in tok:
            return Fraction(tok)
        if tok.lstrip("+-").isdigit():
            return Fraction(int(tok))
        return float(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"bad number {tok!r}") from exc


def _unify(values: list) -> tuple:
    if all(isinstance(v, Fraction) for v in values):
        return tuple(values)
    return tuple(float(v) for v in values)


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


# -- graphs and classes --------------------------------------------------------


def dump_graph(graph: TransitionGraph, xi: Cochain1) -> str:
    out = io.StringIO()
    out.write("# lyapform graph\n")
    out.write(f"GRAPH {graph.fingerprint}\n")
    out.write(f"V {graph.n}\n")
    for e in range(graph.m):
        out.write(f"E {int(graph.src[e])} {int(graph.dst[e])} {fmt(xi.weights[e])} "
                  f"{fmt(float(graph.duration[e]))}\n")
    return out.getvalue()


def load_graph(text: str) -> tuple[TransitionGraph, Cochain1]:
    """Parse ``V n`` / ``E u v weight duration``; a ``GRAPH`` line, if present,
    must match the parsed structure."""
    n, claimed = None, None
    src, dst, w, dur = [], [], [], []
    for lineno, tok in _lines(text):
        key = tok[0]
        if key == "V" and len(tok) == 2:
            n = int(tok[1])
        elif key == "GRAPH" and len(tok) == 2:
            claimed = tok[1]
        elif key == "E" and len(tok) in (4, 5):
            src.append(int(tok[1]))
            dst.append(int(tok[2]))
            w.append(parse_number(tok[3]))
            dur.append(float(tok[4]) if len(tok) == 5 else 1.0)
        else:
            raise SpecError(f"line {lineno}: cannot parse {' '.join(tok)!r}")
    if n is None:
        raise SpecError("graph file lacks a 'V n' line")
    try:
        graph = TransitionGraph(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
                                np.array(dur, dtype=np.float64))
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    if claimed is not None and claimed != graph.fingerprint:
        raise GraphMismatch(f"file claims graph {claimed}, contents hash to {graph.fingerprint}")
    return graph, Cochain1(graph.fingerprint, _unify(w))


def load_class(text: str, graph: TransitionGraph):
    """Either a full edge cochain (``C edge weight`` lines) or coefficients
    (``XI mu nu ...``), returned as ``('cochain', Cochain1)`` or
    ``('coeffs', tuple)``."""
    weights: dict[int, object] = {}
    coeffs = None
    for lineno, tok in _lines(text):
        if tok[0] == "C" and len(tok) == 3:
            e = int(tok[1])
            if not 0 <= e < graph.m:
                raise SpecError(f"line {lineno}: edge {e} out of range")
            weights[e] = parse_number(tok[2])
        elif tok[0] == "XI" and len(tok) >= 2:
            coeffs = tuple(parse_number(t) for t in tok[1:])
        elif tok[0] == "GRAPH" and len(tok) == 2:
            if tok[1] != graph.fingerprint:
                raise GraphMismatch(f"class file refers to graph {tok[1]}")
        else:
            raise SpecError(f"line {lineno}: cannot parse {' '.join(tok)!r}")
    if coeffs is not None and weights:
        raise SpecError("class file mixes C and XI lines")
    if coeffs is not None:
        return "coeffs", coeffs
    missing = [e for e in range(graph.m) if e not in weights]
    if missing:
        raise SpecError(f"class file leaves {len(missing)} edges unset (first: {missing[0]})")
    return "cochain", Cochain1(graph.fingerprint, _unify([weights[e] for e in range(graph.m)]))


# -- certificates -------------------------------------------------------------


def dump_certificate(cert) -> str:
    out = io.StringIO()
    out.write("# lyapform certificate\n")
    out.write(f"GRAPH {cert.graph_hash}\n")
    out.write(f"LAMBDA {fmt(cert.lam)}\n")
    out.write(f"SIGMA {fmt(cert.sigma)}\n")
    out.write(f"MARGIN {fmt(cert.margin)}\n")
    out.write("Y" + "".join(f" {v}" for v in sorted(cert.r_xi)) + "\n")
    for v, (f, g, L) in enumerate(zip(cert.f.values, cert.g.values, cert.L1.values)):
        out.write(f"P {v} {fmt(f)} {fmt(g)} {fmt(L)}\n")
    for e, w in enumerate(cert.omega3.weights):
        out.write(f"W {e} {fmt(w)}\n")
    return out.getvalue()


def load_certificate(text: str, graph: TransitionGraph, xi: Cochain1):
    """Rebuild a certificate from its file; verdict fields are left for
    :func:`lyapform.synthesis.verify` to recompute."""
    from .synthesis import LyapunovCertificate

    head: dict[str, object] = {}
    pots: dict[int, tuple] = {}
    w3: dict[int, object] = {}
    ys: list[int] = []
    for lineno, tok in _lines(text):
        key = tok[0]
        if key == "GRAPH":
            head["graph"] = tok[1]
        elif key in ("LAMBDA", "SIGMA", "MARGIN"):
            head[key] = None if tok[1] == "-" else parse_number(tok[1])
        elif key == "Y":
            ys = [int(t) for t in tok[1:]]
        elif key == "P" and len(tok) == 5:
            pots[int(tok[1])] = tuple(parse_number(t) for t in tok[2:])
        elif key == "W" and len(tok) == 3:
            w3[int(tok[1])] = parse_number(tok[2])
        else:
            raise SpecError(f"line {lineno}: cannot parse {' '.join(tok)!r}")
    if head.get("graph") != graph.fingerprint:
        raise GraphMismatch(f"certificate is for graph {head.get('graph')}, not {graph.fingerprint}")
    if sorted(pots) != list(range(graph.n)) or sorted(w3) != list(range(graph.m)):
        raise SpecError("certificate does not cover every vertex and edge")
    if "LAMBDA" not in head:
        raise SpecError("certificate lacks LAMBDA")
    f = Potential0(_unify([pots[v][0] for v in range(graph.n)]))
    g = Potential0(_unify([pots[v][1] for v in range(graph.n)]))
    L1 = Potential0(_unify([pots[v][2] for v in range(graph.n)]))
    omega3 = Cochain1(graph.fingerprint, _unify([w3[e] for e in range(graph.m)]))
    return LyapunovCertificate(graph.fingerprint, xi, omega3, f, g, L1, head["LAMBDA"],
                               frozenset(ys), frozenset(), head.get("SIGMA"), head.get("MARGIN"),
                               (), (), ())


# -- reports --------------------------------------------------------------------


def _vertex_list(vs: Iterable[int]) -> str:
    return " ".join(str(v) for v in sorted(vs))


def recurrence_report(graph: TransitionGraph, report) -> str:
    out = io.StringIO()
    out.write("# lyapform recurrence report\n")
    out.write(f"GRAPH {graph.fingerprint}\n")
    out.write(f"VERTICES {graph.n}\nEDGES {graph.m}\n")
    out.write(f"SCCS {len(report.components)}\n")
    ids = report.nontrivial_ids()
    out.write(f"TRANSITIVE_COMPONENTS {len(ids)}\n")
    R = sorted(report.recurrent)
    out.write(f"R {len(R)}: {_vertex_list(R)}\n")
    for cid in ids:
        out.write(f"COMPONENT {cid} {len(report.components[cid])}: "
                  f"{_vertex_list(report.components[cid])}\n")
    r_xi = report.r_xi or frozenset()
    c_xi = report.c_xi or frozenset()
    out.write(f"R_XI {len(r_xi)}: {_vertex_list(r_xi)}\n")
    out.write(f"C_XI {len(c_xi)}: {_vertex_list(c_xi)}\n")
    out.write(f"ETA_ZERO {fmt(report.eta_zero)}\n")
    for cid, sc in sorted((report.sign_classes or {}).items()):
        out.write(f"SIGN {cid} {sc.kind.value} {fmt(sc.min_mean)} {fmt(sc.max_mean)}\n")
    return out.getvalue()


def _walk_line(tag: str, w) -> str:
    if w is None:
        return f"{tag} -\n"
    return (f"{tag} weight={fmt(w.weight)} length={w.length} repeats={w.repeats} "
            f"prefix={','.join(map(str, w.prefix)) or '-'} "
            f"loop={','.join(map(str, w.loop)) or '-'} "
            f"suffix={','.join(map(str, w.suffix)) or '-'}\n")


def conditions_report(graph: TransitionGraph, cond) -> str:
    out = io.StringIO()
    out.write("# lyapform conditions report\n")
    out.write(f"GRAPH {graph.fingerprint}\n")
    out.write(f"CONDITION_A {fmt(cond.a.holds)}\n")
    if not cond.a.holds:
        out.write(_walk_line("A_VIOLATION", cond.a.violation))
    out.write(f"CONDITION_B {fmt(cond.b.holds)}\n")
    out.write(f"B_BOUND {fmt(cond.b.b)}\nB_SCALE {fmt(cond.b.s)}\n")
    if not cond.b.holds:
        out.write(_walk_line("B_WITNESS", cond.b.witness))
    out.write(f"C_XI_CLOSED {fmt(cond.c_xi_closed)}\n")
    d = cond.drift
    if d is not None:
        out.write(f"DRIFT mu={fmt(d.mu)} nu={fmt(d.nu)}\n")
        out.write(f"DRIFT_SCALED k={d.k} T={d.T} M={fmt(d.M)} c={fmt(d.c)} s={fmt(d.s)} "
                  f"mu={fmt(d.mu_paper)} nu={fmt(d.nu_paper)} T_bound={d.T_paper}\n")
    fr = cond.fried
    if fr is not None:
        out.write(f"FRIED verdict={fmt(fr.verdict)} max_normalized={fmt(fr.max_normalized)} "
                  f"samples={fr.samples}\n")
    return out.getvalue()


def refusal_report(graph: TransitionGraph, refusal) -> str:
    out = io.StringIO()
    out.write("# lyapform refusal\n")
    out.write(f"GRAPH {graph.fingerprint}\n")
    out.write(f"REASON {refusal.reason}\n")
    out.write(f"DETAIL {refusal.detail}\n")
    out.write(_walk_line("WITNESS", refusal.witness))
    if refusal.witness is not None:
        vs = [int(graph.src[e]) for e in refusal.witness.edges()]
        out.write(f"WITNESS_VERTICES {' '.join(map(str, vs))}\n")
    return out.getvalue()


def section_report(graph: TransitionGraph, cmap, section) -> str:
    out = io.StringIO()
    out.write("# lyapform section\n")
    out.write(f"GRAPH {graph.fingerprint}\n")
    out.write(f"THETA {fmt(section.theta)}\n")
    out.write(f"BASES {' '.join(map(str, cmap.base))}\n")
    out.write(f"K {len(section.edges)}\n")
    for e in section.edges:
        out.write(f"CROSS {e} {int(graph.src[e])} {int(graph.dst[e])} "
                  f"{section.crossings[e]} {fmt(section.params[e])}\n")
    for v, (F, a) in enumerate(zip(cmap.lift, cmap.angle)):
        out.write(f"ANGLE {v} {fmt(F)} {fmt(a)}\n")
    return out.getvalue()


def vertex_csv(graph: TransitionGraph, report, grid=None, potential: Optional[list] = None,
               angle: Optional[tuple] = None) -> str:
    """Per-vertex plot data: grid index, SCC, label, potential and angle."""
    r_xi = report.r_xi or frozenset()
    c_xi = report.c_xi or frozenset()
    d = grid.space.dim if grid is not None else 0
    cols = ["vertex"] + [f"i{k}" for k in range(d)] + ["scc", "label", "potential", "angle"]
    out = io.StringIO()
    out.write(",".join(cols) + "\n")
    for v in range(graph.n):
        label = "r_xi" if v in r_xi else "c_xi" if v in c_xi else "transient"
        row = [str(v)]
        if grid is not None:
            row += [str(int(i)) for i in grid.multi(v)]
        row += [str(report.scc_of[v]), label,
                "" if potential is None else fmt(potential[v]),
                "" if angle is None else fmt(angle[v])]
        out.write(",".join(row) + "\n")
    return out.getvalue()


def edge_csv(graph: TransitionGraph, xi: Cochain1, omega: Optional[Cochain1] = None) -> str:
    out = io.StringIO()
    out.write("edge,src,dst,duration,xi,omega3\n")
    for e in range(graph.m):
        out.write(f"{e},{int(graph.src[e])},{int(graph.dst[e])},{fmt(float(graph.duration[e]))},"
                  f"{fmt(xi.weights[e])},{'' if omega is None else fmt(omega.weights[e])}\n")
    return out.getvalue()
