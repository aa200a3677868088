"""Command line front end.

Subcommands ``analyze``, ``synthesize``, ``section``, ``verify`` and
``fixtures list|run``.  A problem comes from exactly one of a graph file,
a built-in flow (``--field``) or a named fixture.  Reports go to ``--out``,
else to ``$LYAPFORM_OUT``, else to ``./lyapform-out``.

Exit status: 0 success, 2 refusal (or a rejected certificate), 1 error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import fixtures as fx
from . import formats
from .conditions import analyze_conditions
from .errors import LyapformError, SpecError
from .forms import Cochain1, LinearForm, pull_back
from .phase_space import BoxGrid, VectorFieldSpec, box_map
from .section import build_circle_map, extract_cross_section
from .synthesis import LyapunovCertificate, pipeline, verify
from .transition import TransitionGraph, scc_decompose
from .twisted import compute_r_xi

ENV_OUT = "LYAPFORM_OUT"

FIELDS = {
    "example1": VectorFieldSpec.example1_product,
    "example2": VectorFieldSpec.example2_torus,
    "example3": VectorFieldSpec.example3_irrational,
    "ring": VectorFieldSpec.planar_ring_torus,
}


@dataclass
class RunSpec:
    """Everything a run needs; exactly one source of the graph."""

    graph_file: Optional[Path] = None
    flow: Optional[str] = None
    fixture: Optional[str] = None
    params: dict = field(default_factory=dict)
    res: int = 32
    tau: float = 1.0
    pad: Optional[float] = None
    xi: Optional[tuple] = None
    class_file: Optional[Path] = None
    eta_zero: Optional[float] = None
    out: Optional[Path] = None
    theta: object = 0

    def validate(self):
        given = [x is not None for x in (self.graph_file, self.flow, self.fixture)]
        if sum(given) != 1:
            raise SpecError("give exactly one of --graph, --field, --fixture")
        if self.res < 4:
            raise SpecError("resolution must be at least 4 per axis")

    def out_dir(self) -> Path:
        return Path(self.out or os.environ.get(ENV_OUT) or "lyapform-out")


@dataclass
class Problem:
    graph: TransitionGraph
    xi: Cochain1
    grid: Optional[BoxGrid] = None


def _param(text: str):
    key, _, val = text.partition("=")
    if not key or not _:
        raise SpecError(f"parameter {text!r} is not key=value")
    if val.lower() in ("true", "false"):
        return key, val.lower() == "true"
    try:
        return key, formats.parse_number(val)
    except SpecError:
        return key, val


def load_problem(spec: RunSpec) -> Problem:
    spec.validate()
    if spec.fixture is not None:
        f = fx.get(spec.fixture, **spec.params)
        graph, xi, grid, form = f.graph, f.xi, f.grid, f.form
    elif spec.graph_file is not None:
        graph, xi = formats.load_graph(spec.graph_file.read_text())
        grid = form = None
    else:
        if spec.flow not in FIELDS:
            raise SpecError(f"unknown field {spec.flow!r}; known: {', '.join(FIELDS)}")
        flow = FIELDS[spec.flow](**spec.params)
        grid = BoxGrid(flow.space, (spec.res,) * flow.space.dim)
        graph = box_map(flow, grid, tau=spec.tau, pad=spec.pad)
        form, xi = None, None
        if spec.xi is not None:
            sp = flow.space
            form = LinearForm(spec.xi, sp.lo, sp.hi, sp.periodic)
            xi = pull_back(form, graph)
    if spec.class_file is not None:
        kind, val = formats.load_class(spec.class_file.read_text(), graph)
        if kind == "cochain":
            xi = val
        else:
            if grid is None:
                raise SpecError("XI coefficients need a flow; a bare graph file has no geometry")
            sp = grid.space
            xi = pull_back(LinearForm(val, sp.lo, sp.hi, sp.periodic), graph)
    if xi is None:
        raise SpecError("no class given: use --xi or --class")
    return Problem(graph, xi, grid)


def _write(out: Path, name: str, text: str):
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _analyze(spec: RunSpec, prob: Problem, fried: bool = True):
    report = compute_r_xi(prob.graph, prob.xi, spec.eta_zero, scc_decompose(prob.graph))
    cond = analyze_conditions(prob.graph, prob.xi, report, with_fried=fried)
    out = spec.out_dir()
    _write(out, "graph.txt", formats.dump_graph(prob.graph, prob.xi))
    _write(out, "recurrence.report", formats.recurrence_report(prob.graph, report))
    _write(out, "conditions.report", formats.conditions_report(prob.graph, cond))
    return report, cond


def run(command: str, spec: RunSpec, stdout=None) -> int:
    """Run one subcommand; returns the exit status."""
    stdout = stdout or sys.stdout
    prob = load_problem(spec)
    out = spec.out_dir()
    report, cond = _analyze(spec, prob)
    print(f"graph {prob.graph.fingerprint}: {prob.graph.n} vertices, {prob.graph.m} edges; "
          f"|R|={len(report.recurrent)} |R_xi|={len(report.r_xi)} |C_xi|={len(report.c_xi)}; "
          f"(A)={formats.fmt(cond.a.holds)} (B)={formats.fmt(cond.b.holds)}", file=stdout)
    if command == "analyze":
        _write(out, "vertices.csv", formats.vertex_csv(prob.graph, report, prob.grid))
        _write(out, "edges.csv", formats.edge_csv(prob.graph, prob.xi))
        return 0
    res = pipeline(prob.graph, prob.xi, spec.eta_zero, report)
    if not isinstance(res, LyapunovCertificate):
        _write(out, "refusal.report", formats.refusal_report(prob.graph, res))
        _write(out, "vertices.csv", formats.vertex_csv(prob.graph, report, prob.grid))
        _write(out, "edges.csv", formats.edge_csv(prob.graph, prob.xi))
        w = res.witness
        print(f"refused: condition ({res.reason}) fails; witness weight "
              f"{formats.fmt(w.weight) if w else '-'}", file=stdout)
        return 2
    _write(out, "lyapunov.cert", formats.dump_certificate(res))
    angle = None
    if command == "section":
        cmap = build_circle_map(prob.graph, res, spec.eta_zero)
        sec = extract_cross_section(cmap, spec.theta)
        _write(out, "section.report", formats.section_report(prob.graph, cmap, sec))
        angle = cmap.angle
        print(f"section at theta={formats.fmt(sec.theta)}: {len(sec.edges)} edges", file=stdout)
    _write(out, "vertices.csv", formats.vertex_csv(prob.graph, report, prob.grid,
                                                   res.potential(), angle))
    _write(out, "edges.csv", formats.edge_csv(prob.graph, prob.xi, res.omega3))
    print(f"certificate written; margin {formats.fmt(res.margin)}, lambda {formats.fmt(res.lam)}",
          file=stdout)
    return 0


def run_verify(cert_file: Path, graph_file: Path, class_file: Optional[Path] = None,
               stdout=None) -> int:
    stdout = stdout or sys.stdout
    graph, xi = formats.load_graph(graph_file.read_text())
    if class_file is not None:
        kind, val = formats.load_class(class_file.read_text(), graph)
        if kind != "cochain":
            raise SpecError("verify needs an explicit cochain (C lines)")
        xi = val
    cert = formats.load_certificate(cert_file.read_text(), graph, xi)
    result = verify(graph, xi, cert)
    if result.ok:
        print("certificate verified", file=stdout)
        return 0
    print("certificate rejected:", file=stdout)
    for p in result.problems[:20]:
        print(f"  {p}", file=stdout)
    return 2


# -- argument parsing ---------------------------------------------------------


def _add_problem_args(p: argparse.ArgumentParser, fixture: bool = True):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--graph", type=Path, help="graph file (V/E lines)")
    src.add_argument("--field", choices=sorted(FIELDS), help="built-in flow")
    if fixture:
        src.add_argument("--fixture", help="named fixture")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="flow or fixture parameter (repeatable)")
    p.add_argument("--res", type=int, default=32, help="boxes per axis")
    p.add_argument("--tau", type=float, default=1.0, help="time step of the box map")
    p.add_argument("--pad", type=float, default=None, help="enclosure padding")
    p.add_argument("--xi", nargs="+", default=None, metavar="C",
                   help="class as coefficients of dx_i (p/q or decimal)")
    p.add_argument("--class", dest="class_file", type=Path, default=None,
                   help="class file (C or XI lines)")
    p.add_argument("--eta-zero", type=float, default=None, help="zero tolerance for float classes")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--theta", default="0", help="section level in [0, 1)")


def _spec(args, fixture: Optional[str] = None) -> RunSpec:
    params = dict(_param(t) for t in args.param)
    return RunSpec(
        graph_file=getattr(args, "graph", None),
        flow=getattr(args, "field", None),
        fixture=fixture if fixture is not None else getattr(args, "fixture", None),
        params=params, res=args.res, tau=args.tau, pad=args.pad,
        xi=None if args.xi is None else tuple(formats.parse_number(t) for t in args.xi),
        class_file=args.class_file, eta_zero=args.eta_zero, out=args.out,
        theta=formats.parse_number(args.theta),
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lyapform",
                                 description="Lyapunov one-forms for flows and transition graphs")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in (("analyze", "recurrence and conditions reports"),
                       ("synthesize", "build a certificate or a refusal"),
                       ("section", "certificate plus circle map and cross section")):
        _add_problem_args(sub.add_parser(name, help=text))
    v = sub.add_parser("verify", help="re-check a certificate file")
    v.add_argument("--cert", type=Path, required=True)
    v.add_argument("--graph", type=Path, required=True)
    v.add_argument("--class", dest="class_file", type=Path, default=None)
    f = sub.add_parser("fixtures", help="built-in problems")
    fsub = f.add_subparsers(dest="action", required=True)
    fsub.add_parser("list")
    r = fsub.add_parser("run")
    r.add_argument("name")
    r.add_argument("--section", action="store_true", help="also extract a cross section")
    _add_problem_args(r, fixture=False)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return run_verify(args.cert, args.graph, args.class_file)
        if args.command == "fixtures":
            if args.action == "list":
                for name in fx.REGISTRY:
                    print(name)
                return 0
            spec = _spec(args, fixture=args.name)
            spec.graph_file = spec.flow = None
            return run("section" if args.section else "synthesize", spec)
        return run(args.command, _spec(args))
    except (LyapformError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
