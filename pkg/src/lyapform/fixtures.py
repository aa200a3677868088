"""Named problem instances: small hand graphs and flows on the torus.

Every fixture bundles a transition graph with a class ``xi`` on it and, for
flows, the grid, field and form they came from.  Builders are cached since
the box maps cost a few seconds.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .errors import SpecError
from .forms import Cochain1, LinearForm, pull_back
from .phase_space import BoxGrid, VectorFieldSpec, box_map
from .transition import TransitionGraph


@dataclass
class Fixture:
    name: str
    graph: TransitionGraph
    xi: Cochain1
    description: str = ""
    grid: Optional[BoxGrid] = None
    flow: Optional[VectorFieldSpec] = None
    form: Optional[LinearForm] = None
    params: dict = field(default_factory=dict)


def _hand(n, edges, weights, name, description):
    g = TransitionGraph.from_edges(n, edges)
    return Fixture(name, g, Cochain1.of(g, [Fraction(w) for w in weights]), description)


def g1() -> Fixture:
    return _hand(3, [(0, 1), (1, 0), (1, 2), (2, 2)], [-1, -1, 0, 0], "g1",
                 "2-cycle of weight -2 feeding a zero self-loop")


def g3() -> Fixture:
    return _hand(1, [(0, 0)], [1], "g3", "single positive self-loop")


def g4() -> Fixture:
    return _hand(3, [(0, 1), (1, 0), (1, 2), (2, 1)], [0, 0, 1, 0], "g4",
                 "zero 2-cycle sharing a vertex with a +1 2-cycle")


def g5() -> Fixture:
    return _hand(2, [(0, 1), (1, 0), (0, 1)], [1, -1, 0], "g5",
                 "parallel edges giving cycles of weight 0 and -1")


def cycle3() -> Fixture:
    return _hand(3, [(0, 1), (1, 2), (2, 0)], [Fraction(-1, 3)] * 3, "cycle3",
                 "3-cycle of weight -1, an integral class")


def _flow(name, fld, res, coeffs, pad=None, tau=1.0, description="", **params) -> Fixture:
    grid = BoxGrid(fld.space, res)
    graph = box_map(fld, grid, tau=tau, pad=pad)
    sp = fld.space
    form = LinearForm(coeffs, sp.lo, sp.hi, sp.periodic)
    xi = pull_back(form, graph)
    return Fixture(name, graph, xi, description, grid, fld, form,
                   dict(params, res=res, pad=pad, tau=tau, coeffs=tuple(coeffs)))


@functools.lru_cache(maxsize=None)
def example1(res: int = 32) -> Fixture:
    fld = VectorFieldSpec.example1_product()
    return _flow("example1", fld, (res, res), (0, -1), pad=0.5 / res,
                 description="product of cos(theta) on the circle with a fibre flow; xi = -dy")


@functools.lru_cache(maxsize=None)
def example2(mu=0, nu=-1, res: int = 32, sigma: float = 0.1) -> Fixture:
    fld = VectorFieldSpec.example2_torus(1, 1, (0.5, 0.5), sigma)
    pad = 0.5 / res
    return _flow("example2", fld, (res, res), (Fraction(mu), Fraction(nu)), pad=pad,
                 description="slope-1 flow slowed to rest at p = (1/2, 1/2)",
                 mu=mu, nu=nu, p=(0.5, 0.5), sigma=sigma)


@functools.lru_cache(maxsize=None)
def example2_uniform(res: int = 32) -> Fixture:
    fld = VectorFieldSpec.example2_torus(1, 1, uniform=True)
    return _flow("example2_uniform", fld, (res, res), (0, -1), pad=0.5 / res,
                 description="rigid slope-1 flow (f = 1), no rest point; xi = -dy")


@functools.lru_cache(maxsize=None)
def example3(res: int = 32) -> Fixture:
    b = math.sqrt(2)
    fld = VectorFieldSpec.example3_irrational(1.0, b)
    # mu a + nu b = 0 with (mu, nu) = (sqrt 2, -1)
    return _flow("example3", fld, (res, res), (b, -1.0),
                 description="irrational linear flow (1, sqrt 2); xi = sqrt2 dx - dy",
                 mu=b, nu=-1.0)


@functools.lru_cache(maxsize=None)
def ring(res: int = 48) -> Fixture:
    fld = VectorFieldSpec.planar_ring_torus()
    return _flow("ring", fld, (res, res), (0, 1),
                 description="planar ring with glued boundary circles; xi = dy")


REGISTRY: dict[str, Callable[..., Fixture]] = {
    "g1": g1,
    "g3": g3,
    "g4": g4,
    "g5": g5,
    "cycle3": cycle3,
    "example1": example1,
    "example2": example2,
    "example2_uniform": example2_uniform,
    "example3": example3,
    "ring": ring,
}


def get(name: str, **kwargs) -> Fixture:
    try:
        builder = REGISTRY[name]
    except KeyError:
        raise SpecError(f"unknown fixture {name!r}; known: {', '.join(REGISTRY)}") from None
    return builder(**kwargs)
