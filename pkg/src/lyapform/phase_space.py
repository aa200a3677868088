"""Phase spaces, vector fields, numerical flows and cubical box maps.

Spaces are products of intervals, some of them periodic, carrying the flat
metric of their coordinates.  A flow enters the combinatorial world through
:func:`box_map`, a padded sampling enclosure of its time-``tau`` map.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import IntegrationDiverged, MapConstructionFailed, SpecError
from .transition import EdgeGeometry, TransitionGraph


class SpaceKind(enum.Enum):
    Torus2 = "Torus2"
    Annulus = "Annulus"
    ProductWithCircle = "ProductWithCircle"


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x).limit_denominator(10**12)


@dataclass(frozen=True)
class PhaseSpace:
    """Box ``prod [lo_i, hi_i)`` with periodic axes identified end to end."""

    kind: SpaceKind
    lo: tuple
    hi: tuple
    periodic: tuple

    def __post_init__(self):
        lo = tuple(_frac(v) for v in self.lo)
        hi = tuple(_frac(v) for v in self.hi)
        if not (len(lo) == len(hi) == len(self.periodic)):
            raise SpecError("bounds and periodicity flags must have equal length")
        if any(h <= l for l, h in zip(lo, hi)):
            raise SpecError("every axis needs lo < hi (periods and radial bounds positive)")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "periodic", tuple(bool(p) for p in self.periodic))

    @classmethod
    def torus2(cls, periods=(1, 1)) -> "PhaseSpace":
        return cls(SpaceKind.Torus2, (0, 0), tuple(periods), (True, True))

    @classmethod
    def annulus(cls, r_min, r_max) -> "PhaseSpace":
        """Coordinates ``(r, theta)`` with ``theta`` measured in turns."""
        return cls(SpaceKind.Annulus, (r_min, 0), (r_max, 1), (False, True))

    @classmethod
    def product_with_circle(cls, lo, hi, periodic_base=True) -> "PhaseSpace":
        """``M x S^1`` with ``M`` an interval or circle ``[lo, hi)``."""
        return cls(SpaceKind.ProductWithCircle, (lo, 0), (hi, 1), (periodic_base, True))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def lo_f(self) -> np.ndarray:
        return np.array([float(v) for v in self.lo])

    @property
    def hi_f(self) -> np.ndarray:
        return np.array([float(v) for v in self.hi])

    def period(self, i: int) -> Optional[Fraction]:
        return self.hi[i] - self.lo[i] if self.periodic[i] else None

    @property
    def periods_f(self) -> list:
        return [float(self.period(i)) if self.periodic[i] else None for i in range(self.dim)]

    def wrap(self, x: np.ndarray) -> np.ndarray:
        """Reduce periodic coordinates into ``[lo, hi)``; clamp the others."""
        x = np.array(x, dtype=float, copy=True)
        lo, hi = self.lo_f, self.hi_f
        for i in range(self.dim):
            if self.periodic[i]:
                x[..., i] = lo[i] + np.mod(x[..., i] - lo[i], hi[i] - lo[i])
            else:
                x[..., i] = np.clip(x[..., i], lo[i], hi[i])
        return x

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        ok = True
        for i in range(self.dim):
            if not self.periodic[i]:
                ok &= bool(self.lo_f[i] <= x[i] <= self.hi_f[i])
        return ok and bool(np.all(np.isfinite(x)))

    @property
    def diameter(self) -> float:
        half = [(h - l) / 2 if p else (h - l) for l, h, p in zip(self.lo_f, self.hi_f, self.periodic)]
        return float(np.linalg.norm(half))


# -- vector fields -----------------------------------------------------------


class FieldKind(enum.Enum):
    Example1Product = "Example1Product"
    Example2Torus = "Example2Torus"
    Example3Irrational = "Example3Irrational"
    PlanarRingTorus = "PlanarRingTorus"
    TabulatedGrid = "TabulatedGrid"


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """C-infinity transition from 0 (t <= 0) to 1 (t >= 1)."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def _circle_dist(u: np.ndarray, c: float) -> np.ndarray:
    d = np.mod(u - c, 1.0)
    return np.minimum(d, 1.0 - d)


def bump(u: np.ndarray, center: float, inner: float, outer: float) -> np.ndarray:
    """Smooth periodic bump: 1 within ``inner`` of ``center``, 0 beyond ``outer``."""
    d = _circle_dist(u, center)
    return _smoothstep((outer - d) / (outer - inner))


def continued_fraction(x: float, depth: int = 12, tol: float = 1e-9) -> list[int]:
    """Partial quotients of ``x``; stops early when the remainder vanishes."""
    out = []
    for _ in range(depth):
        a = math.floor(x)
        out.append(a)
        r = x - a
        if r < tol:
            break
        x = 1.0 / r
    return out


def looks_irrational(x: float, depth: int = 12, tol: float = 1e-9) -> bool:
    return len(continued_fraction(x, depth, tol)) >= depth


@dataclass(frozen=True, eq=False)
class VectorFieldSpec:
    """A vector field on a :class:`PhaseSpace`, vectorised over points."""

    kind: FieldKind
    space: PhaseSpace
    params: dict = field(default_factory=dict)
    rhs: Callable[[np.ndarray], np.ndarray] = field(default=None, repr=False)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.rhs(np.atleast_2d(x))

    # constructors ---------------------------------------------------------

    @classmethod
    def example1_product(cls, speed: float = 0.25, inner: float = 0.08, outer: float = 0.16):
        """Product flow on ``S^1 x S^1`` (coordinates in turns).

        The base field ``speed*cos(2 pi u) d/du`` has rest points at
        ``u = 1/4`` (attracting) and ``u = 3/4`` (repelling).  Over the first
        the fibre carries ``cos(2 pi y) d/dy``, over the second ``d/dy``.
        """
        if not 0 < inner < outer < 0.25:
            raise SpecError("need 0 < inner < outer < 1/4 so the bumps stay disjoint")
        space = PhaseSpace.product_with_circle(0, 1, True)

        def rhs(x):
            u, y = x[:, 0], x[:, 1]
            f1 = bump(u, 0.25, inner, outer)
            f2 = bump(u, 0.75, inner, outer)
            du = speed * np.cos(2 * np.pi * u)
            dy = speed * (f1 * np.cos(2 * np.pi * y) + f2)
            return np.stack([du, dy], axis=1)

        return cls(FieldKind.Example1Product, space,
                   dict(speed=speed, inner=inner, outer=outer), rhs)

    @classmethod
    def example2_torus(cls, a=1, b=1, p=(0.5, 0.5), sigma: float = 0.1, uniform: bool = False):
        """``f(x, y) * (a d/dx + b d/dy)`` on the unit torus.

        ``f = 1 - exp(-rho^2 / sigma^2)`` where ``rho`` is a smooth periodic
        distance to ``p``; it vanishes at ``p`` only.  ``uniform=True`` sets
        ``f = 1`` (a rigid linear flow with no rest point).
        """
        if b == 0:
            raise SpecError("Example2 requires b != 0")
        ratio = Fraction(a) / Fraction(b) if all(isinstance(v, (int, Fraction)) for v in (a, b)) else None
        if ratio is None and looks_irrational(float(a) / float(b)):
            raise SpecError("Example2 requires a rational slope a/b")
        space = PhaseSpace.torus2()
        vel = np.array([float(a), float(b)])
        px, py = float(p[0]), float(p[1])

        def rhs(x):
            if uniform:
                f = np.ones(len(x))
            else:
                rho2 = (np.sin(np.pi * (x[:, 0] - px)) ** 2 + np.sin(np.pi * (x[:, 1] - py)) ** 2) / np.pi**2
                f = -np.expm1(-rho2 / sigma**2)
            return f[:, None] * vel

        return cls(FieldKind.Example2Torus, space,
                   dict(a=a, b=b, p=(px, py), sigma=sigma, uniform=uniform), rhs)

    @classmethod
    def example3_irrational(cls, a=1.0, b=math.sqrt(2)):
        """Linear flow ``a d/dx + b d/dy`` with irrational slope."""
        if b == 0:
            raise SpecError("Example3 requires b != 0")
        if not looks_irrational(abs(float(a) / float(b))):
            raise SpecError("Example3 requires an irrational slope a/b")
        space = PhaseSpace.torus2()
        vel = np.array([float(a), float(b)])

        def rhs(x):
            return np.broadcast_to(vel, x.shape).copy()

        return cls(FieldKind.Example3Irrational, space, dict(a=a, b=b), rhs)

    @classmethod
    def planar_ring_torus(cls):
        """The planar ring ``1 <= r <= 5`` with ``r = 1`` glued to ``r = 5``.

        Coordinates ``(r, y)`` with ``r`` periodic of period 4 and ``y`` the
        angle in turns; ``r' = (r-1)^2 (r-3)^2 (r-5)^2`` and
        ``2 pi y' = sin(r pi / 2)``.
        """
        space = PhaseSpace(SpaceKind.Torus2, (1, 0), (5, 1), (True, True))

        def rhs(x):
            r = 1.0 + np.mod(x[:, 0] - 1.0, 4.0)
            dr = ((r - 1) * (r - 3) * (r - 5)) ** 2
            dy = np.sin(r * np.pi / 2) / (2 * np.pi)
            return np.stack([dr, dy], axis=1)

        return cls(FieldKind.PlanarRingTorus, space, {}, rhs)

    @classmethod
    def tabulated(cls, space: PhaseSpace, values: np.ndarray):
        """Multilinear interpolation of node values ``values[i0, ..., i_{d-1}, :]``.

        Nodes sit at ``lo + k * (hi - lo) / n_k`` on periodic axes and at
        ``n_k`` evenly spaced points including both ends otherwise.
        """
        from scipy.interpolate import RegularGridInterpolator

        values = np.asarray(values, dtype=float)
        d = space.dim
        if values.ndim != d + 1 or values.shape[-1] != d:
            raise SpecError("tabulated field needs shape (n_0, ..., n_{d-1}, d)")
        axes = []
        for i in range(d):
            lo, hi = float(space.lo[i]), float(space.hi[i])
            n = values.shape[i]
            if space.periodic[i]:
                axes.append(np.linspace(lo, hi, n + 1))
                values = np.concatenate([values, np.take(values, [0], axis=i)], axis=i)
            else:
                axes.append(np.linspace(lo, hi, n))
        interp = RegularGridInterpolator(tuple(axes), values)

        def rhs(x):
            return interp(space.wrap(x))

        return cls(FieldKind.TabulatedGrid, space, dict(shape=values.shape), rhs)


# -- integration -------------------------------------------------------------


def _rk4(field: VectorFieldSpec, x: np.ndarray, tau: float, h: Optional[float],
         record_every: int = 0):
    """Classical RK4 in cover coordinates; optionally records the path."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if h is None:
        h = tau / 64 if tau > 0 else 1.0
    if h <= 0:
        raise ValueError("step h must be > 0")
    steps = int(math.ceil(tau / h - 1e-12)) if tau > 0 else 0
    space = field.space
    clamp = not all(space.periodic)
    x = np.array(x, dtype=float, copy=True)
    path = [x.copy()] if record_every else None
    if steps:
        h = tau / steps
    for k in range(steps):
        k1 = field(x)
        k2 = field(x + 0.5 * h * k1)
        k3 = field(x + 0.5 * h * k2)
        k4 = field(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if clamp:
            for i in range(space.dim):
                if not space.periodic[i]:
                    x[:, i] = np.clip(x[:, i], float(space.lo[i]), float(space.hi[i]))
        if not np.all(np.isfinite(x)):
            raise IntegrationDiverged(f"non-finite state after {k + 1} steps")
        if record_every and ((k + 1) % record_every == 0 or k + 1 == steps):
            path.append(x.copy())
    return x, path


def integrate(field: VectorFieldSpec, x, tau: float, h: Optional[float] = None,
              unwrapped: bool = False) -> np.ndarray:
    """Time-``tau`` flow of ``x`` (one point or an ``(N, d)`` array).

    Periodic coordinates are wrapped unless ``unwrapped`` is set, in which
    case the result lives in the universal cover.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if not np.all(np.isfinite(x)):
        raise IntegrationDiverged("non-finite initial state")
    out, _ = _rk4(field, np.atleast_2d(x), tau, h)
    if not unwrapped:
        out = field.space.wrap(out)
    return out[0] if single else out


# -- grids -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BoxGrid:
    """Uniform cubical tiling of a :class:`PhaseSpace`.

    Box index ``v`` corresponds to the multi-index ``np.unravel_index(v,
    res)``.
    """

    space: PhaseSpace
    res: tuple

    def __post_init__(self):
        res = tuple(int(r) for r in self.res)
        if len(res) != self.space.dim or any(r < 1 for r in res):
            raise SpecError("resolution must be a positive integer per axis")
        object.__setattr__(self, "res", res)

    @property
    def n(self) -> int:
        return int(np.prod(self.res))

    @property
    def lo(self):
        return self.space.lo

    @property
    def hi(self):
        return self.space.hi

    @property
    def width(self) -> tuple:
        return tuple((h - l) / r for l, h, r in zip(self.space.lo, self.space.hi, self.res))

    @property
    def width_f(self) -> np.ndarray:
        return np.array([float(w) for w in self.width])

    @property
    def delta(self) -> float:
        """Cell diagonal, the grid's jump scale."""
        return float(np.linalg.norm(self.width_f))

    def multi(self, v: int) -> tuple:
        return tuple(int(i) for i in np.unravel_index(v, self.res))

    def index(self, multi: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(multi), self.res))

    def center_exact(self, v: int, offset=None) -> tuple:
        idx = self.multi(v)
        c = [l + (Fraction(i) + Fraction(1, 2)) * w for l, i, w in zip(self.space.lo, idx, self.width)]
        if offset is not None:
            c = [ci + int(k) * (self.space.period(i) or 0) for i, (ci, k) in enumerate(zip(c, offset))]
        return tuple(c)

    def center(self, v: int, offset=None) -> np.ndarray:
        idx = np.array(self.multi(v), dtype=float)
        c = self.space.lo_f + (idx + 0.5) * self.width_f
        if offset is not None:
            per = np.array([p or 0.0 for p in self.space.periods_f])
            c = c + np.asarray(offset, dtype=float) * per
        return c

    def centers(self) -> np.ndarray:
        idx = np.stack(np.unravel_index(np.arange(self.n), self.res), axis=1).astype(float)
        return self.space.lo_f + (idx + 0.5) * self.width_f

    def corners(self, v: int) -> np.ndarray:
        idx = np.array(self.multi(v), dtype=float)
        base = self.space.lo_f + idx * self.width_f
        return np.array([base + np.array(c) * self.width_f
                         for c in itertools.product((0, 1), repeat=self.space.dim)])

    def sample_points(self) -> np.ndarray:
        """Box centres plus grid nodes (the box corners)."""
        axes = []
        for i in range(self.space.dim):
            k = self.res[i] if self.space.periodic[i] else self.res[i] + 1
            axes.append(float(self.space.lo[i]) + np.arange(k) * float(self.width[i]))
        nodes = np.array(list(itertools.product(*axes)))
        return np.vstack([self.centers(), nodes])

    def locate(self, x) -> np.ndarray:
        """Box index of each (wrapped) point."""
        x = self.space.wrap(np.atleast_2d(x))
        idx = np.floor((x - self.space.lo_f) / self.width_f).astype(np.int64)
        idx = np.clip(idx, 0, np.array(self.res) - 1)
        return np.ravel_multi_index(tuple(idx.T), self.res)

    def boxes_meeting(self, lo: np.ndarray, hi: np.ndarray, tol: float = 1e-9):
        """``(box, offset)`` for every lattice translate whose interior meets
        the closed cover-coordinate box ``[lo, hi]``."""
        ranges = []
        w = self.width_f
        L = self.space.lo_f
        for i in range(self.space.dim):
            a = math.floor((lo[i] - L[i]) / w[i] + tol)
            b = math.ceil((hi[i] - L[i]) / w[i] - tol) - 1
            if not self.space.periodic[i]:
                a, b = max(a, 0), min(b, self.res[i] - 1)
            ranges.append(range(a, b + 1))
        out = []
        for raw in itertools.product(*ranges):
            idx, off = [], []
            for i, j in enumerate(raw):
                if self.space.periodic[i]:
                    q, r = divmod(j, self.res[i])
                    idx.append(r)
                    off.append(q)
                else:
                    idx.append(j)
                    off.append(0)
            out.append((self.index(idx), tuple(off)))
        return out


def _box_samples(grid: BoxGrid, boxes: np.ndarray, s: int) -> np.ndarray:
    """Nodes of an ``s``-fold subdivision of each box, then its centre."""
    d = grid.space.dim
    frac = np.array(list(itertools.product(np.linspace(0.0, 1.0, s + 1), repeat=d)))
    frac = np.vstack([frac, np.full((1, d), 0.5)])
    centers = grid.centers()[boxes]
    base = centers - 0.5 * grid.width_f
    return base[:, None, :] + frac[None, :, :] * grid.width_f


def _spacing(img: np.ndarray, s: int, d: int) -> np.ndarray:
    """Largest sup-norm gap between images of neighbouring nodes, per box."""
    nodes = img[:, :-1, :].reshape((img.shape[0],) + (s + 1,) * d + (d,))
    gap = np.zeros(img.shape[0])
    for ax in range(1, d + 1):
        diff = np.abs(np.diff(nodes, axis=ax)).max(axis=-1)
        gap = np.maximum(gap, diff.reshape(img.shape[0], -1).max(axis=1))
    return gap


def box_map(field: VectorFieldSpec, grid: BoxGrid, tau: float = 1.0,
            pad: Optional[float] = None, h: Optional[float] = None,
            path_points: int = 8, max_subdiv: int = 16) -> TransitionGraph:
    """Padded sampling enclosure of the time-``tau`` map.

    Corners and centre of every box are integrated; boxes whose neighbouring
    sample images drift further apart than ``pad`` are resampled on a finer
    subdivision (up to ``max_subdiv`` per axis).  There is an edge ``u -> v``
    whenever some sample image of ``u``, inflated by ``pad`` in the sup norm
    (default pad: one cell diagonal), meets the interior of ``v``.  Each edge
    keeps the lattice translate of its target met by the sample image that
    produced it, so a box whose image wraps differently can carry parallel
    edges; every vertex keeps the unwrapped trajectory of its centre.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1 so each edge is a chain step of time >= 1")
    if pad is None:
        pad = grid.delta
    if pad < 0:
        raise ValueError("pad must be >= 0")
    if grid.space != field.space:
        raise SpecError("grid and field live on different spaces")
    n, d = grid.n, grid.space.dim
    if h is None:
        h = tau / 64
    steps = int(math.ceil(tau / h - 1e-12))
    every = max(1, steps // max(1, path_points))

    # centre trajectories, recorded for line integrals
    try:
        _, path = _rk4(field, grid.centers(), tau, h, record_every=every)
    except IntegrationDiverged as exc:
        raise MapConstructionFailed(str(exc)) from exc
    paths = np.stack(path, axis=1)

    images: list[tuple[np.ndarray, np.ndarray]] = []
    todo = np.arange(n)
    s = 1
    while todo.size:
        pts = _box_samples(grid, todo, s)
        try:
            img, _ = _rk4(field, pts.reshape(-1, d), tau, h)
        except IntegrationDiverged as exc:
            raise MapConstructionFailed(str(exc)) from exc
        img = img.reshape(pts.shape)
        if pad > 0 and 2 * s <= max_subdiv:
            coarse = _spacing(img, s, d) > pad
        else:
            coarse = np.zeros(todo.size, dtype=bool)
        done = ~coarse
        for b, im in zip(todo[done], img[done]):
            images.append((np.full(len(im), b), im))
        todo = todo[coarse]
        s *= 2

    owner = np.concatenate([o for o, _ in images])
    pts = np.concatenate([p for _, p in images])
    L, w = grid.space.lo_f, grid.width_f
    tol = 1e-9
    lo = np.floor((pts - pad - L) / w + tol).astype(np.int64)
    hi = np.ceil((pts + pad - L) / w - tol).astype(np.int64) - 1
    span = int((hi - lo).max()) + 1 if len(pts) else 0
    grids = np.array(list(itertools.product(range(max(span, 0)), repeat=d)), dtype=np.int64)
    raw = lo[:, None, :] + grids[None, :, :]
    ok = np.all(raw <= hi[:, None, :], axis=-1)
    res = np.array(grid.res, dtype=np.int64)
    for i in range(d):
        if not grid.space.periodic[i]:
            ok &= (raw[..., i] >= 0) & (raw[..., i] < res[i])
    src = np.broadcast_to(owner[:, None], ok.shape)[ok]
    raw = raw[ok]
    cell = np.mod(raw, res)
    off = np.floor_divide(raw, res)
    for i in range(d):
        if not grid.space.periodic[i]:
            off[:, i] = 0
    dst = np.ravel_multi_index(tuple(cell.T), grid.res)
    if np.setdiff1d(np.arange(n), src).size:
        raise MapConstructionFailed("some box has an empty image")

    # one edge per (src, dst, lattice translate): each edge keeps the lift
    # of the sample image that produced it
    key = np.concatenate([src[:, None], dst[:, None], off], axis=1)
    key = np.unique(key, axis=0)
    src, dst, off = key[:, 0], key[:, 1], key[:, 2:]
    geometry = EdgeGeometry(grid=grid, offsets=off.astype(np.int64), paths=paths, tau=float(tau))
    return TransitionGraph(n, src, dst, np.full(len(src), float(tau)), geometry)
