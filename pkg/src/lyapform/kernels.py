"""Kernel dispatch.

The compiled extension is used when it imports; otherwise, or when
``LYAPFORM_BACKEND=python`` is set, the pure-Python module takes over.
Exact (rational) weights are scaled to a common integer denominator before
they reach a kernel, so both backends compute bit-identical results.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

_INT_LIMIT = 2**60

if _compiled is not None and os.environ.get("LYAPFORM_BACKEND", "").lower() != "python":
    _impl = _compiled
else:
    _impl = _pykernels


def backend() -> str:
    return _impl.BACKEND


def available_backends() -> list[str]:
    names = ["python"]
    if _compiled is not None:
        names.append("cython")
    return names


@contextmanager
def use_backend(name: str):
    """Temporarily switch kernels (used by tests and the benchmark)."""
    global _impl
    previous = _impl
    if name == "python":
        _impl = _pykernels
    elif name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        _impl = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")
    try:
        yield
    finally:
        _impl = previous


def is_exact(values: Sequence) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


class _Scaled:
    """Weights prepared for a kernel call."""

    def __init__(self, values: Sequence, headroom: int):
        self.exact = is_exact(values)
        if self.exact:
            fr = [Fraction(v) for v in values]
            self.scale = math.lcm(*(f.denominator for f in fr)) if fr else 1
            ints = [f.numerator * (self.scale // f.denominator) for f in fr]
            biggest = max((abs(i) for i in ints), default=0)
            self.big = biggest * max(headroom, 1) >= _INT_LIMIT
            self.data = ints if self.big else np.asarray(ints, dtype=np.int64)
        else:
            self.scale = 1
            self.big = False
            self.data = np.asarray([float(v) for v in values], dtype=np.float64)

    def impl(self):
        return _pykernels if self.big else _impl

    def arg(self):
        if self.impl() is _pykernels:
            return self.data if self.big else self.data.tolist()
        return self.data

    def back(self, value):
        if self.exact:
            return Fraction(int(value), self.scale)
        return float(value)


def _idx(values, impl):
    if impl is _pykernels:
        return [int(v) for v in values]
    return np.ascontiguousarray(values, dtype=np.int64)


def strong_components(n: int, src: Sequence[int], dst: Sequence[int]) -> list[int]:
    """SCC id per vertex; ids are numbered sinks-first (reverse topological)."""
    if n == 0:
        return []
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    order = np.argsort(src, kind="stable")
    indices = dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    indptr = np.cumsum(indptr)
    return list(_impl.strong_components(n, _idx(indptr, _impl), _idx(indices, _impl)))


def min_mean_cycle(n: int, src: Sequence[int], dst: Sequence[int], weights: Sequence):
    """Minimum cycle mean over all cycles (``None`` if acyclic)."""
    if n == 0 or len(weights) == 0:
        return None
    scaled = _Scaled(weights, headroom=4 * (n + 1) ** 2)
    impl = scaled.impl()
    out = impl.min_mean_cycle(n, _idx(src, impl), _idx(dst, impl), scaled.arg())
    if out is None:
        return None
    num, den = out
    if scaled.exact:
        return Fraction(int(num), int(den) * scaled.scale)
    return float(num) / float(den)


def longest_from(n: int, src: Sequence[int], dst: Sequence[int], weights: Sequence,
                 init: Optional[Sequence] = None, tol: float = 0.0):
    """Sup over walks starting at each vertex of the walk weight.

    ``init`` gives the value of the empty walk (defaults to 0).  Returns
    ``(values, None)`` or ``(None, positive_cycle_edges)``.
    """
    if n == 0:
        return [], None
    if init is None:
        init = [0] * n
    values = list(weights) + list(init)
    scaled = _Scaled(values, headroom=2 * (n + 2))
    impl = scaled.impl()
    data = scaled.arg()
    m = len(weights)
    w, f0 = data[:m], data[m:]
    if impl is not _pykernels:
        w = np.ascontiguousarray(w)
        f0 = np.ascontiguousarray(f0)
    pot, cycle = impl.longest_from(n, _idx(src, impl), _idx(dst, impl), w, f0, tol)
    if pot is None:
        return None, [int(e) for e in cycle]
    return [scaled.back(v) for v in pot], None


def min_cycle_through(n: int, src: Sequence[int], dst: Sequence[int], weights: Sequence,
                      mask: Sequence[bool]):
    """Cheapest closed walk through a masked vertex (nonnegative weights)."""
    if n == 0 or len(weights) == 0:
        return None, -1
    scaled = _Scaled(weights, headroom=2 * (n + 2))
    impl = scaled.impl()
    if impl is _pykernels:
        m = [bool(b) for b in mask]
    else:
        m = np.asarray(mask, dtype=np.int8)
    best, vertex = impl.min_cycle_through(n, _idx(src, impl), _idx(dst, impl), scaled.arg(), m)
    if best is None:
        return None, -1
    return scaled.back(best), int(vertex)
