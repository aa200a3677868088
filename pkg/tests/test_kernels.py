"""Graph kernels against brute force, on both backends."""

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from lyapform import kernels

BACKENDS = kernels.available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    with kernels.use_backend(request.param):
        yield request.param


@st.composite
def small_graphs(draw, n_max=7, w=4):
    n = draw(st.integers(1, n_max))
    m = draw(st.integers(0, 3 * n))
    edges = [(draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))) for _ in range(m)]
    weights = [draw(st.integers(-w, w)) for _ in range(m)]
    return n, edges, weights


def _arrays(edges):
    return [u for u, _ in edges], [v for _, v in edges]


def test_backend_listing():
    assert "python" in BACKENDS
    assert kernels.backend() in BACKENDS


def test_unknown_backend():
    with pytest.raises(ValueError):
        with kernels.use_backend("fortran"):
            pass


@settings(max_examples=150, deadline=None)
@given(small_graphs())
def test_strong_components_match_closure(g):
    n, edges, _ = g
    s, d = _arrays(edges)
    for b in BACKENDS:
        with kernels.use_backend(b):
            comp = kernels.strong_components(n, s, d)
        ref, _ = O.sccs(n, edges)
        # same partition
        assert all((comp[i] == comp[j]) == (ref[i] == ref[j]) for i in range(n) for j in range(n))
        # sinks first: every edge between classes goes to a smaller id
        assert all(comp[u] >= comp[v] for u, v in edges)


@settings(max_examples=150, deadline=None)
@given(small_graphs(n_max=6))
def test_min_mean_cycle_matches_simple_cycles(g):
    n, edges, weights = g
    s, d = _arrays(edges)
    cycles = O.simple_cycles(n, edges)
    want = min((Fraction(sum(weights[e] for e in c), len(c)) for c in cycles), default=None)
    for b in BACKENDS:
        with kernels.use_backend(b):
            got = kernels.min_mean_cycle(n, s, d, weights)
        assert got == want


@settings(max_examples=150, deadline=None)
@given(small_graphs(n_max=6))
def test_longest_from_matches_walk_dp(g):
    n, edges, weights = g
    s, d = _arrays(edges)
    cycles = O.simple_cycles(n, edges)
    positive = any(sum(weights[e] for e in c) > 0 for c in cycles)
    for b in BACKENDS:
        with kernels.use_backend(b):
            pot, cyc = kernels.longest_from(n, s, d, weights)
        if positive:
            assert pot is None
            assert sum(weights[e] for e in cyc) > 0
            assert all(edges[a][1] == edges[c][0] for a, c in zip(cyc, cyc[1:] + cyc[:1]))
        else:
            assert cyc is None
            assert pot == O.longest_walks(n, edges, weights, [0] * n, n)


@settings(max_examples=150, deadline=None)
@given(small_graphs(n_max=6), st.data())
def test_min_cycle_through_matches_simple_cycles(g, data):
    n, edges, weights = g
    weights = [abs(w) for w in weights]
    mask = [data.draw(st.booleans()) for _ in range(n)]
    s, d = _arrays(edges)
    best = None
    for c in O.simple_cycles(n, edges):
        if any(mask[edges[e][0]] for e in c):
            w = sum(weights[e] for e in c)
            best = w if best is None else min(best, w)
    for b in BACKENDS:
        with kernels.use_backend(b):
            got, v = kernels.min_cycle_through(n, s, d, weights, mask)
        assert got == best
        if best is not None:
            assert mask[v]


def test_rational_weights_are_exact(backend):
    w = [Fraction(1, 3), Fraction(-2, 7), Fraction(1, 5)]
    got = kernels.min_mean_cycle(3, [0, 1, 2], [1, 2, 0], w)
    assert got == sum(w) / 3
    assert isinstance(got, Fraction)


def test_float_weights(backend):
    got = kernels.min_mean_cycle(2, [0, 1], [1, 0], [0.5, -1.5])
    assert got == pytest.approx(-0.5)


def test_huge_integers_fall_back_to_python(backend):
    big = 2**70
    pot, cyc = kernels.longest_from(2, [0, 1], [1, 0], [big, -big - 1])
    assert cyc is None and pot == [big, 0]


def test_empty_inputs(backend):
    assert kernels.strong_components(0, [], []) == []
    assert kernels.min_mean_cycle(0, [], [], []) is None
    assert kernels.min_mean_cycle(3, [], [], []) is None
    assert kernels.longest_from(0, [], [], []) == ([], None)
    assert kernels.min_cycle_through(2, [], [], [], [True, True]) == (None, -1)


def test_longest_from_init_values(backend):
    pot, _ = kernels.longest_from(3, [0, 1], [1, 2], [-1, -1], init=[0, 0, 5])
    assert pot == [3, 4, 5]


def test_backends_agree_on_random_graphs():
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernels not built")
    rng = random.Random(7)
    for _ in range(50):
        n, edges, weights = O.random_graph(rng)
        s, d = _arrays(edges)
        out = {}
        for b in BACKENDS:
            with kernels.use_backend(b):
                out[b] = (kernels.strong_components(n, s, d),
                          kernels.min_mean_cycle(n, s, d, weights) if edges else None,
                          kernels.longest_from(n, s, d, [w - 4 for w in weights]))
        assert out["python"] == out["cython"]
