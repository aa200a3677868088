"""Twisted recurrence: sign classes, zero walks, R_xi and the lift oracle."""

import math
import random
from fractions import Fraction

import pytest

import oracles as O
from conftest import build
from lyapform import (
    Cochain1, SignClass, TransitionGraph, compute_r_xi, cycle_mean_range, lift_graph,
    period_lattice, scc_decompose, zero_walk_vertices,
)
from lyapform.errors import NoCycle
from lyapform.twisted import classify

G1 = (3, [(0, 1), (1, 0), (1, 2), (2, 2)], [-1, -1, 0, 0])
G4 = (3, [(0, 1), (1, 0), (1, 2), (2, 1)], [0, 0, 1, 0])
G5 = (2, [(0, 1), (1, 0), (0, 1)], [1, -1, 0])


def test_mean_range_g1():
    g, xi = build(*G1)
    assert cycle_mean_range(g, xi, [0, 1]) == (-1, -1)


def test_mean_range_g4():
    g, xi = build(*G4)
    assert cycle_mean_range(g, xi, [0, 1, 2]) == (0, Fraction(1, 2))


def test_mean_range_zero_cochain():
    g, _ = build(*G4)
    assert cycle_mean_range(g, Cochain1.zero(g), [0, 1, 2]) == (0, 0)


def test_mean_range_needs_cycle():
    g, xi = build(*G1)
    with pytest.raises(NoCycle):
        cycle_mean_range(g, xi, [0])


def test_mean_range_matches_simple_cycles():
    rng = random.Random(8)
    for _ in range(300):
        n, edges, w = O.random_graph(rng)
        g, xi = build(n, edges, w)
        rep = scc_decompose(g)
        comp, _ = O.sccs(n, edges)
        for c in rep.transitive_components:
            means = [Fraction(sum(w[e] for e in cyc), len(cyc)) for cyc in O.simple_cycles(n, edges)
                     if comp[edges[cyc[0]][0]] == comp[next(iter(c))]]
            assert cycle_mean_range(g, xi, c) == (min(means), max(means))


def test_zero_walks_examples():
    g, xi = build(*G1)
    assert zero_walk_vertices(g, xi, [2]) == {2}
    assert zero_walk_vertices(g, xi, [0, 1]) == set()
    g, xi = build(*G4)
    assert zero_walk_vertices(g, xi, [0, 1, 2]) == {0, 1}
    assert O.r_xi(*G4, max_len=8) == {0, 1}
    g, xi = build(*G5)
    assert zero_walk_vertices(g, xi, [0, 1]) == {0, 1}


def test_classify():
    assert classify(-2, -1, 1e-9).kind is SignClass.AllNegative
    assert classify(-2, -1, 1e-9).bound == 1
    assert classify(1, 2, 1e-9).kind is SignClass.AllPositive
    assert classify(0, 0, 1e-9).kind is SignClass.AllZero
    assert classify(-1, 0, 1e-9).kind is SignClass.NonPosWithZero
    assert classify(0, 3, 1e-9).kind is SignClass.NonNegWithZero
    assert classify(-1, 1, 1e-9).kind is SignClass.MixedSigns


def test_r_xi_g1():
    g, xi = build(*G1)
    rep = compute_r_xi(g, xi)
    assert rep.r_xi == {2} and rep.c_xi == {0, 1}


def test_zero_class_gives_r():
    rng = random.Random(9)
    for _ in range(100):
        n, edges, _ = O.random_graph(rng)
        g = TransitionGraph.from_edges(n, edges)
        rep = compute_r_xi(g, Cochain1.zero(g))
        assert rep.r_xi == rep.recurrent and not rep.c_xi


def test_rest_loop_in_r_xi():
    g, xi = build(3, [(0, 0), (0, 1), (1, 2), (2, 1)], [0, 1, 1, 1])
    assert compute_r_xi(g, xi).r_xi == {0}


def test_scale_invariance():
    rng = random.Random(10)
    for _ in range(300):
        n, edges, w = O.random_graph(rng)
        g, xi = build(n, edges, w)
        base = compute_r_xi(g, xi).r_xi
        for lam in (Fraction(-3), Fraction(1, 7), Fraction(5, 2)):
            assert compute_r_xi(g, xi.scale(lam)).r_xi == base


def test_r_xi_matches_long_walk_enumeration():
    """Closed walks up to 64 edges inside each SCC (weights in [-3, 3])."""
    rng = random.Random(0)
    for _ in range(500):
        n, edges, w = O.random_graph(rng)
        g, xi = build(n, edges, w)
        rep = compute_r_xi(g, xi)
        assert rep.r_xi <= rep.recurrent
        assert rep.r_xi == O.r_xi(n, edges, w, max_len=64)


def test_r_xi_matches_lift_oracle():
    rng = random.Random(12)
    for _ in range(500):
        n, edges, w = O.random_graph(rng)
        g, xi = build(n, edges, w)
        lift = lift_graph(g, xi, window=8, quantum=1)
        assert compute_r_xi(g, xi).r_xi == lift.projection


@pytest.mark.parametrize("fixture,want", [(G1, {2}), (G5, {0, 1}), (G4, {0, 1})])
def test_lift_fixtures(fixture, want):
    g, xi = build(*fixture)
    assert lift_graph(g, xi, 8, 1).projection == want


def test_lift_zero_cochain_is_r():
    g, _ = build(*G1)
    assert lift_graph(g, Cochain1.zero(g), 4, 1).projection == {0, 1, 2}


def test_lift_rejects_bad_quantum():
    g, xi = build(*G1)
    with pytest.raises(ValueError):
        lift_graph(g, xi, 4, 0)


def test_period_lattice():
    g, xi = build(*G1)
    lat = period_lattice(g, xi)
    assert lat.generator == 2 and not lat.dense
    assert sorted(lat.pairings) == [-2, 0]
    lat0 = period_lattice(g, Cochain1.zero(g))
    assert lat0.generator == 0 and not lat0.dense


def test_period_lattice_dense():
    g = TransitionGraph.from_edges(1, [(0, 0), (0, 0)])
    xi = Cochain1.of(g, [1.0, math.sqrt(2)])
    assert period_lattice(g, xi).dense
    xi = Cochain1.of(g, [0.5, 1.25])
    lat = period_lattice(g, xi)
    assert not lat.dense and lat.generator == pytest.approx(0.25)


def test_period_lattice_divides_pairings():
    rng = random.Random(13)
    for _ in range(200):
        n, edges, w = O.random_graph(rng)
        g, xi = build(n, edges, [Fraction(x, rng.randint(1, 4)) for x in w])
        try:
            lat = period_lattice(g, xi)
        except NoCycle:
            continue
        if lat.generator:
            assert all((p / lat.generator).denominator == 1 for p in lat.pairings)
        # every simple cycle weight lies in the lattice
        for c in O.simple_cycles(n, edges):
            s = sum(xi[e] for e in c)
            assert s == 0 if lat.generator == 0 else (s / lat.generator).denominator == 1


def test_irrational_mixed_class_closure():
    # weights 1 and -sqrt(2): no exact zero walk, but zero is approached
    g = TransitionGraph.from_edges(1, [(0, 0), (0, 0)])
    xi = Cochain1.of(g, [1.0, -math.sqrt(2)])
    assert compute_r_xi(g, xi).r_xi == {0}


def test_independent_generators_use_exact_support():
    # two loops with components (1, 0) and (0, 1) over rationally independent
    # generators; only the vertex carrying a zero combination is in R_xi
    g = TransitionGraph.from_edges(2, [(0, 0), (0, 0), (1, 1), (0, 1)])
    gens = (1.0, math.sqrt(2))
    comps = ((1, 0), (-1, 0), (0, 1), (0, 0))
    w = tuple(sum(c * x for c, x in zip(cc, gens)) for cc in comps)
    xi = Cochain1(g.fingerprint, w, comps, gens)
    assert compute_r_xi(g, xi).r_xi == {0}
