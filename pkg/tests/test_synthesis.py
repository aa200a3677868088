"""Construction and independent verification of Lyapunov certificates."""

import dataclasses
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import oracles as O
from conftest import build
from lyapform import (
    Cochain1, CycleBasis, LyapunovCertificate, Refusal, TransitionGraph, check_c_xi_closed,
    check_condition_b, compute_r_xi, necessity_check, pipeline, scc_decompose, verify, walk_weight,
)
from lyapform.conditions import sample_walks
from lyapform.errors import EmptyInput, NotApplicable
from lyapform.synthesis import conley_potential, decompose_word, sup_potential, zero_on_r_xi

G1 = (3, [(0, 1), (1, 0), (1, 2), (2, 2)], [-1, -1, 0, 0])
G3 = (1, [(0, 0)], [1])


# -- words --------------------------------------------------------------------


@pytest.mark.parametrize("word,blocks", [("a", ["a"]), ("abcabc", ["abca", "b", "c"]), ("aa", ["aa"])])
def test_decompose_examples(word, blocks):
    assert decompose_word(word) == blocks


def test_decompose_empty():
    with pytest.raises(EmptyInput):
        decompose_word("")


@given(st.integers(1, 10).flatmap(lambda k: st.lists(st.integers(0, k - 1), min_size=1, max_size=40)))
def test_decompose_property(word):
    blocks = decompose_word(word, 10)
    assert [x for b in blocks for x in b] == word
    assert all(b and b[0] == b[-1] for b in blocks)
    assert len(blocks) <= len(set(word))


# -- potentials ---------------------------------------------------------------


def test_sup_potential_g1():
    g, xi = build(*G1)
    assert sup_potential(g, xi, {0, 1}).values == (0, 0, 0)


def test_sup_potential_empty_domain():
    g, xi = build(2, [(0, 1)], [3])
    assert sup_potential(g, xi, set()).values == (0, 0)


def test_sup_potential_two_cycle():
    g, xi = build(2, [(0, 1), (1, 0)], [1, -3])
    f = sup_potential(g, xi, {0, 1})
    assert f.values == (1, 0)
    w1 = [xi[e] + f[v] - f[u] for e, (u, v) in enumerate([(0, 1), (1, 0)])]
    assert w1 == [0, -2]


def test_sup_potential_refuses_nonnegative_cycle():
    g, xi = build(2, [(0, 1), (1, 0)], [1, -1])
    with pytest.raises(NotApplicable):
        sup_potential(g, xi, {0, 1})


def test_sup_potential_bellman_optimality():
    rng = random.Random(31)
    done = 0
    while done < 200:
        n, edges, w = O.random_graph(rng)
        w = [-abs(x) - 1 for x in w]  # every cycle negative
        g, xi = build(n, edges, w)
        dom = {v for v in range(n) if rng.random() < 0.7}
        f = sup_potential(g, xi, dom)
        inside = [(e, u, v) for e, (u, v) in enumerate(edges) if u in dom and v in dom]
        want = O.longest_walks(n, [(u, v) for _, u, v in inside], [w[e] for e, _, _ in inside],
                               [0] * n, n + 1)
        assert list(f.values) == want
        for v in dom:
            opts = [0] + [w[e] + f[b] for e, a, b in inside if a == v]
            assert f[v] == max(opts)
        done += 1


def test_zero_on_r_xi():
    g, xi = build(*G1)
    out, _ = zero_on_r_xi(g, xi, {2})
    assert out.weights == xi.weights
    g, xi = build(3, [(0, 1), (1, 0), (1, 2)], [1, -1, 5])
    out, pot = zero_on_r_xi(g, xi, {0, 1})
    assert out[0] == out[1] == 0
    assert walk_weight(out, [0, 2]) == walk_weight(xi, [0, 2]) + pot[0] - pot[0]
    out, _ = zero_on_r_xi(g, xi, set())
    assert out.weights == xi.weights


def test_zero_on_r_xi_needs_a():
    g, xi = build(2, [(0, 1), (1, 0)], [1, 0])
    with pytest.raises(NotApplicable):
        zero_on_r_xi(g, xi, {0, 1})


def test_conley_potential():
    g, _ = build(*G1)
    assert conley_potential(g, scc_decompose(g)).values == (1, 1, 0)
    g = TransitionGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    assert len(set(conley_potential(g, scc_decompose(g)).values)) == 1
    g = TransitionGraph.from_edges(4, [(0, 1), (1, 2), (0, 3), (3, 2), (0, 2)])
    L = conley_potential(g, scc_decompose(g)).values
    assert all(L[u] > L[v] for u, v in g.edges())
    assert min(L) == 0 and max(L) == 1


# -- pipeline -----------------------------------------------------------------


def test_g1_certificate():
    g, xi = build(*G1)
    cert = pipeline(g, xi)
    assert isinstance(cert, LyapunovCertificate) and cert.valid
    assert cert.lam == 1
    assert cert.omega3.weights == (-1, -1, -1, 0)
    assert verify(g, xi, cert).ok


def test_g3_refusal():
    g, xi = build(*G3)
    res = pipeline(g, xi)
    assert isinstance(res, Refusal) and res.reason == "B"
    assert walk_weight(xi, res.witness.edges()) == 1


def test_fully_recurrent_exact_class():
    g, _ = build(3, [(0, 1), (1, 2), (2, 0)], [0, 0, 0])
    xi = Cochain1.of(g, [2, -1, -1])
    cert = pipeline(g, xi)
    assert cert.valid and cert.r_xi == {0, 1, 2}
    assert all(w == 0 for w in cert.omega3.weights)


def assert_sound(g, xi, cert):
    assert cert.valid
    assert verify(g, xi, cert).ok
    basis = CycleBasis(g)
    assert basis.chord_pairings(cert.omega3.weights) == basis.chord_pairings(xi.weights)


def test_exact_on_sccs_always_certified():
    rng = random.Random(32)
    for _ in range(200):
        n, edges, _ = O.random_graph(rng, n_max=10)
        w = O.exact_on_sccs(rng, n, edges)
        g, xi = build(n, edges, w)
        cert = pipeline(g, xi)
        assert isinstance(cert, LyapunovCertificate)
        assert_sound(g, xi, cert)


def test_every_certificate_sound():
    rng = random.Random(33)
    issued = 0
    for _ in range(600):
        n, edges, w = O.random_graph(rng)
        g, xi = build(n, edges, w)
        res = pipeline(g, xi)
        if isinstance(res, LyapunovCertificate):
            assert_sound(g, xi, res)
            issued += 1
        else:
            walk = res.witness.edges() if res.witness else None
            if res.reason == "B" and walk:
                assert walk_weight(xi, walk) >= 0
            if res.reason == "A":
                assert walk_weight(xi, walk) != 0
    assert issued > 50


def test_perturbation_fails_verify():
    rng = random.Random(34)
    checked = 0
    while checked < 100:
        n, edges, _ = O.random_graph(rng)
        g, xi = build(n, edges, O.exact_on_sccs(rng, n, edges))
        cert = pipeline(g, xi)
        if g.m == 0:
            continue
        e = rng.randrange(g.m)
        for delta in (Fraction(1, 7), Fraction(-1, 7)):
            w = list(cert.omega3.weights)
            w[e] += delta
            bad = dataclasses.replace(cert, omega3=Cochain1(g.fingerprint, tuple(w)))
            assert not verify(g, xi, bad).ok
        checked += 1


def test_flipped_c_xi_edge_rejected():
    g, xi = build(*G1)
    cert = pipeline(g, xi)
    w = list(cert.omega3.weights)
    w[0] = Fraction(1)
    assert not verify(g, xi, dataclasses.replace(cert, omega3=Cochain1(g.fingerprint, tuple(w)))).ok


def test_verify_checks_claimed_set():
    g, xi = build(*G1)
    cert = pipeline(g, xi)
    assert not verify(g, xi, dataclasses.replace(cert, r_xi=frozenset({1, 2}))).ok


def test_monotone_walks():
    """Cumulative weight drops at every step outside R_xi-internal edges and
    stays put on them (two walks per graph, 100 in all)."""
    rng = random.Random(35)
    for _ in range(50):
        n, edges, _ = O.random_graph(rng)
        g, xi = build(n, edges, O.exact_on_sccs(rng, n, edges))
        cert = pipeline(g, xi)
        for walk in sample_walks(g, range(n), 2, 20, seed=rng.randrange(10**6)):
            total = Fraction(0)
            for e in walk:
                before, total = total, total + cert.omega3[e]
                if e in cert.r_internal:
                    assert total == before
                else:
                    assert total < before


def test_necessity_direction():
    rng = random.Random(36)
    for _ in range(300):
        n, edges, w = O.random_graph(rng)
        g, xi = build(n, edges, w)
        rep = compute_r_xi(g, xi)
        cert = pipeline(g, xi, report=rep)
        if isinstance(cert, LyapunovCertificate) and check_c_xi_closed(rep):
            assert check_condition_b(g, xi, rep).holds
            nec = necessity_check(g, xi, cert.omega3, rep)
            assert nec.holds
