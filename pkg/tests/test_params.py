import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxdyn.errors import CapExceeded, NotStronglyConnected
from maxdyn.graph import dual, from_edge_list, generate, random_strongly_connected
from maxdyn.params import (bound_report, gamblers_ruin_closed, gamblers_ruin_residuals,
                           gamblers_ruin_solve, harmonic, orbit, phi_prime, stage_identity_holds,
                           vertex_expansion_in, vertex_expansion_out, vertex_orbits)

import oracles


def test_expansion_examples():
    phi, w = vertex_expansion_out(generate("complete", 4))
    assert phi == 1 and len(w) == 2
    phi, w = vertex_expansion_out(generate("path", 6))
    assert phi == Fraction(1, 3) and w == {0, 1, 2}
    two_parts = from_edge_list(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
    assert vertex_expansion_out(two_parts)[0] == 0


def test_expansion_in_examples():
    g = generate("path", 7)
    assert vertex_expansion_in(g) == vertex_expansion_out(g)
    c4 = generate("dicycle", 4)
    assert vertex_expansion_out(c4)[0] == vertex_expansion_in(c4)[0] == Fraction(1, 2)


def test_star_pointing_inwards():
    # out-direction: the centre alone is a sink; in-direction: a leaf alone
    # has no in-neighbours. Both minima are 0, only the witnesses differ.
    star = from_edge_list(4, [(1, 0), (2, 0), (3, 0)])
    out, w_out = vertex_expansion_out(star)
    inn, w_in = vertex_expansion_in(star)
    assert out == oracles.expansion_bruteforce(star) == 0
    assert inn == oracles.expansion_bruteforce(dual(star)) == 0
    assert w_out == {0} and w_in == {1}


def test_expansion_witness_tie_break():
    # K_4: singletons give 3, every 2-set gives 1; the first 2-set wins
    phi, w = vertex_expansion_out(generate("complete", 4))
    assert w == {0, 1}
    # P_5: {0, 1} and {3, 4} both give 1/2; the lexicographically first wins
    phi, w = vertex_expansion_out(generate("path", 5))
    assert phi == Fraction(1, 2) and w == {0, 1}


def test_expansion_matches_bruteforce(rng):
    for _ in range(150):
        n = int(rng.integers(2, 10))
        edges = [p for p in itertools.permutations(range(n), 2) if rng.random() < 0.3]
        g = from_edge_list(n, edges)
        phi, w = vertex_expansion_out(g)
        assert phi == oracles.expansion_bruteforce(g)
        assert 1 <= len(w) <= n // 2
        gamma = {x for u in w for x in g.out_adj[u]} - w
        assert Fraction(len(gamma), len(w)) == phi


def test_expansion_size_limit_variants():
    g = generate("path", 7)
    assert vertex_expansion_out(g, size_limit="floor")[0] == oracles.expansion_bruteforce(g, 3)
    assert vertex_expansion_out(g, size_limit="ceil")[0] == oracles.expansion_bruteforce(g, 4)
    with pytest.raises(ValueError):
        vertex_expansion_out(g, size_limit="half")


def test_expansion_cap():
    with pytest.raises(CapExceeded):
        vertex_expansion_out(generate("dicycle", 21))


def test_orbit_examples():
    assert orbit(generate("path", 5))[0] == 2
    assert orbit(generate("complete", 6))[0] == 2
    for n in range(3, 9):
        assert orbit(generate("dicycle", n)) == (n, 0)
    with pytest.raises(NotStronglyConnected):
        orbit(from_edge_list(3, [(0, 1), (1, 2)]))


def test_orbit_matches_cycle_enumeration(rng):
    for _ in range(150):
        n = int(rng.integers(2, 7))
        g = random_strongly_connected(n, float(rng.uniform(0.2, 0.7)), rng)
        assert vertex_orbits(g) == oracles.orbit_bruteforce(g)


def test_harmonic():
    assert harmonic(0) == 0
    assert harmonic(1) == 1
    assert harmonic(2) == Fraction(3, 2)
    assert harmonic(4) == Fraction(25, 12)


def test_harmonic_bracket():
    for n in range(10, 400):
        value = float(n * harmonic(n - 2))
        assert 0.868 * n * math.log(n) <= value <= 2 * n * math.log(n)


def test_gamblers_ruin_examples():
    assert gamblers_ruin_closed(10, 2) == 10
    assert gamblers_ruin_closed(10, 3) == 30
    assert gamblers_ruin_closed(2, 2) == 2
    for n in range(2, 12):
        assert gamblers_ruin_solve(n, 2)[0] == n
    assert gamblers_ruin_solve(10, 3) == [30, 20, 0]
    with pytest.raises(ValueError):
        gamblers_ruin_solve(1, 3)


def test_gamblers_ruin_against_float_solve():
    # independent check of the exact solver with a numpy system
    for n, b in [(3, 5), (7, 4), (20, 12)]:
        k = b - 1
        a = np.zeros((k, k))
        for i in range(k):
            a[i, i] = 1 / n if i == 0 else 2 / n
            if i > 0:
                a[i, i - 1] = -1 / n
            if i + 1 < k:
                a[i, i + 1] = -1 / n
        x = np.linalg.solve(a, np.ones(k))
        assert np.allclose(x, [float(e) for e in gamblers_ruin_solve(n, b)[:-1]])


@settings(max_examples=60)
@given(st.integers(2, 50), st.integers(2, 12))
def test_gamblers_ruin_properties(n, b):
    e = gamblers_ruin_solve(n, b)
    assert e[-1] == 0
    assert e[0] == gamblers_ruin_closed(n, b)
    assert all(r == 0 for r in gamblers_ruin_residuals(n, b, e))
    assert stage_identity_holds(n, e)


def test_bound_report_examples():
    r = bound_report(generate("complete", 6))
    assert r.phi_prime == 1 and r.orbit_b == 2
    assert r.bound_strongly_connected == pytest.approx(6 * 4 + 6 * math.log(6))
    r = bound_report(generate("path", 6))
    assert r.phi_out == Fraction(1, 3) and r.orbit_b == 2
    r = bound_report(generate("dicycle", 5))
    assert r.orbit_b == 5 and r.phi_out == r.phi_in == Fraction(1, 2)
    d = json.loads(r.to_json())
    assert d["phi_out"] == {"num": 1, "den": 2, "float": 0.5}
    assert d["delta"] == 1


def test_phi_prime_is_min(rng):
    for _ in range(30):
        g = random_strongly_connected(int(rng.integers(2, 9)), 0.3, rng)
        assert phi_prime(g) == min(vertex_expansion_out(g)[0], vertex_expansion_in(g)[0])


def test_undirected_orbit_is_two(rng):
    from maxdyn.graph import random_connected_undirected
    for n in range(2, 10):
        assert orbit(random_connected_undirected(n, 0.3, rng))[0] == 2
