"""Slow, obviously-correct reference implementations used only by the tests.

None of these share code with the package beyond the graph container.
"""
import itertools
from fractions import Fraction

import networkx as nx
import numpy as np
import sympy


def to_nx(g):
    G = nx.DiGraph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges)
    return G


def update(out_adj, f, v):
    nb = out_adj[v]
    if not nb:
        return tuple(f)
    f = list(f)
    f[v] = max(f[u] for u in nb)
    return tuple(f)


def rank(f):
    order = sorted(set(f))
    return tuple(order.index(x) + 1 for x in f)


def k_boundaries_recursive(g, s, levels):
    """First ``levels`` sets of the literal recursion: Γ(previous) minus the one before it."""
    s = frozenset(s)

    def gamma(a):
        return frozenset(w for u in a for w in g.out_adj[u]) - a

    out = [s, gamma(s)]
    while len(out) < levels:
        out.append(gamma(out[-1]) - out[-2])
    return out[:levels]


def k_boundaries_by_walks(g, s):
    """Layer k = vertices reachable from s by a walk of length exactly k but none shorter."""
    n = g.n
    A = np.zeros((n, n), dtype=bool)
    for u, v in g.edges:
        A[u, v] = True
    reach = np.zeros(n, dtype=bool)
    reach[list(s)] = True
    seen = reach.copy()
    layers = [frozenset(s)]
    for _ in range(n):
        reach = (reach.astype(int) @ A.astype(int)) > 0
        new = reach & ~seen
        if not new.any():
            break
        layers.append(frozenset(np.flatnonzero(new).tolist()))
        seen |= new
    return layers


def all_undirected(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        chosen = [p for i, p in enumerate(pairs) if mask >> i & 1]
        yield chosen + [(v, u) for u, v in chosen]


def strong_cycle_set_bruteforce(g, f):
    """Max-valued vertices on an all-max cycle, or with an all-max path into one."""
    m = max(f)
    G = to_nx(g)
    top = [v for v in range(g.n) if f[v] == m]
    H = G.subgraph(top)
    on_cycle = set()
    for cyc in nx.simple_cycles(H):
        on_cycle |= set(cyc)
    return frozenset(v for v in top if any(nx.has_path(H, v, c) for c in on_cycle))


def hitting_times_dense(g, raw=True):
    """Expected absorption times on the raw chain by one dense rational solve (sympy)."""
    n = g.n
    states = list(itertools.product(range(1, n + 1), repeat=n))
    idx = {s: i for i, s in enumerate(states)}
    fixed = [all(update(g.out_adj, s, v) == s for v in range(n)) for s in states]
    trans = [i for i, s in enumerate(states) if not fixed[i]]
    pos = {s: k for k, s in enumerate(trans)}
    k = len(trans)
    A = sympy.zeros(k, k)
    b = sympy.ones(k, 1)
    for r, i in enumerate(trans):
        A[r, r] += 1
        for v in range(n):
            j = idx[update(g.out_adj, states[i], v)]
            if j in pos:
                A[r, pos[j]] -= sympy.Rational(1, n)
    x = A.LUsolve(b) if k else []
    out = {}
    for i, s in enumerate(states):
        out[s] = Fraction(0) if fixed[i] else Fraction(str(x[pos[i]]))
    return out


def hitting_times_float(g):
    """Same system in floating point, for n where sympy is too slow."""
    n = g.n
    states = list(itertools.product(range(1, n + 1), repeat=n))
    idx = {s: i for i, s in enumerate(states)}
    N = len(states)
    P = np.zeros((N, N))
    for i, s in enumerate(states):
        for v in range(n):
            P[i, idx[update(g.out_adj, s, v)]] += 1.0 / n
    fixed = np.isclose(np.diag(P), 1.0)
    T = np.flatnonzero(~fixed)
    x = np.zeros(N)
    x[T] = np.linalg.solve(np.eye(len(T)) - P[np.ix_(T, T)], np.ones(len(T)))
    return {s: x[i] for i, s in enumerate(states)}


def expansion_bruteforce(g, kmax=None):
    n = g.n
    kmax = n // 2 if kmax is None else kmax
    best = None
    for k in range(1, kmax + 1):
        for a in itertools.combinations(range(n), k):
            a = set(a)
            gamma = {w for u in a for w in g.out_adj[u]} - a
            r = Fraction(len(gamma), k)
            if best is None or r < best:
                best = r
    return best


def orbit_bruteforce(g):
    """Shortest simple cycle through each vertex, by enumerating every simple cycle."""
    best = [None] * g.n
    for cyc in nx.simple_cycles(to_nx(g)):
        for v in cyc:
            if best[v] is None or len(cyc) < best[v]:
                best[v] = len(cyc)
    return best


def all_digraphs(n):
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    for mask in range(1 << len(pairs)):
        yield [p for i, p in enumerate(pairs) if mask >> i & 1]
