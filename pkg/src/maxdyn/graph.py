"""Simple directed graphs: construction, generators, duals, SCCs and boundaries.

Vertices are dense integer ids ``0 .. n-1``.  Undirected graphs are stored as
bidirected digraphs, so every undirected edge ``{u, v}`` contributes both
``(u, v)`` and ``(v, u)``.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidGraph, NotStronglyConnected

__all__ = [
    "DirectedGraph",
    "SccDecomposition",
    "from_edge_list",
    "generate",
    "FAMILIES",
    "dual",
    "boundary",
    "k_boundary_partition",
    "strongly_connected_components",
    "scc",
    "is_strongly_connected",
    "random_digraph",
    "random_strongly_connected",
    "random_connected_undirected",
    "parse_edge_list",
    "read_edge_list",
    "format_edge_list",
    "write_edge_list",
]


class DirectedGraph:
    """Immutable simple digraph stored as sorted out-neighbour tuples.

    Use :func:`from_edge_list` or :func:`generate` rather than calling the
    constructor with unchecked data.
    """

    __slots__ = ("_n", "_out", "_in", "_edges")

    def __init__(self, n: int, out_adj: Sequence[Iterable[int]]):
        if n < 1:
            raise InvalidGraph("graph needs at least one vertex")
        if len(out_adj) != n:
            raise InvalidGraph(f"expected {n} adjacency lists, got {len(out_adj)}")
        out = []
        for u, nbrs in enumerate(out_adj):
            nbrs = sorted(set(int(v) for v in nbrs))
            for v in nbrs:
                if not 0 <= v < n:
                    raise InvalidGraph(f"edge ({u}, {v}) has endpoint outside [0, {n})")
                if v == u:
                    raise InvalidGraph(f"self-loop at vertex {u}")
            out.append(tuple(nbrs))
        inn: list[list[int]] = [[] for _ in range(n)]
        for u, nbrs in enumerate(out):
            for v in nbrs:
                inn[v].append(u)
        self._n = n
        self._out = tuple(out)
        self._in = tuple(tuple(x) for x in inn)
        self._edges = frozenset((u, v) for u in range(n) for v in out[u])

    @property
    def n(self) -> int:
        return self._n

    @property
    def out_adj(self) -> tuple[tuple[int, ...], ...]:
        return self._out

    @property
    def in_adj(self) -> tuple[tuple[int, ...], ...]:
        return self._in

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self._edges

    @property
    def m(self) -> int:
        return len(self._edges)

    def out_neighbors(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._edges

    def is_undirected(self) -> bool:
        """True iff every edge has its reverse (the bidirected encoding)."""
        return all((v, u) in self._edges for (u, v) in self._edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self._edges)

    def min_out_degree(self) -> int:
        return min(len(a) for a in self._out)

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self):
        return hash((self._n, self._edges))

    def __repr__(self):
        return f"DirectedGraph(n={self._n}, m={self.m})"


@dataclass(frozen=True)
class SccDecomposition:
    """Maximal strongly connected components of a graph.

    ``components`` is in reverse topological order of the condensation:
    a component only has condensation edges into components listed before it.
    """

    components: tuple[frozenset, ...]
    component_of: tuple[int, ...]
    condensation_edges: frozenset

    def __len__(self):
        return len(self.components)

    def sinks(self) -> list[int]:
        """Indices of components with no outgoing condensation edge."""
        has_out = {a for a, _ in self.condensation_edges}
        return [i for i in range(len(self.components)) if i not in has_out]


def from_edge_list(n: int, edges: Iterable[tuple[int, int]]) -> DirectedGraph:
    """Build a graph on ``n`` vertices; duplicate edges collapse to one."""
    if n < 1:
        raise InvalidGraph("graph needs at least one vertex")
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidGraph(f"edge ({u}, {v}) has endpoint outside [0, {n})")
        if u == v:
            raise InvalidGraph(f"self-loop at vertex {u}")
        adj[u].append(v)
    return DirectedGraph(n, adj)


def _complete(n):
    return [(u, v) for u in range(n) for v in range(n) if u != v]


def _path(n):
    edges = []
    for i in range(n - 1):
        edges += [(i, i + 1), (i + 1, i)]
    return edges


def _dicycle(n):
    return [(i, (i + 1) % n) for i in range(n)]


# family -> (edge builder, minimum n)
FAMILIES = {
    "complete": (_complete, 1),
    "path": (_path, 2),
    "dicycle": (_dicycle, 3),
}


def generate(family: str, n: int) -> DirectedGraph:
    """Deterministic graph families.

    ``complete`` is K_n and ``path`` is P_n (both bidirected); ``dicycle`` is
    the directed cycle ``0 -> 1 -> ... -> n-1 -> 0``.
    """
    try:
        build, n_min = FAMILIES[family]
    except KeyError:
        raise InvalidGraph(f"unknown family {family!r}; expected one of {sorted(FAMILIES)}") from None
    if n < n_min:
        raise InvalidGraph(f"family {family!r} needs n >= {n_min}, got {n}")
    return from_edge_list(n, build(n))


def dual(g: DirectedGraph) -> DirectedGraph:
    """Reverse every edge."""
    return DirectedGraph(g.n, g.in_adj)


def _check_set(g: DirectedGraph, s) -> frozenset:
    s = frozenset(int(v) for v in s)
    if not s:
        raise ValueError("vertex set must be non-empty")
    bad = [v for v in s if not 0 <= v < g.n]
    if bad:
        raise ValueError(f"vertices {sorted(bad)} outside [0, {g.n})")
    return s


def boundary(g: DirectedGraph, s) -> frozenset:
    """Out-neighbours of ``s`` that are not themselves in ``s``."""
    s = _check_set(g, s)
    return frozenset(v for u in s for v in g.out_adj[u] if v not in s)


def k_boundary_partition(g: DirectedGraph, s) -> list[frozenset]:
    """Layers ``[S, Γ(S), Γ²(S), ...]`` of the BFS from ``s`` along out-edges.

    Layer k holds the vertices whose directed distance from ``s`` is exactly
    k.  Requires a strongly connected graph, so the layers cover ``V``.
    """
    s = _check_set(g, s)
    if not is_strongly_connected(g):
        raise NotStronglyConnected("k-boundaries only partition V on a strongly connected graph")
    seen = set(s)
    layers = [s]
    frontier = s
    while frontier:
        nxt = frozenset(v for u in frontier for v in g.out_adj[u] if v not in seen)
        if not nxt:
            break
        seen |= nxt
        layers.append(nxt)
        frontier = nxt
    return layers


def strongly_connected_components(n: int, adj: Sequence[Sequence[int]]) -> list[list[int]]:
    """Tarjan's algorithm on an arbitrary adjacency list (self-loops allowed).

    Iterative, so deep chains do not hit the recursion limit.  Components are
    emitted in reverse topological order (sink components first).
    """
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            nbrs = adj[v]
            if i < len(nbrs):
                work[-1] = (v, i + 1)
                w = nbrs[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


def _decompose(n, adj) -> SccDecomposition:
    comps = strongly_connected_components(n, adj)
    comp_of = [0] * n
    for i, c in enumerate(comps):
        for v in c:
            comp_of[v] = i
    cond = set()
    for u in range(n):
        for v in adj[u]:
            a, b = comp_of[u], comp_of[v]
            if a != b:
                cond.add((a, b))
    return SccDecomposition(
        components=tuple(frozenset(c) for c in comps),
        component_of=tuple(comp_of),
        condensation_edges=frozenset(cond),
    )


def scc(g: DirectedGraph) -> SccDecomposition:
    return _decompose(g.n, g.out_adj)


def _reaches_all(n, adj, src) -> bool:
    seen = [False] * n
    seen[src] = True
    todo = [src]
    count = 1
    while todo:
        u = todo.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                todo.append(v)
    return count == n


def is_strongly_connected(g: DirectedGraph) -> bool:
    # forward and backward reachability from vertex 0
    return _reaches_all(g.n, g.out_adj, 0) and _reaches_all(g.n, g.in_adj, 0)


# -- random generators (test and CLI plumbing) -------------------------------

def random_digraph(n: int, p: float, rng: np.random.Generator) -> DirectedGraph:
    """Each ordered pair ``(u, v)``, ``u != v``, is an edge independently with prob. p."""
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    return DirectedGraph(n, [np.flatnonzero(row).tolist() for row in mask])


def random_strongly_connected(n: int, p: float, rng: np.random.Generator,
                              max_tries: int = 10_000) -> DirectedGraph:
    """Rejection sample :func:`random_digraph` until it is strongly connected.

    The result is uniform over G(n, p) conditioned on strong connectivity.
    """
    if n == 1:
        return DirectedGraph(1, [[]])
    for _ in range(max_tries):
        g = random_digraph(n, p, rng)
        if is_strongly_connected(g):
            return g
    raise RuntimeError(f"no strongly connected G({n}, {p}) sample in {max_tries} tries")


def random_connected_undirected(n: int, p: float, rng: np.random.Generator) -> DirectedGraph:
    """Random spanning tree plus independent extra edges, as a bidirected digraph."""
    order = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        u, v = int(order[i]), int(order[rng.integers(0, i)])
        edges |= {(u, v), (v, u)}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges |= {(u, v), (v, u)}
    return from_edge_list(n, edges)


# -- edge-list text format ---------------------------------------------------

def parse_edge_list(text: str) -> DirectedGraph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"``; ``#`` starts a comment."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InvalidGraph(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            rows.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise InvalidGraph(f"line {lineno}: expected two integers, got {raw!r}") from None
    if not rows:
        raise InvalidGraph("empty edge list (missing 'n m' header)")
    (n, m), edges = rows[0], rows[1:]
    if len(edges) != m:
        raise InvalidGraph(f"header announces {m} edges but {len(edges)} follow")
    return from_edge_list(n, edges)


def read_edge_list(path) -> DirectedGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def format_edge_list(g: DirectedGraph) -> str:
    buf = io.StringIO()
    edges = g.sorted_edges()
    buf.write(f"{g.n} {len(edges)}\n")
    for u, v in edges:
        buf.write(f"{u} {v}\n")
    return buf.getvalue()


def write_edge_list(g: DirectedGraph, path) -> None:
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g))
