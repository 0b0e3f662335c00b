"""Graph parameters used by the convergence-time bounds.

Vertex expansion is an exact minimum over every admissible vertex subset.
All ``2^n`` subsets are handled at once as integer bitmasks: the
neighbourhood union of each mask is built by doubling (mask ``m`` with top
bit ``k`` extends mask ``m - 2^k``), then ``|Γ(A)|`` and ``|A|`` are
popcounts.  That is cheap enough up to the default cap of 20 vertices.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import _exact
from .errors import CapExceeded, InvalidGraph, NotStronglyConnected
from .graph import DirectedGraph, dual, is_strongly_connected

__all__ = [
    "EXPANSION_CAP",
    "ParamReport",
    "vertex_expansion_out",
    "vertex_expansion_in",
    "phi_prime",
    "orbit",
    "vertex_orbits",
    "harmonic",
    "gamblers_ruin_closed",
    "gamblers_ruin_solve",
    "gamblers_ruin_residuals",
    "stage_identity_holds",
    "bound_report",
]

EXPANSION_CAP = 20

_SIZE_LIMITS = {
    # |A| <= n/2 for an integer |A| is the same as |A| <= floor(n/2)
    "floor": lambda n: n // 2,
    "ceil": lambda n: (n + 1) // 2,
}


def _popcount(x: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(x).astype(np.int64)
    # numpy < 2.0
    return np.array([int(v).bit_count() for v in x.tolist()], dtype=np.int64)


def _reverse_bits(x: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(x)
    for i in range(n):
        out |= ((x >> i) & 1) << (n - 1 - i)
    return out


def _expansion(g: DirectedGraph, cap: int, size_limit: str) -> tuple[Fraction, frozenset]:
    n = g.n
    if n > cap:
        raise CapExceeded(f"vertex expansion is exhaustive; n={n} exceeds cap {cap}")
    if n < 2:
        raise InvalidGraph("vertex expansion needs n >= 2")
    try:
        kmax = _SIZE_LIMITS[size_limit](n)
    except KeyError:
        raise ValueError(f"size_limit must be one of {sorted(_SIZE_LIMITS)}") from None

    out_mask = [sum(1 << u for u in g.out_neighbors(v)) for v in range(n)]
    union = np.zeros(1 << n, dtype=np.int64)
    for k in range(n):
        lo, hi = 1 << k, 1 << (k + 1)
        union[lo:hi] = union[0:lo] | out_mask[k]
    masks = np.arange(1 << n, dtype=np.int64)
    size = _popcount(masks)
    ok = (size >= 1) & (size <= kmax)
    masks, size = masks[ok], size[ok]
    gamma = _popcount(union[ok] & ~masks)

    # compare gamma/size exactly on a common denominator
    lcm = math.lcm(*range(1, kmax + 1))
    key = gamma * (lcm // size)
    best = key.min()
    tied = np.flatnonzero(key == best)
    smallest = size[tied].min()
    tied = tied[size[tied] == smallest]
    # among equal-size sets the lexicographically first sorted tuple has the
    # largest mask once vertex 0 is made the most significant bit
    pick = tied[np.argmax(_reverse_bits(masks[tied], n))]
    m = int(masks[pick])
    witness = frozenset(v for v in range(n) if m >> v & 1)
    return Fraction(int(gamma[pick]), int(size[pick])), witness


def vertex_expansion_out(g: DirectedGraph, cap: int = EXPANSION_CAP,
                         size_limit: str = "floor") -> tuple[Fraction, frozenset]:
    """Minimum of ``|Γ(A)| / |A|`` over non-empty ``A`` with ``|A| <= n/2``.

    Parameters
    ----------
    g : DirectedGraph
    cap : int
        Largest ``n`` accepted; the search visits all ``2^n`` subsets.
    size_limit : {"floor", "ceil"}
        ``"floor"`` admits ``|A| <= n // 2``, which is the same as
        ``|A| <= n/2``.  ``"ceil"`` widens odd ``n`` to ``(n + 1) // 2``.

    Returns
    -------
    (Fraction, frozenset)
        The exact minimum and a minimizing set; ties go to the smallest set,
        then to the lexicographically first sorted vertex tuple.
    """
    return _expansion(g, cap, size_limit)


def vertex_expansion_in(g: DirectedGraph, cap: int = EXPANSION_CAP,
                        size_limit: str = "floor") -> tuple[Fraction, frozenset]:
    """Vertex expansion of the reversed graph."""
    return _expansion(dual(g), cap, size_limit)


def phi_prime(g: DirectedGraph, cap: int = EXPANSION_CAP) -> Fraction:
    return min(vertex_expansion_out(g, cap)[0], vertex_expansion_in(g, cap)[0])


def _bfs(g: DirectedGraph, src: int) -> list[int]:
    dist = [-1] * g.n
    dist[src] = 0
    q = deque([src])
    while q:
        u = q.popleft()
        for w in g.out_neighbors(u):
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def vertex_orbits(g: DirectedGraph) -> list[int]:
    """Length of the shortest directed cycle through each vertex.

    A cycle through ``v`` leaves along an edge ``v -> u`` and returns along
    a path ``u -> ... -> v``; equivalently it closes with an edge ``w -> v``
    after a shortest path ``v -> ... -> w``.
    """
    if g.n < 2:
        raise InvalidGraph("orbit needs n >= 2")
    if not is_strongly_connected(g):
        raise NotStronglyConnected("orbit is defined for strongly connected graphs")
    return [1 + min(_bfs(g, v)[w] for w in g.in_neighbors(v)) for v in range(g.n)]


def orbit(g: DirectedGraph) -> tuple[int, int]:
    """Largest shortest-cycle length over all vertices, and the first vertex attaining it."""
    b = vertex_orbits(g)
    top = max(b)
    return top, b.index(top)


def harmonic(n: int) -> Fraction:
    if n < 0:
        raise ValueError("n must be >= 0")
    return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))


def _check_nb(n, b):
    if n < 2 or b < 2:
        raise ValueError("gambler's ruin needs n >= 2 and b >= 2")


def gamblers_ruin_closed(n: int, b: int) -> Fraction:
    """Expected absorption time ``n b (b - 1) / 2`` of the walk started at 1."""
    _check_nb(n, b)
    return Fraction(n * b * (b - 1), 2)


def _ruin_system(n, b):
    # unknowns e_1 .. e_{b-1}; e_b = 0 is substituted
    k = b - 1
    p = Fraction(1, n)
    a = [[Fraction(0)] * k for _ in range(k)]
    rhs = [Fraction(1)] * k
    for i in range(1, b):
        r = i - 1
        if i == 1:
            a[r][r] = p
        else:
            a[r][r] = 2 * p
            a[r][r - 1] = -p
        if i + 1 < b:
            a[r][r + 1] = -p
    return a, rhs


def gamblers_ruin_solve(n: int, b: int) -> list[Fraction]:
    """Solve the absorption-time recurrence of the lazy walk on ``1..b``.

    Each round the walk moves up with probability ``1/n``, down with
    probability ``1/n`` (it cannot go below 1) and otherwise stays; ``b`` is
    absorbing.  Returns ``[e_1, ..., e_b]`` with ``e_b = 0``.
    """
    _check_nb(n, b)
    a, rhs = _ruin_system(n, b)
    return _exact.solve(a, rhs) + [Fraction(0)]


def gamblers_ruin_residuals(n: int, b: int, e: list[Fraction]) -> list[Fraction]:
    """Residual of every recurrence equation for the candidate ``e``."""
    a, rhs = _ruin_system(n, b)
    return [sum(a[r][c] * e[c] for c in range(b - 1)) - rhs[r] for r in range(b - 1)] + [e[b - 1]]


def stage_identity_holds(n: int, e: list[Fraction]) -> bool:
    """Check ``e_{b-k} = k n / 2 + k/(k+1) e_{b-(k+1)}`` for ``0 <= k <= b-2``."""
    b = len(e)

    def at(i):
        return e[i - 1]

    return all(at(b - k) == Fraction(k * n, 2) + Fraction(k, k + 1) * at(b - k - 1)
               for k in range(0, b - 1))


def _rational(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator, "float": float(x)}


@dataclass
class ParamReport:
    """Parameters of one graph plus the two bound shapes.

    The bounds use constant factor 1 and the natural log, so they predict
    growth only, not absolute round counts.  ``bound_undirected`` is only
    meaningful when ``undirected`` is true; it uses ``phi_prime``, which
    equals the expansion of an undirected graph.
    """

    n: int
    delta: int
    undirected: bool
    phi_out: Fraction
    phi_in: Fraction
    phi_prime: Fraction
    phi_witness_out: frozenset
    phi_witness_in: frozenset
    orbit_b: int
    orbit_witness: int
    bound_undirected: float
    bound_strongly_connected: float

    def to_json_dict(self) -> dict:
        d = asdict(self)
        for key in ("phi_out", "phi_in", "phi_prime"):
            d[key] = _rational(getattr(self, key))
        for key in ("phi_witness_out", "phi_witness_in"):
            d[key] = sorted(getattr(self, key))
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)


def bound_report(g: DirectedGraph, cap: int = EXPANSION_CAP,
                 size_limit: str = "floor") -> ParamReport:
    n = g.n
    b, bw = orbit(g)
    po, wo = vertex_expansion_out(g, cap, size_limit)
    pi, wi = vertex_expansion_in(g, cap, size_limit)
    pp = min(po, pi)
    log_term = n / float(pp) * math.log(n)
    return ParamReport(
        n=n, delta=g.min_out_degree(), undirected=g.is_undirected(),
        phi_out=po, phi_in=pi, phi_prime=pp,
        phi_witness_out=wo, phi_witness_in=wi,
        orbit_b=b, orbit_witness=bw,
        bound_undirected=log_term,
        bound_strongly_connected=n * b * b + log_term,
    )
