"""The asynchronous maximum model.

Each round one vertex is drawn uniformly at random and its value is replaced
by the maximum over its out-neighbours (vertices without out-neighbours keep
their value).  This module holds the update rule, seeded trajectory
simulation, the strong edge / strong cycle potentials, and the constructive
schedule that drives any valuation to a constant one.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, NotStronglyConnected, NotUndirected
from .graph import (DirectedGraph, dual, is_strongly_connected, k_boundary_partition,
                    strongly_connected_components)
from .valuation import Valuation, argmax, as_valuation

__all__ = [
    "RngStream",
    "derive_seed",
    "step",
    "random_step",
    "is_absorbing",
    "Round",
    "Trajectory",
    "simulate",
    "run_schedule",
    "strong_edge_set",
    "strong_cycle_set",
    "constructive_schedule",
    "simple_cycles",
    "maximal_chain",
    "max_min_chain",
    "valuation_digest",
]

FULL_VALUATION_MAX_N = 64


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for trial ``index`` under ``master_seed``.

    The first 64-bit word of ``numpy.random.SeedSequence([master_seed, index])``.
    Trial seeds depend only on the pair, never on execution order.
    """
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class RngStream:
    """Reproducible stream of uniform vertex choices.

    Draws come from ``numpy.random.PCG64(seed)`` in fixed chunks of
    :attr:`CHUNK`; :meth:`vertex` and :meth:`vertices` read the same
    buffer, so one-at-a-time and batched consumers see identical sequences.
    """

    ALGORITHM = "numpy.PCG64/chunk256"
    CHUNK = 256

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self._buf = np.empty(0, dtype=np.int64)
        self._pos = 0
        self._n = None

    def _refill(self, n):
        self._buf = self._gen.integers(0, n, size=self.CHUNK, dtype=np.int64)
        self._pos = 0
        self._n = n

    def vertex(self, n: int) -> int:
        if self._n != n or self._pos >= len(self._buf):
            self._refill(n)
        v = int(self._buf[self._pos])
        self._pos += 1
        return v

    def vertices(self, n: int, k: int) -> np.ndarray:
        """Next ``k`` choices as an array (same sequence as ``k`` calls to :meth:`vertex`)."""
        out = np.empty(k, dtype=np.int64)
        filled = 0
        while filled < k:
            if self._n != n or self._pos >= len(self._buf):
                self._refill(n)
            take = min(k - filled, len(self._buf) - self._pos)
            out[filled:filled + take] = self._buf[self._pos:self._pos + take]
            self._pos += take
            filled += take
        return out


def _as_stream(rng) -> RngStream:
    return rng if isinstance(rng, RngStream) else RngStream(int(rng))


def step(g: DirectedGraph, f: Valuation, v: int) -> Valuation:
    """Update vertex ``v``: its value becomes the max over its out-neighbours.

    The new value may be smaller than the old one.  A vertex without
    out-neighbours is left unchanged.
    """
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} outside [0, {g.n})")
    nbrs = g.out_adj[v]
    if not nbrs:
        return f
    new = max(f[u] for u in nbrs)
    if new == f[v]:
        return f
    return f[:v] + (new,) + f[v + 1:]


def random_step(g: DirectedGraph, f: Valuation, rng) -> tuple[int, Valuation]:
    rng = _as_stream(rng)
    v = rng.vertex(g.n)
    return v, step(g, f, v)


def is_absorbing(g: DirectedGraph, f: Valuation) -> bool:
    """True iff no single update changes ``f``."""
    return all(max(f[u] for u in nbrs) == f[v] for v, nbrs in enumerate(g.out_adj) if nbrs)


def strong_edge_set(g: DirectedGraph, f: Valuation) -> frozenset:
    """Max-valued vertices with a max-valued neighbour (undirected graphs only)."""
    if not g.is_undirected():
        raise NotUndirected("strong edges are defined on undirected graphs")
    m = max(f)
    return frozenset(v for v, nbrs in enumerate(g.out_adj)
                     if f[v] == m and any(f[u] == m for u in nbrs))


def strong_cycle_set(g: DirectedGraph, f: Valuation) -> frozenset:
    """Vertices on an all-maximum directed cycle, or with an all-maximum path into one.

    Let H be the subgraph induced on the max-valued vertices.  A strong cycle
    is a cycle of H, i.e. lives inside an SCC of H of size >= 2.  The set is
    everything in H that can reach such an SCC inside H.
    """
    m = max(f)
    top = [v for v in range(g.n) if f[v] == m]
    local = {v: i for i, v in enumerate(top)}
    adj = [[local[u] for u in g.out_adj[v] if u in local] for v in top]
    radj: list[list[int]] = [[] for _ in top]
    for i, nbrs in enumerate(adj):
        for j in nbrs:
            radj[j].append(i)
    core = [i for comp in strongly_connected_components(len(top), adj) if len(comp) >= 2
            for i in comp]
    seen = set(core)
    todo = list(core)
    while todo:
        j = todo.pop()
        for i in radj[j]:
            if i not in seen:
                seen.add(i)
                todo.append(i)
    return frozenset(top[i] for i in seen)


def valuation_digest(f: Valuation) -> str:
    """64-bit BLAKE2b digest of the valuation, as 16 hex digits."""
    data = np.asarray(f, dtype=np.int64).tobytes()
    return hashlib.blake2b(data, digest_size=8).hexdigest()


class Round(NamedTuple):
    t: int
    v: int
    valuation: Optional[Valuation]
    digest: str
    g: Optional[int]
    h: int
    max: int


@dataclass
class Trajectory:
    """Record of one run: chosen vertex, state and potentials per round.

    ``g`` (strong edge set size) is ``None`` on graphs that are not
    undirected.  ``valuation`` is only stored when ``n`` is at most the
    ``store_full_below`` threshold given to :func:`simulate`; the digest is
    always present.
    """

    seed: Optional[int]
    initial: Valuation
    rounds: list = field(default_factory=list)
    converged_at: Optional[int] = None
    truncated: bool = False
    algorithm: str = RngStream.ALGORITHM

    @property
    def length(self) -> int:
        return len(self.rounds)

    @property
    def vertices(self) -> list[int]:
        return [r.v for r in self.rounds]

    def to_records(self, full: bool = True) -> list[dict]:
        out = []
        for r in self.rounds:
            rec = {"t": r.t, "v": r.v, "g": r.g, "h": r.h, "max": r.max, "digest": r.digest}
            if full and r.valuation is not None:
                rec["valuation"] = list(r.valuation)
            out.append(rec)
        return out

    def header(self) -> dict:
        return {"seed": self.seed, "algorithm": self.algorithm, "n": len(self.initial),
                "initial": list(self.initial), "converged_at": self.converged_at,
                "truncated": self.truncated, "rounds": self.length}

    def to_jsonl(self, full: bool = True, header: bool = False) -> str:
        lines = [json.dumps(self.header())] if header else []
        lines += [json.dumps(rec) for rec in self.to_records(full)]
        return "\n".join(lines) + ("\n" if lines else "")


class _Recorder:
    def __init__(self, g, store_full_below, potentials):
        self.g = g
        self.full = g.n <= store_full_below
        self.potentials = potentials
        self.undirected = g.is_undirected()

    def record(self, t, v, f):
        g_t = h_t = None
        if self.potentials:
            h_t = len(strong_cycle_set(self.g, f))
            if self.undirected:
                g_t = len(strong_edge_set(self.g, f))
        return Round(t, v, f if self.full else None, valuation_digest(f), g_t, h_t, max(f))


def simulate(g: DirectedGraph, f0: Iterable[int], rng, max_rounds: int,
             store_full_below: int = FULL_VALUATION_MAX_N, potentials: bool = True) -> Trajectory:
    """Run uniform random updates until absorption or ``max_rounds``.

    ``rng`` is an :class:`RngStream` or an integer seed.  ``converged_at`` is
    the first round whose valuation is absorbing (0 if ``f0`` already is);
    ``truncated`` is set when the round limit is hit first.
    """
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    rng = _as_stream(rng)
    f = as_valuation(f0, g.n)
    traj = Trajectory(seed=rng.seed, initial=f)
    if is_absorbing(g, f):
        traj.converged_at = 0
        return traj
    rec = _Recorder(g, store_full_below, potentials)
    for t in range(1, max_rounds + 1):
        v = rng.vertex(g.n)
        new = step(g, f, v)
        changed = new is not f
        f = new
        traj.rounds.append(rec.record(t, v, f))
        # an unchanged valuation cannot have become absorbing
        if changed and is_absorbing(g, f):
            traj.converged_at = t
            return traj
    traj.truncated = True
    return traj


def run_schedule(g: DirectedGraph, f0: Iterable[int], schedule: Sequence[int],
                 store_full_below: int = FULL_VALUATION_MAX_N, potentials: bool = True) -> Trajectory:
    """Replay an explicit vertex sequence, recording the same fields as :func:`simulate`.

    Every vertex in ``schedule`` is applied; ``converged_at`` marks the first
    round whose valuation was absorbing.
    """
    f = as_valuation(f0, g.n)
    traj = Trajectory(seed=None, initial=f, algorithm="schedule")
    if is_absorbing(g, f):
        traj.converged_at = 0
    rec = _Recorder(g, store_full_below, potentials)
    for t, v in enumerate(schedule, 1):
        f = step(g, f, int(v))
        traj.rounds.append(rec.record(t, int(v), f))
        if traj.converged_at is None and is_absorbing(g, f):
            traj.converged_at = t
    return traj


def constructive_schedule(g: DirectedGraph, f: Iterable[int]) -> list[int]:
    """A vertex order that turns ``f`` into the constant max valuation.

    With ``S`` the max-valued vertices, list the k-boundary layers of ``S``
    in the reversed graph (layer 1, then 2, ...), each in increasing vertex
    order.  Every listed vertex has an out-edge into an earlier layer, so
    updating it copies the maximum; the length is ``n - |S|``.
    """
    f = as_valuation(f, g.n)
    if not is_strongly_connected(g):
        raise NotStronglyConnected("constructive schedule needs a strongly connected graph")
    layers = k_boundary_partition(dual(g), argmax(f))
    return [v for layer in layers[1:] for v in sorted(layer)]


def simple_cycles(g: DirectedGraph, budget: int) -> list[list[int]]:
    """All simple directed cycles, each rotated to start at its smallest vertex.

    Brute-force DFS.  Raises :class:`BudgetExceeded` once more than
    ``budget`` cycles have been found.
    """
    cycles: list[list[int]] = []
    adj = g.out_adj
    for s in range(g.n):
        path = [s]
        on_path = {s}
        iters = [iter(adj[s])]
        while iters:
            for w in iters[-1]:
                if w == s:
                    cycles.append(list(path))
                    if len(cycles) > budget:
                        raise BudgetExceeded(f"more than {budget} simple cycles")
                elif w > s and w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    iters.append(iter(adj[w]))
                    break
            else:
                iters.pop()
                on_path.discard(path.pop())
    return cycles


def maximal_chain(cycle: Sequence[int], f: Valuation, m: int | None = None) -> list[int]:
    """Longest run of consecutive max-valued vertices along ``cycle`` (in cycle order)."""
    if m is None:
        m = max(f)
    k = len(cycle)
    flags = [f[v] == m for v in cycle]
    if all(flags):
        return list(cycle)
    if not any(flags):
        return []
    # start scanning just after a non-max vertex so no run wraps around
    start = (flags.index(False) + 1) % k
    best: list[int] = []
    run: list[int] = []
    for i in range(k):
        v = cycle[(start + i) % k]
        if flags[(start + i) % k]:
            run.append(v)
            if len(run) > len(best):
                best = list(run)
        else:
            run = []
    return best


def max_min_chain(g: DirectedGraph, f: Iterable[int],
                  cycle_budget: int = 100_000) -> tuple[list[int], list[int]]:
    """Among shortest cycles through a max-valued vertex, one with the longest maximal chain.

    Diagnostic only (exponential cycle enumeration).  Ties go to the first
    cycle in :func:`simple_cycles` order.
    """
    f = as_valuation(f, g.n)
    if not is_strongly_connected(g):
        raise NotStronglyConnected("max-min chain needs a strongly connected graph")
    m = max(f)
    candidates = [c for c in simple_cycles(g, cycle_budget) if any(f[v] == m for v in c)]
    if not candidates:
        # only possible for n == 1
        return [], []
    alpha = min(len(c) for c in candidates)
    best_cycle, best_chain = None, None
    for c in candidates:
        if len(c) != alpha:
            continue
        chain = maximal_chain(c, f, m)
        if best_chain is None or len(chain) > len(best_chain):
            best_cycle, best_chain = c, chain
    return best_cycle, best_chain
