"""Exact analysis through the Markov chain of possibilities.

States are valuations; from each state every vertex update is taken with
probability ``1/n`` and updates with the same outcome are merged.  In
``quotient`` mode each successor is rank-canonicalized, which is sound
because the update rule only looks at the relative order of values.

Expected absorption times are solved one strongly connected block of the
chain at a time, sinks first, so each block only needs the already-known
values of its successors.  Blocks are solved in exact rationals unless they
are larger than ``EXACT_BLOCK_LIMIT``.
"""
from __future__ import annotations

import itertools
import json
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np

from . import _exact
from .dynamics import step
from .errors import CapExceeded, NonAbsorbingReachability
from .graph import DirectedGraph, SccDecomposition, _decompose
from .valuation import (Valuation, as_valuation, canonicalize, count_canonical,
                        enumerate_canonical, is_constant)

__all__ = [
    "DEFAULT_CAP",
    "EXACT_BLOCK_LIMIT",
    "ChainModel",
    "HittingTimeReport",
    "build_chain",
    "absorbing_components",
    "period",
    "hitting_times",
    "exact_convergence_time",
    "worst_case_convergence_time",
    "verify_path_to_constant",
]

DEFAULT_CAP = 50_000
EXACT_BLOCK_LIMIT = 250
FLOAT_RESIDUAL_TOL = 1e-10


class ChainModel:
    """Finite Markov chain with exact rational transition probabilities.

    Parameters
    ----------
    states : sequence of hashable
        State labels (valuations for chains built from a graph).
    transitions : sequence of sequence of (int, Fraction)
        ``transitions[i]`` lists ``(target index, probability)`` pairs.
    mode : str
        ``"raw"``, ``"quotient"`` or ``"abstract"`` (hand-built chains).
    """

    def __init__(self, states: Sequence[Hashable], transitions, mode: str = "abstract",
                 graph: Optional[DirectedGraph] = None):
        if len(states) != len(transitions):
            raise ValueError("one transition row per state required")
        self.states = list(states)
        self.transitions = [tuple((int(j), Fraction(p)) for j, p in row) for row in transitions]
        self.mode = mode
        self.graph = graph
        self.index = {s: i for i, s in enumerate(self.states)}
        for i, row in enumerate(self.transitions):
            if sum(p for _, p in row) != 1:
                raise ValueError(f"row {i} ({self.states[i]!r}) does not sum to 1")
            if any(p <= 0 for _, p in row):
                raise ValueError(f"row {i} has a non-positive probability")

    @classmethod
    def from_mapping(cls, table: Mapping[Hashable, Mapping[Hashable, object]]) -> "ChainModel":
        """Build from ``{state: {target: probability}}``; probabilities may be strings like ``"1/3"``."""
        states = list(table)
        for targets in table.values():
            for t in targets:
                if t not in table and t not in states:
                    states.append(t)
        idx = {s: i for i, s in enumerate(states)}
        rows = []
        for s in states:
            targets = table.get(s, {s: 1})
            rows.append([(idx[t], Fraction(p)) for t, p in targets.items()])
        return cls(states, rows)

    def __len__(self):
        return len(self.states)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @cached_property
    def adjacency(self) -> list[list[int]]:
        return [[j for j, _ in row] for row in self.transitions]

    @cached_property
    def scc(self) -> SccDecomposition:
        return _decompose(len(self.states), self.adjacency)

    @cached_property
    def absorbing(self) -> frozenset:
        """Indices of states lying in an absorbing component."""
        return frozenset(i for comp in absorbing_components(self) for i in comp)

    def self_loop_states(self) -> frozenset:
        """States whose only transition is to themselves with probability 1."""
        return frozenset(i for i, row in enumerate(self.transitions)
                         if len(row) == 1 and row[0] == (i, 1))

    def to_json_dict(self) -> dict:
        def label(s):
            return list(s) if isinstance(s, tuple) else s
        return {
            "mode": self.mode,
            "states": [label(s) for s in self.states],
            "transitions": [[i, j, p.numerator, p.denominator]
                            for i, row in enumerate(self.transitions) for j, p in row],
            "absorbing": sorted(self.absorbing),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)


def _transitions_from(g: DirectedGraph, f: Valuation, quotient: bool) -> Counter:
    counts: Counter = Counter()
    for v in range(g.n):
        t = step(g, f, v)
        if quotient and t is not f:
            t = canonicalize(t)
        counts[t] += 1
    return counts


def build_chain(g: DirectedGraph, mode: str = "quotient", cap: int = DEFAULT_CAP,
                start: Optional[Iterable[Iterable[int]]] = None) -> ChainModel:
    """Markov chain of possibilities of ``g``.

    Without ``start`` every valuation is enumerated: all of ``[n]^n`` in
    ``raw`` mode, the canonical valuations in ``quotient`` mode (both in
    lexicographic order).  With ``start`` only the states reachable from the
    given valuations are built, in breadth-first order.
    """
    if mode not in ("raw", "quotient"):
        raise ValueError(f"mode must be 'raw' or 'quotient', got {mode!r}")
    n = g.n
    quotient = mode == "quotient"
    if start is None:
        size = count_canonical(n) if quotient else n ** n
        if size > cap:
            raise CapExceeded(f"{mode} chain for n={n} has {size} states, cap is {cap}")
        if quotient:
            states = list(enumerate_canonical(n, max_n=n))
        else:
            states = list(itertools.product(range(1, n + 1), repeat=n))
        index = {s: i for i, s in enumerate(states)}
        rows = []
        for f in states:
            counts = _transitions_from(g, f, quotient)
            rows.append(sorted((index[t], Fraction(c, n)) for t, c in counts.items()))
        return ChainModel(states, rows, mode=mode, graph=g)

    states = []
    index = {}
    queue: deque = deque()
    for f in start:
        f = as_valuation(f, n)
        if quotient:
            f = canonicalize(f)
        if f not in index:
            index[f] = len(states)
            states.append(f)
            queue.append(f)
    rows_by_state = {}
    while queue:
        f = queue.popleft()
        counts = _transitions_from(g, f, quotient)
        row = []
        for t, c in counts.items():
            if t not in index:
                if len(states) >= cap:
                    raise CapExceeded(f"more than {cap} reachable states")
                index[t] = len(states)
                states.append(t)
                queue.append(t)
            row.append((index[t], Fraction(c, n)))
        rows_by_state[f] = sorted(row)
    return ChainModel(states, [rows_by_state[s] for s in states], mode=mode, graph=g)


def absorbing_components(chain: ChainModel) -> list[frozenset]:
    """SCCs of the chain with no transition leaving them."""
    dec = chain.scc
    return [dec.components[i] for i in dec.sinks()]


def period(g: DirectedGraph, cap: int = DEFAULT_CAP, mode: str = "raw") -> int:
    """Size of the largest absorbing component of the chain of possibilities."""
    chain = build_chain(g, mode=mode, cap=cap)
    return max(len(c) for c in absorbing_components(chain))


@dataclass
class HittingTimeReport:
    """Expected rounds to absorption for every state of ``chain``.

    ``values`` holds ``Fraction`` entries when ``exact`` is true, floats
    otherwise.  ``residual`` is the largest violation of the defining
    recurrence (exactly 0 in rational mode).
    """

    chain: ChainModel
    values: list
    exact: bool
    residual: float
    worst_state: int
    worst_value: object

    @property
    def worst_valuation(self):
        return self.chain.states[self.worst_state]

    def value_of(self, state) -> object:
        return self.values[self.chain.index[state]]


def _check_reachability(chain: ChainModel, targets: frozenset) -> None:
    radj: list[list[int]] = [[] for _ in range(len(chain))]
    for i, row in enumerate(chain.transitions):
        for j, _ in row:
            radj[j].append(i)
    seen = set(targets)
    todo = list(targets)
    while todo:
        j = todo.pop()
        for i in radj[j]:
            if i not in seen:
                seen.add(i)
                todo.append(i)
    if len(seen) != len(chain):
        bad = min(set(range(len(chain))) - seen)
        raise NonAbsorbingReachability(
            f"state {chain.states[bad]!r} cannot reach an absorbing component")


def recurrence_residual(chain: ChainModel, values: Sequence, absorbing: frozenset) -> object:
    """max |E[x] - 1 - sum_y p(x,y) E[y]| over transient x, and |E| over absorbing x."""
    worst = 0
    for i, row in enumerate(chain.transitions):
        if i in absorbing:
            r = abs(values[i])
        else:
            r = abs(values[i] - 1 - sum(p * values[j] for j, p in row))
        if r > worst:
            worst = r
    return worst


def hitting_times(chain: ChainModel, exact: Optional[bool] = None,
                  exact_block_limit: int = EXACT_BLOCK_LIMIT) -> HittingTimeReport:
    """Expected number of transitions until an absorbing component is entered.

    Parameters
    ----------
    exact : bool, optional
        ``True`` forces rational arithmetic, ``False`` forces floats.  By
        default rationals are used when every transient block has at most
        ``exact_block_limit`` states.
    """
    absorbing = chain.absorbing
    _check_reachability(chain, absorbing)
    dec = chain.scc
    blocks = [sorted(c) for c in dec.components if not (c <= absorbing)]
    if exact is None:
        exact = all(len(b) <= exact_block_limit for b in blocks)

    N = len(chain)
    if exact:
        values: list = [Fraction(0)] * N
    else:
        values = [0.0] * N
    # components come sinks-first, so successors outside a block are solved already
    for block in blocks:
        pos = {s: k for k, s in enumerate(block)}
        k = len(block)
        if exact:
            a = [[Fraction(0)] * k for _ in range(k)]
            b = [Fraction(1)] * k
        else:
            a = np.zeros((k, k))
            b = np.ones(k)
        for r, s in enumerate(block):
            a[r][r] += 1
            for j, p in chain.transitions[s]:
                if j in pos:
                    a[r][pos[j]] -= p if exact else float(p)
                else:
                    b[r] += p * values[j] if exact else float(p) * values[j]
        if exact:
            x = _exact.solve(a, b)
        else:
            x = np.linalg.solve(a, b)
            # one round of iterative refinement
            x = x + np.linalg.solve(a, b - a @ x)
        for r, s in enumerate(block):
            values[s] = x[r] if exact else float(x[r])

    residual = recurrence_residual(chain, values, absorbing)
    if not exact and residual >= FLOAT_RESIDUAL_TOL:
        raise ArithmeticError(f"float hitting-time residual {residual:.3g} above tolerance")
    worst = max(range(N), key=lambda i: (values[i], -i))
    return HittingTimeReport(chain=chain, values=values, exact=exact,
                             residual=float(residual), worst_state=worst,
                             worst_value=values[worst])


def exact_convergence_time(g: DirectedGraph, f: Iterable[int], cap: int = DEFAULT_CAP,
                           mode: str = "quotient", exact: Optional[bool] = None):
    """Expected rounds until the dynamics from ``f`` reach an absorbing state.

    Only the part of the chain reachable from ``f`` is built.
    """
    f = as_valuation(f, g.n)
    chain = build_chain(g, mode=mode, cap=cap, start=[f])
    report = hitting_times(chain, exact=exact)
    # the start valuation is always state 0
    return report.values[0]


def worst_case_convergence_time(g: DirectedGraph, cap: int = DEFAULT_CAP,
                                exact: Optional[bool] = None) -> HittingTimeReport:
    """Maximum expected absorption time over all canonical valuations.

    Ties are resolved towards the lexicographically first valuation.
    """
    chain = build_chain(g, mode="quotient", cap=cap)
    return hitting_times(chain, exact=exact)


def verify_path_to_constant(g: DirectedGraph, f: Iterable[int], cap: int = DEFAULT_CAP) -> bool:
    """True iff some constant valuation is reachable from ``f`` in the chain."""
    chain = build_chain(g, mode="quotient", cap=cap, start=[f])
    return any(is_constant(s) for s in chain.states)
