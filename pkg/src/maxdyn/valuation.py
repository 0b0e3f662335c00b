"""Valuations: per-vertex positive integers, plus rank canonicalization.

A valuation is a plain ``tuple`` of Python ints, so it is immutable,
hashable and usable directly as a Markov-chain state.  Only the relative
order of the values matters to the maximum dynamics, which is why
:func:`canonicalize` (order-preserving rank compression) loses nothing.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Iterator, Tuple

from .errors import BudgetExceeded, CapExceeded, InvalidValuation
from .graph import DirectedGraph

Valuation = Tuple[int, ...]

DEFAULT_ENUMERATION_CAP = 6

__all__ = [
    "Valuation",
    "as_valuation",
    "constant",
    "is_constant",
    "max_value",
    "argmax",
    "canonicalize",
    "is_canonical",
    "automorphisms",
    "order_equivalent",
    "enumerate_canonical",
    "count_canonical",
    "parse_valuation",
    "format_valuation",
]


def as_valuation(values: Iterable[int], n: int | None = None) -> Valuation:
    """Validate and freeze ``values`` into a :data:`Valuation`."""
    f = tuple(int(x) for x in values)
    if n is not None and len(f) != n:
        raise InvalidValuation(f"valuation has {len(f)} entries, graph has {n} vertices")
    if not f:
        raise InvalidValuation("empty valuation")
    if min(f) < 1:
        raise InvalidValuation("valuation entries must be positive integers")
    return f


def constant(n: int, k: int) -> Valuation:
    if n < 1 or k < 1:
        raise InvalidValuation("constant valuation needs n >= 1 and k >= 1")
    return (k,) * n


def is_constant(f: Valuation) -> bool:
    return all(x == f[0] for x in f)


def max_value(f: Valuation) -> int:
    return max(f)


def argmax(f: Valuation) -> frozenset:
    m = max(f)
    return frozenset(v for v, x in enumerate(f) if x == m)


def canonicalize(f: Iterable[int]) -> Valuation:
    """Replace every value by its dense rank among the distinct values (1-based).

    >>> canonicalize((5, 5, 3, 4, 5, 2))
    (4, 4, 2, 3, 4, 1)
    """
    f = tuple(f)
    rank = {x: i for i, x in enumerate(sorted(set(f)), 1)}
    return tuple(rank[x] for x in f)


def is_canonical(f: Valuation) -> bool:
    return set(f) == set(range(1, max(f) + 1))


def automorphisms(g: DirectedGraph, budget: int = math.factorial(8)) -> Iterator[tuple[int, ...]]:
    """All edge-preserving vertex permutations, by brute force.

    Raises :class:`BudgetExceeded` up front when ``n!`` exceeds ``budget``.
    """
    n = g.n
    if math.factorial(n) > budget:
        raise BudgetExceeded(f"{n}! candidate permutations exceed budget {budget}")
    edges = g.edges
    out_deg = [len(a) for a in g.out_adj]
    in_deg = [len(a) for a in g.in_adj]
    for perm in itertools.permutations(range(n)):
        if any(out_deg[v] != out_deg[perm[v]] or in_deg[v] != in_deg[perm[v]] for v in range(n)):
            continue
        if all((perm[u], perm[v]) in edges for (u, v) in edges):
            yield perm


def order_equivalent(g: DirectedGraph, f: Valuation, h: Valuation,
                     automorphism_budget: int = math.factorial(8)) -> bool:
    """Is there an automorphism α with f(u) □ f(v) ⟺ h(α(u)) □ h(α(v)) for □ in <, =, >?

    Two valuations induce the same pairwise order exactly when their
    canonical forms agree, so the test per candidate α is
    ``canonicalize(f) == canonicalize(h ∘ α)``.
    """
    n = g.n
    f = as_valuation(f, n)
    h = as_valuation(h, n)
    cf = canonicalize(f)
    if sorted(cf) != sorted(canonicalize(h)):
        return False
    for alpha in automorphisms(g, automorphism_budget):
        if canonicalize(h[alpha[v]] for v in range(n)) == cf:
            return True
    return False


def enumerate_canonical(n: int, max_n: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Valuation]:
    """Yield every canonical valuation of length ``n`` in lexicographic order.

    Canonical means the set of values used is exactly ``{1, ..., k}`` for some
    ``k``.  Sequences are built left to right, and a value is only placed if
    the gaps it leaves below the running maximum can still be filled by the
    remaining positions.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > max_n:
        raise CapExceeded(f"n={n} exceeds canonical enumeration cap {max_n}")

    prefix: list[int] = []

    def rec(used: frozenset, top: int) -> Iterator[Valuation]:
        remaining = n - len(prefix)
        if remaining == 0:
            yield tuple(prefix)
            return
        for x in range(1, n + 1):
            new_top = max(top, x)
            missing = new_top - len(used | {x})
            if missing > remaining - 1:
                if x > top:
                    # above the running max, larger x only widens the gap
                    break
                continue
            prefix.append(x)
            yield from rec(used | {x}, new_top)
            prefix.pop()

    yield from rec(frozenset(), 0)


@lru_cache(maxsize=None)
def count_canonical(n: int) -> int:
    """Number of canonical valuations of length n (the ordered Bell number)."""
    if n == 0:
        return 1
    return sum(math.comb(n, k) * count_canonical(n - k) for k in range(1, n + 1))


def parse_valuation(text: str, n: int | None = None) -> Valuation:
    """Parse whitespace- or comma-separated positive integers."""
    tokens = text.replace(",", " ").split()
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise InvalidValuation(f"not a list of integers: {text!r}") from None
    return as_valuation(values, n)


def format_valuation(f: Valuation) -> str:
    return " ".join(str(x) for x in f)
