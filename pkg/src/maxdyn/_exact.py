"""Dense Gaussian elimination over ``fractions.Fraction``."""
from __future__ import annotations

from fractions import Fraction


def solve(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Solve ``a x = b`` exactly.  ``a`` and ``b`` are copied, not modified.

    Raises ``ZeroDivisionError`` if ``a`` is singular.
    """
    k = len(b)
    rows = [list(r) + [b[i]] for i, r in enumerate(a)]
    for col in range(k):
        pivot = next((r for r in range(col, k) if rows[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        prow = rows[col]
        inv = 1 / prow[col]
        for c in range(col, k + 1):
            prow[c] *= inv
        for r in range(k):
            if r == col:
                continue
            factor = rows[r][col]
            if factor == 0:
                continue
            row = rows[r]
            for c in range(col, k + 1):
                if prow[c]:
                    row[c] -= factor * prow[c]
    return [rows[i][k] for i in range(k)]
