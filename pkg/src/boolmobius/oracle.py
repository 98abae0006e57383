"""Brute-force reference computations.

Nothing here is optimised and nothing here calls into ``transforms``: the
point is to have a second, independent route to every answer.
"""

from __future__ import annotations

import numpy as np

from .core import CapacityError, SparsePoly

MAX_ORACLE_VARS = 16


def _check(p: SparsePoly) -> None:
    if p.nvars > MAX_ORACLE_VARS:
        raise CapacityError(f"oracle limited to n <= {MAX_ORACLE_VARS}, got n={p.nvars}")


def mobius_naive(p: SparsePoly) -> SparsePoly:
    """Expand every monomial X^u into the sum of the X^v with u ⪯ v.

    Supersets of u inside [n] are walked as submasks of the complement of u.
    """
    _check(p)
    full = (1 << p.nvars) - 1
    parity: dict[int, int] = {}
    for u in p.masks:
        free = full & ~u
        sub = free
        while True:
            v = u | sub
            parity[v] = parity.get(v, 0) ^ 1
            if sub == 0:
                break
            sub = (sub - 1) & free
    return SparsePoly(tuple(sorted(v for v, c in parity.items() if c)), p.nvars)


def truth_table_naive(p: SparsePoly) -> np.ndarray:
    """Value of p at every point a, one monomial at a time."""
    _check(p)
    points = np.arange(1 << p.nvars, dtype=np.int64)
    values = np.zeros(points.size, dtype=np.uint8)
    for m in p.masks:
        values ^= ((points & m) == m).astype(np.uint8)
    return values


def weight_naive(p: SparsePoly) -> int:
    """Number of points where p evaluates to 1."""
    return int(truth_table_naive(p).sum(dtype=np.int64))
