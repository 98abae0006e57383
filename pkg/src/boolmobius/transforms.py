"""Möbius transform algorithms with exact operation counting.

Dense algorithms work on 2^n bit vectors and count XORs.  List algorithms
work on the monomial list of the polynomial form and count list
modifications (one insert or one remove = 1).  Every algorithm computes the
same involution; they differ only in cost.

The list algorithms hold the monomial list as a set of int masks.
Multiplying by (1 + X_i) toggles ``m | X_i`` for every monomial ``m`` free of
X_i, so the modification count of a step is the number of such monomials.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import (
    MAX_DENSE_VARS,
    MAX_SPARSE_VARS,
    DenseForm,
    DomainError,
    Role,
    SparsePoly,
    bits_to_poly,
    check_dense_capacity,
    complement,
    decompose,
    mask_positions,
    poly_to_bits,
    xor_add,
)


class OpUnit(enum.Enum):
    XOR = "xor"
    LIST_MOD = "list_mod"
    EMITTED_TERM = "emitted_term"


@dataclass
class OpCounter:
    """Tally of the work done by one algorithm run.

    ``per_step`` holds one entry per variable step, in the order the steps
    ran; ``route`` records which path a dispatching entry point took.
    """

    xor_count: int = 0
    list_mods: int = 0
    per_step: list[int] = field(default_factory=list)
    algorithm: str | None = None
    route: str | None = None

    def add_xors(self, k: int, step: int | None = None) -> None:
        self.xor_count += int(k)
        self._bump(step, k)

    def add_mods(self, k: int, step: int | None = None) -> None:
        self.list_mods += int(k)
        self._bump(step, k)

    def _bump(self, step, k):
        if step is None:
            self.per_step.append(int(k))
        else:
            while len(self.per_step) <= step:
                self.per_step.append(0)
            self.per_step[step] += int(k)

    @property
    def unit(self) -> OpUnit:
        if self.algorithm in _UNITS:
            return _UNITS[self.algorithm]
        return OpUnit.LIST_MOD if self.list_mods else OpUnit.XOR

    @property
    def total(self) -> int:
        return self.xor_count + self.list_mods


class Algo(enum.Enum):
    RECURSIVE_BUTTERFLY = "rbm"
    ITERATIVE_BUTTERFLY = "ibm"
    EXCLUSIVE_MULT_VECTOR = "vec"
    EXCLUSIVE_MULT_LIST = "list"
    GREEDY_LIST = "greedy"
    COMPLEMENT = "complement"
    AUTO = "auto"


DENSE_ALGOS = (Algo.RECURSIVE_BUTTERFLY, Algo.ITERATIVE_BUTTERFLY, Algo.EXCLUSIVE_MULT_VECTOR)
LIST_ALGOS = (Algo.EXCLUSIVE_MULT_LIST, Algo.GREEDY_LIST, Algo.COMPLEMENT)

_UNITS = {a.value: OpUnit.XOR for a in DENSE_ALGOS}
_UNITS.update({a.value: OpUnit.LIST_MOD for a in LIST_ALGOS})


# --- operators on the polynomial form -------------------------------------

def mu_xi(p: SparsePoly, i: int) -> SparsePoly:
    """Partial transform in one indeterminate: P0 + X_i (P0 + P1)."""
    if not 0 <= i < MAX_SPARSE_VARS:
        raise DomainError(f"position {i} out of range")
    p = p.with_nvars(max(p.nvars, i + 1))
    split = decompose(p, i)
    bit = 1 << i
    lifted = SparsePoly.from_masks((m | bit for m in xor_add(split.p0, split.p1).masks), p.nvars)
    return xor_add(split.p0, lifted)


def exclusive_mul(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    """P ⊗ Q: for each X^I in Q, X^I times the monomials of P avoiding I."""
    acc: set[int] = set()
    for ident in q.masks:
        acc ^= {m | ident for m in p.masks if not m & ident}
    return SparsePoly(tuple(sorted(acc)), max(p.nvars, q.nvars))


# --- dense algorithms -----------------------------------------------------

def _check_dense(d: DenseForm) -> None:
    if d.n < 1:
        raise DomainError("dense transforms need n >= 1")


# Base case of the recursive butterfly, indexed by the pair (a0, a1).
_RBM_BASE = {(0, 0): (0, 0), (0, 1): (0, 1), (1, 0): (1, 1), (1, 1): (1, 0)}
_RBM_BASE_TABLE = np.array([_RBM_BASE[(a, b)] for a in (0, 1) for b in (0, 1)], dtype=np.uint8)


def _rbm(block: np.ndarray, counter: OpCounter, level: int) -> np.ndarray:
    # block has shape (batch, 2^level); every row is transformed independently
    if level == 1:
        counter.add_xors(block.shape[0], step=0)
        return _RBM_BASE_TABLE[block[:, 0] * 2 + block[:, 1]]
    half = block.shape[1] // 2
    stacked = np.concatenate([block[:, :half], block[:, half:]])
    done = _rbm(stacked, counter, level - 1)
    lo, hi = done[: block.shape[0]], done[block.shape[0]:]
    hi ^= lo
    counter.add_xors(lo.size, step=level - 1)
    return np.concatenate([lo, hi], axis=1)


def mobius_butterfly_recursive(d: DenseForm, counter: OpCounter | None = None) -> DenseForm:
    """Divide and conquer: transform both halves, then XOR the low half into the high one."""
    _check_dense(d)
    counter = counter if counter is not None else OpCounter()
    counter.algorithm = counter.algorithm or Algo.RECURSIVE_BUTTERFLY.value
    out = _rbm(d.bits.reshape(1, -1), counter, d.n)
    return DenseForm(out.reshape(-1), d.role.flipped())


def butterfly_inplace(buf: np.ndarray, counter: OpCounter | None = None) -> np.ndarray:
    """Iterative butterfly on ``buf``, mutating it.

    Step i pairs the halves of every block of size 2^i and XORs the first
    half into the second.
    """
    n = buf.size.bit_length() - 1
    for i in range(1, n + 1):
        view = buf.reshape(-1, 2, 1 << (i - 1))
        view[:, 1, :] ^= view[:, 0, :]
        if counter is not None:
            counter.add_xors(buf.size // 2)
    return buf


def mobius_butterfly_iterative(d: DenseForm, counter: OpCounter | None = None) -> DenseForm:
    _check_dense(d)
    counter = counter if counter is not None else OpCounter()
    counter.algorithm = counter.algorithm or Algo.ITERATIVE_BUTTERFLY.value
    buf = d.bits.copy()
    butterfly_inplace(buf, counter)
    buf.flags.writeable = False
    return DenseForm(buf, d.role.flipped())


def mobius_exclusive_vector(d: DenseForm, counter: OpCounter | None = None) -> DenseForm:
    """Vector form of the (1 + X_i) products.

    For each i, every index j with bit i clear pushes its bit into j + 2^i.
    """
    _check_dense(d)
    counter = counter if counter is not None else OpCounter()
    counter.algorithm = counter.algorithm or Algo.EXCLUSIVE_MULT_VECTOR.value
    a = d.bits.copy()
    index = np.arange(a.size, dtype=np.int64)
    for i in range(d.n):
        offset = 1 << i
        j = index[(index & offset) == 0]
        a[j + offset] ^= a[j]
        counter.add_xors(j.size)
    a.flags.writeable = False
    return DenseForm(a, d.role.flipped())


# --- list algorithms ------------------------------------------------------

def _times_one_plus(terms: set[int], i: int) -> tuple[set[int], set[int], set[int]]:
    """One step P <- P ⊗ (1 + X_i) on a set of masks.  Returns (new, added, removed)."""
    bit = 1 << i
    targets = {m | bit for m in terms if not m & bit}
    removed = targets & terms
    added = targets - removed
    return terms ^ targets, added, removed


def _to_poly(terms: set[int], nvars: int) -> SparsePoly:
    return SparsePoly(tuple(sorted(terms)), nvars)


def _check_order(order: Sequence[int]) -> None:
    if len(set(order)) != len(order):
        raise DomainError(f"variable order {list(order)} repeats a position")
    for i in order:
        if not 0 <= i < MAX_SPARSE_VARS:
            raise DomainError(f"position {i} out of range")


def mobius_list_sequential(
    p: SparsePoly,
    order: Iterable[int] | None = None,
    counter: OpCounter | None = None,
) -> SparsePoly:
    """Multiply by (1 + X_i) for each position in ``order`` (default ascending).

    Passing a subset of positions computes the partial transform mu_N.
    """
    order = list(range(p.nvars)) if order is None else list(order)
    _check_order(order)
    counter = counter if counter is not None else OpCounter()
    counter.algorithm = counter.algorithm or Algo.EXCLUSIVE_MULT_LIST.value
    nvars = max([p.nvars] + [i + 1 for i in order])
    terms = set(p.masks)
    for i in order:
        terms, added, removed = _times_one_plus(terms, i)
        counter.add_mods(len(added) + len(removed))
    return _to_poly(terms, nvars)


def occurrence(terms: set[int], n: int) -> np.ndarray:
    """Number of monomials containing each of the first n variables."""
    if len(terms) < 32:  # numpy call overhead dominates on short lists
        table = [0] * n
        for m in terms:
            for v in mask_positions(m):
                table[v] += 1
        return np.array(table, dtype=np.float64)
    arr = np.fromiter(terms, dtype=np.uint64)
    return np.array([np.count_nonzero(arr & np.uint64(1 << v)) for v in range(n)], dtype=np.float64)


def mobius_list_greedy(p: SparsePoly, counter: OpCounter | None = None) -> SparsePoly:
    """List transform that always multiplies next by the most frequent variable.

    Ties go to the lowest position.  The occurrence table is maintained
    incrementally from the monomials each step adds or removes; a used
    variable is parked at -inf.
    """
    n = p.nvars
    counter = counter if counter is not None else OpCounter()
    counter.algorithm = counter.algorithm or Algo.GREEDY_LIST.value
    terms = set(p.masks)
    table = occurrence(terms, n)
    for _ in range(n):
        i0 = int(np.argmax(table))
        terms, added, removed = _times_one_plus(terms, i0)
        counter.add_mods(len(added) + len(removed))
        table += occurrence(added, n) - occurrence(removed, n)
        table[i0] = -math.inf
    return _to_poly(terms, n)


def mobius_with_complement(p: SparsePoly, counter: OpCounter | None = None) -> SparsePoly:
    """Greedy list transform, run on the complement when that is sparser.

    When N(P) > 2^(n-1) the complement P' has fewer monomials and
    mu(P) = mu(P') + 1, which costs one extra list modification.
    """
    n = p.nvars
    check_dense_capacity(n)
    counter = counter if counter is not None else OpCounter()
    counter.algorithm = counter.algorithm or Algo.COMPLEMENT.value
    if n >= 1 and len(p) > 1 << (n - 1):
        counter.route = "complement"
        image = mobius_list_greedy(complement(p), counter)
        counter.add_mods(1)
        return xor_add(image, SparsePoly.one(n))
    counter.route = "direct"
    return mobius_list_greedy(p, counter)


# --- dispatch -------------------------------------------------------------

def resolve_auto(p: SparsePoly) -> Algo:
    n = p.nvars
    if 1 <= n <= MAX_DENSE_VARS and len(p) > 1 << (n - 1):
        return Algo.COMPLEMENT
    return Algo.GREEDY_LIST


def mobius_dense(d: DenseForm, algo: Algo = Algo.AUTO, counter: OpCounter | None = None) -> DenseForm:
    """Transform a dense vector; AUTO means the iterative butterfly."""
    counter = counter if counter is not None else OpCounter()
    if algo is Algo.AUTO:
        algo = Algo.ITERATIVE_BUTTERFLY
        counter.route = algo.value
    if algo in DENSE_ALGOS:
        return _DENSE[algo](d, counter)
    image = mu_full(bits_to_poly(d.bits), algo, counter)[0]
    return DenseForm(poly_to_bits(image.with_nvars(d.n)), d.role.flipped())


def mu_full(p: SparsePoly, algo: Algo = Algo.AUTO, counter: OpCounter | None = None) -> tuple[SparsePoly, OpCounter]:
    """mu_[n](P) over n = p.nvars by the chosen algorithm, with its counter."""
    algo = Algo(algo)
    counter = counter if counter is not None else OpCounter()
    if algo is Algo.AUTO:
        algo = resolve_auto(p)
        counter.route = algo.value
    counter.algorithm = algo.value
    if algo in DENSE_ALGOS:
        if p.nvars == 0:
            return p, counter
        out = _DENSE[algo](DenseForm(poly_to_bits(p), Role.ANF), counter)
        return bits_to_poly(out.bits), counter
    if algo is Algo.EXCLUSIVE_MULT_LIST:
        return mobius_list_sequential(p, counter=counter), counter
    if algo is Algo.GREEDY_LIST:
        return mobius_list_greedy(p, counter), counter
    if algo is Algo.COMPLEMENT:
        return mobius_with_complement(p, counter), counter
    raise DomainError(f"unknown algorithm {algo}")


_DENSE = {
    Algo.RECURSIVE_BUTTERFLY: mobius_butterfly_recursive,
    Algo.ITERATIVE_BUTTERFLY: mobius_butterfly_iterative,
    Algo.EXCLUSIVE_MULT_VECTOR: mobius_exclusive_vector,
}
