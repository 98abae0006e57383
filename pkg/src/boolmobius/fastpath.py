"""Closed-form Möbius transforms and weights for factored polynomial families.

A ``FactoredExpr`` keeps the factorisation the user wrote.  ``match_family``
recognises a handful of shapes on that tree (a monomial, the sum of all
variables, a monomial times a linear sum, and so on) and the matching
closed forms emit the transform directly, at a cost equal to the number of
emitted terms, i.e. the Hamming weight.

Set arguments are collections of 0-based positions; ``n`` is the number of
variables.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Union

from .core import (
    DomainError,
    SparsePoly,
    mask_of,
    mask_positions,
    xor_add,
)


class NoFastPath(DomainError):
    """The input is outside the family a closed form covers."""


class PreconditionError(DomainError):
    """Bindings violate a family's disjointness or cover conditions."""


# --- expression tree ------------------------------------------------------

@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Mono:
    mask: int


@dataclass(frozen=True)
class Sum:
    children: tuple = ()


@dataclass(frozen=True)
class Product:
    children: tuple = ()


Expr = Union[One, Mono, Sum, Product]
FactoredExpr = Expr


def expand_masks(e: Expr) -> frozenset[int]:
    """Monomials of the expanded expression.

    Products follow Boolean semantics (x_i * x_i = x_i), since the tree
    describes a Boolean function; coefficients are reduced mod 2.
    """
    if isinstance(e, One):
        return frozenset({0})
    if isinstance(e, Mono):
        return frozenset({e.mask})
    if isinstance(e, Sum):
        acc: set[int] = set()
        for c in e.children:
            acc ^= expand_masks(c)
        return frozenset(acc)
    if isinstance(e, Product):
        acc = {0}
        for c in e.children:
            nxt: set[int] = set()
            for b in expand_masks(c):
                for a in acc:
                    nxt ^= {a | b}
            acc = nxt
        return frozenset(acc)
    raise TypeError(f"not an expression node: {e!r}")


def expand(e: Expr, nvars: int | None = None) -> SparsePoly:
    masks = expand_masks(e)
    used = max((m.bit_length() for m in masks), default=0)
    if nvars is not None and used > nvars:
        raise DomainError(f"expression uses {used} variables but n={nvars}")
    return SparsePoly(tuple(sorted(masks)), used if nvars is None else nvars)


def summands(e: Expr) -> tuple:
    """Top-level summands; a non-sum is its own single summand."""
    return e.children if isinstance(e, Sum) else (e,)


def variables(e: Expr) -> int:
    if isinstance(e, Mono):
        return e.mask
    if isinstance(e, (Sum, Product)):
        acc = 0
        for c in e.children:
            acc |= variables(c)
        return acc
    return 0


# --- structural helpers ---------------------------------------------------

def _monomial(e: Expr) -> int | None:
    """Mask if e is syntactically a single monomial (1, X_i, or a product of those)."""
    if isinstance(e, One):
        return 0
    if isinstance(e, Mono):
        return e.mask
    if isinstance(e, Sum) and len(e.children) == 1:
        return _monomial(e.children[0])
    if isinstance(e, Product):
        mask = 0
        for c in e.children:
            m = _monomial(c)
            if m is None:
                return None
            mask |= m
        return mask
    return None


def _flat_terms(e: Expr) -> list:
    if isinstance(e, Sum):
        out = []
        for c in e.children:
            out.extend(_flat_terms(c))
        return out
    return [e]


def _linear(e: Expr) -> int | None:
    """Mask J if e is a sum of distinct single variables (at least one)."""
    if not isinstance(e, Sum):
        return None
    mask = 0
    for t in _flat_terms(e):
        m = _monomial(t)
        if m is None or m.bit_count() != 1 or m & mask:
            return None
        mask |= m
    return mask or None


def _mono_pair(e: Expr) -> tuple[int, int] | None:
    if not isinstance(e, Sum):
        return None
    terms = _flat_terms(e)
    if len(terms) != 2:
        return None
    a, b = (_monomial(t) for t in terms)
    if a is None or b is None:
        return None
    return a, b


def _product_parts(e: Expr) -> tuple[int, list]:
    """Split a product into its monomial part and its remaining factors."""
    if not isinstance(e, Product):
        return 0, [e]
    mask = 0
    rest = []
    for c in e.children:
        if isinstance(c, Product):
            m, r = _product_parts(c)
            mask |= m
            rest.extend(r)
            continue
        m = _monomial(c)
        if m is None:
            rest.append(c)
        else:
            mask |= m
    return mask, rest


# --- families -------------------------------------------------------------

class Family(enum.Enum):
    SINGLE_MONOMIAL = "SingleMonomial"
    LINEAR_SUM = "LinearSum"
    XN_PLUS_P = "XnPlusP"
    MONO_TIMES_LINEAR = "MonoTimesLinear"
    PAIR_TIMES_LINEAR = "PairTimesLinear"
    PARITY_SPLIT = "ParitySplit"
    MONO_TIMES_MONO_PAIR = "MonoTimesMonoPair"
    PADDED_MONO_TIMES_MONO_PAIR = "PaddedMonoTimesMonoPair"


@dataclass(frozen=True)
class PatternHit:
    """A recognised family with its bindings (sets of 0-based positions)."""

    family: Family
    n: int
    bindings: dict = field(default_factory=dict)
    rest: Expr | None = None

    def __getitem__(self, key) -> frozenset[int]:
        return self.bindings[key]


def _fs(mask: int) -> frozenset[int]:
    return frozenset(mask_positions(mask))


def match_family(e: Expr, n: int) -> PatternHit | None:
    """First family (most specific first) whose shape and side conditions fit e."""
    full = (1 << n) - 1
    if variables(e) & ~full:
        return None

    mono = _monomial(e)
    if mono is not None:
        return PatternHit(Family.SINGLE_MONOMIAL, n, {"I": _fs(mono)})

    lin = _linear(e)
    if lin is not None:
        if lin == full:
            return PatternHit(Family.LINEAR_SUM, n, {"S": _fs(lin)})
        return PatternHit(Family.MONO_TIMES_LINEAR, n, {"I": frozenset(), "J": _fs(lin)})

    hit = _match_product(e, n)
    if hit is not None:
        return hit

    pair = _mono_pair(e)
    if pair is not None:
        a, b = pair
        # a sum of two coprime monomials has no common factor to pull out
        if a & b:
            return _mono_times_mono_pair_hit(a & b, pair, n)

    hit = _match_parity_split(e, n)
    if hit is not None:
        return hit

    return _match_xn_plus_p(e, n)


def _match_product(e: Expr, n: int) -> PatternHit | None:
    if not isinstance(e, Product):
        return None
    mono, rest = _product_parts(e)
    if len(rest) == 1:
        (factor,) = rest
        lin = _linear(factor)
        if lin is not None:
            if lin & mono:
                return None
            return PatternHit(Family.MONO_TIMES_LINEAR, n, {"I": _fs(mono), "J": _fs(lin)})
        pair = _mono_pair(factor)
        if pair is not None:
            return _mono_times_mono_pair_hit(mono, pair, n)
        return None
    if len(rest) == 2 and mono == 0:
        for pair_factor, lin_factor in (rest, rest[::-1]):
            pair = _mono_pair(pair_factor)
            lin = _linear(lin_factor)
            if pair is None or lin is None:
                continue
            a, b = pair
            if a & b or a & lin or b & lin or a == b:
                continue
            return PatternHit(Family.PAIR_TIMES_LINEAR, n, {"I1": _fs(a), "I2": _fs(b), "J": _fs(lin)})
    return None


def _mono_times_mono_pair_hit(i: int, pair: tuple[int, int], n: int) -> PatternHit | None:
    # x * x = x, so variables of the outer monomial drop out of the pair
    j, k = pair[0] & ~i, pair[1] & ~i
    if j & k or j == k:
        return None
    full = (1 << n) - 1
    family = Family.MONO_TIMES_MONO_PAIR if (i | j | k) == full else Family.PADDED_MONO_TIMES_MONO_PAIR
    return PatternHit(family, n, {"I": _fs(i), "J": _fs(j), "K": _fs(k)})


def _mono_times_linear_parts(e: Expr, n: int) -> tuple[int, int] | None:
    """(I, J) if e is X^I times a linear sum over J, with I possibly empty."""
    lin = _linear(e)
    if lin is not None:
        return 0, lin
    hit = _match_product(e, n)
    if hit is None or hit.family is not Family.MONO_TIMES_LINEAR:
        return None
    return _mask(hit["I"]), _mask(hit["J"])


def _match_parity_split(e: Expr, n: int) -> PatternHit | None:
    if not isinstance(e, Sum) or len(e.children) != 2:
        return None
    parts = [_mono_times_linear_parts(c, n) for c in e.children]
    if None in parts:
        return None
    (i, j), (i2, j2) = parts
    try:
        _check_parity_split(mask_positions(i), mask_positions(j), mask_positions(i2), mask_positions(j2), n)
    except PreconditionError:
        return None
    return PatternHit(Family.PARITY_SPLIT, n, {"I": _fs(i), "J": _fs(j), "I'": _fs(i2), "J'": _fs(j2)})


def _match_xn_plus_p(e: Expr, n: int) -> PatternHit | None:
    if not isinstance(e, Sum):
        return None
    children = list(e.children)
    # prefer the highest lone variable
    for idx in sorted(range(len(children)), key=lambda k: -(_monomial(children[k]) or 0)):
        m = _monomial(children[idx])
        if m is None or m.bit_count() != 1:
            continue
        others = children[:idx] + children[idx + 1:]
        if any(variables(c) & m for c in others):
            continue
        rest = others[0] if len(others) == 1 else Sum(tuple(others))
        return PatternHit(Family.XN_PLUS_P, n, {"v": _fs(m)}, rest=rest)
    return None


# --- closed forms ---------------------------------------------------------

def _mask(s: Iterable[int]) -> int:
    return mask_of(s)


def _check_subset(s: Iterable[int], n: int, name: str) -> int:
    m = _mask(s)
    if m >> n:
        raise PreconditionError(f"{name} is not a subset of [n] with n={n}")
    return m


def _subsets(mask: int) -> Iterable[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _odd_subsets(mask: int) -> list[int]:
    return [s for s in _subsets(mask) if s.bit_count() % 2]


def _poly(masks: Iterable[int], n: int) -> SparsePoly:
    return SparsePoly.from_masks(masks, n)


def mu_single_monomial(I: Iterable[int], n: int) -> SparsePoly:
    """X^I times every (1 + X_j) with j outside I: all supersets of I."""
    i = _check_subset(I, n, "I")
    free = ((1 << n) - 1) & ~i
    return _poly((i | s for s in _subsets(free)), n)


def weight_single_monomial(I: Iterable[int], n: int) -> int:
    return 1 << (n - _check_subset(I, n, "I").bit_count())


def mu_linear_sum(S: Iterable[int], n: int) -> SparsePoly:
    """Transform of the sum of all n variables: every odd-degree monomial."""
    s = _check_subset(S, n, "S")
    if s != (1 << n) - 1:
        raise NoFastPath("the closed form covers the sum of all n variables only")
    return _poly(_odd_subsets(s), n)


def weight_linear_sum(n: int) -> int:
    return 1 << (n - 1)


def _mu_partial_list(p: SparsePoly, positions: Iterable[int]) -> SparsePoly:
    from .transforms import mobius_list_sequential

    return mobius_list_sequential(p, order=sorted(positions))


def mu_xn_plus_p(p: SparsePoly, n: int | None = None, var: int | None = None) -> SparsePoly:
    """mu(X_v + P) = mu'(P) + X_v mu'(P + 1), mu' running over the other variables.

    ``var`` defaults to the last position n - 1.
    """
    n = p.nvars + 1 if n is None else n
    var = n - 1 if var is None else var
    if not 0 <= var < n:
        raise PreconditionError(f"variable position {var} outside [n]")
    bit = 1 << var
    if p.support & bit:
        raise PreconditionError(f"X{var + 1} occurs in P")
    if p.support >> n:
        raise PreconditionError("P uses positions outside [n]")
    p = p.with_nvars(n)
    others = [k for k in range(n) if k != var]
    low = _mu_partial_list(p, others)
    high = _mu_partial_list(xor_add(p, SparsePoly.one(n)), others)
    return xor_add(low, _poly((m | bit for m in high.masks), n))


def weight_xn_plus_p(n: int) -> int:
    return 1 << (n - 1)


def _check_disjoint(**sets: int) -> None:
    for (a, ma), (b, mb) in combinations(sets.items(), 2):
        if ma & mb:
            raise PreconditionError(f"{a} and {b} overlap")


def mu_mono_times_linear(I: Iterable[int], J: Iterable[int], n: int) -> SparsePoly:
    """(sum of X^L, I ⊆ L ⊆ [n] minus J) times (odd-degree monomials over J)."""
    i, j = _check_subset(I, n, "I"), _check_subset(J, n, "J")
    _check_disjoint(I=i, J=j)
    if not j:
        raise PreconditionError("J must be non-empty")
    free = ((1 << n) - 1) & ~(i | j)
    odd = _odd_subsets(j)
    return _poly((i | s | k for s in _subsets(free) for k in odd), n)


def weight_mono_times_linear(I: Iterable[int], J: Iterable[int], n: int) -> int:
    i, j = _check_subset(I, n, "I"), _check_subset(J, n, "J")
    _check_disjoint(I=i, J=j)
    if not j:
        raise PreconditionError("J must be non-empty")
    return 1 << (n - i.bit_count() - 1)


def _pair_checks(I1, I2, J, n):
    a, b, j = _check_subset(I1, n, "I1"), _check_subset(I2, n, "I2"), _check_subset(J, n, "J")
    _check_disjoint(I1=a, I2=b, J=j)
    if a == b:
        raise PreconditionError("I1 and I2 must differ")
    if not j:
        raise PreconditionError("J must be non-empty")
    return a, b, j


def mu_pair_times_linear(I1: Iterable[int], I2: Iterable[int], J: Iterable[int], n: int) -> SparsePoly:
    """Transform of (X^I1 + X^I2)(sum of X_j, j in J).

    Product of the odd-degree monomials over J, every (1 + X_k) for k
    outside I1, I2 and J, and X^I1 prod_{I2}(1 + X_k) + X^I2 prod_{I1}(1 + X_k).
    """
    a, b, j = _pair_checks(I1, I2, J, n)
    free = ((1 << n) - 1) & ~(a | b | j)
    left = [a | s for s in _subsets(b)]
    right = [b | s for s in _subsets(a)]
    middle: set[int] = set(left)
    middle ^= set(right)
    odd = _odd_subsets(j)
    return _poly((m | s | k for m in middle for s in _subsets(free) for k in odd), n)


def weight_pair_times_linear(I1: Iterable[int], I2: Iterable[int], J: Iterable[int], n: int) -> int:
    a, b, _ = _pair_checks(I1, I2, J, n)
    n1, n2 = a.bit_count(), b.bit_count()
    return (1 << (n - n1 - 1)) + (1 << (n - n2 - 1)) - (1 << (n - n1 - n2))


def _check_parity_split(I, J, I2, J2, n):
    i, j = _check_subset(I, n, "I"), _check_subset(J, n, "J")
    i2, j2 = _check_subset(I2, n, "I'"), _check_subset(J2, n, "J'")
    full = (1 << n) - 1
    if i & j or i2 & j2:
        raise PreconditionError("I, J and I', J' must be disjoint pairs")
    if (i | j) != full or (i2 | j2) != full:
        raise PreconditionError("I ∪ J and I' ∪ J' must both cover [n]")
    if not j or not j2:
        raise PreconditionError("J and J' must be non-empty")
    if i.bit_count() % 2 == i2.bit_count() % 2:
        raise PreconditionError("|I| and |I'| must have different parity")
    return i, j, i2, j2


def mu_parity_split(I, J, I2, J2, n: int) -> SparsePoly:
    """Transform of X^I (sum J) + X^I' (sum J'); the two images share no monomial."""
    i, j, i2, j2 = _check_parity_split(I, J, I2, J2, n)
    a = mu_mono_times_linear(mask_positions(i), mask_positions(j), n)
    b = mu_mono_times_linear(mask_positions(i2), mask_positions(j2), n)
    return _poly(a.masks + b.masks, n)


def weight_parity_split(I, J, I2, J2, n: int) -> int:
    i, _, i2, _ = _check_parity_split(I, J, I2, J2, n)
    return (1 << (n - i.bit_count() - 1)) + (1 << (n - i2.bit_count() - 1))


def _mono_pair_checks(I, J, K, n, partition):
    i, j, k = _check_subset(I, n, "I"), _check_subset(J, n, "J"), _check_subset(K, n, "K")
    _check_disjoint(I=i, J=j, K=k)
    if partition and (i | j | k) != (1 << n) - 1:
        raise PreconditionError("I, J, K must partition [n]")
    return i, j, k


def mu_mono_times_mono_pair(I, J, K, n: int, partition: bool = False) -> SparsePoly:
    """Transform of X^I (X^J + X^K) for pairwise disjoint I, J, K.

    Every (1 + X_l) outside L = I ∪ J ∪ K, times
    X^I (X^J prod_K (1 + X_k) + X^K prod_J (1 + X_j)).
    """
    i, j, k = _mono_pair_checks(I, J, K, n, partition)
    free = ((1 << n) - 1) & ~(i | j | k)
    inner: set[int] = {i | j | s for s in _subsets(k)}
    inner ^= {i | k | s for s in _subsets(j)}
    return _poly((m | s for m in inner for s in _subsets(free)), n)


def weight_mono_times_mono_pair(I, J, K, n: int, partition: bool = False, as_published: bool = False) -> int:
    """2^(n-|L|) (2^|J| + 2^|K| - 2).

    The -2 accounts for X^J X^K, which both halves produce and which
    therefore cancels.  ``as_published=True`` returns the uncorrected
    2^(n-|L|) (2^|J| + 2^|K|) for comparison.
    """
    i, j, k = _mono_pair_checks(I, J, K, n, partition)
    pad = n - (i | j | k).bit_count()
    core = (1 << j.bit_count()) + (1 << k.bit_count())
    if not as_published:
        core -= 2
    return core << pad


# --- dispatch over hits ---------------------------------------------------

def mobius_of(hit: PatternHit) -> SparsePoly:
    n, b, f = hit.n, hit.bindings, hit.family
    if f is Family.SINGLE_MONOMIAL:
        return mu_single_monomial(b["I"], n)
    if f is Family.LINEAR_SUM:
        return mu_linear_sum(b["S"], n)
    if f is Family.MONO_TIMES_LINEAR:
        return mu_mono_times_linear(b["I"], b["J"], n)
    if f is Family.PAIR_TIMES_LINEAR:
        return mu_pair_times_linear(b["I1"], b["I2"], b["J"], n)
    if f is Family.PARITY_SPLIT:
        return mu_parity_split(b["I"], b["J"], b["I'"], b["J'"], n)
    if f is Family.MONO_TIMES_MONO_PAIR:
        return mu_mono_times_mono_pair(b["I"], b["J"], b["K"], n, partition=True)
    if f is Family.PADDED_MONO_TIMES_MONO_PAIR:
        return mu_mono_times_mono_pair(b["I"], b["J"], b["K"], n)
    if f is Family.XN_PLUS_P:
        (v,) = b["v"]
        return mu_xn_plus_p(expand(hit.rest, n), n, var=v)
    raise ValueError(f"unhandled family {f}")


def weight_of(hit: PatternHit, as_published: bool = False) -> int:
    n, b, f = hit.n, hit.bindings, hit.family
    if f is Family.SINGLE_MONOMIAL:
        return weight_single_monomial(b["I"], n)
    if f in (Family.LINEAR_SUM, Family.XN_PLUS_P):
        return 1 << (n - 1)
    if f is Family.MONO_TIMES_LINEAR:
        return weight_mono_times_linear(b["I"], b["J"], n)
    if f is Family.PAIR_TIMES_LINEAR:
        return weight_pair_times_linear(b["I1"], b["I2"], b["J"], n)
    if f is Family.PARITY_SPLIT:
        return weight_parity_split(b["I"], b["J"], b["I'"], b["J'"], n)
    if f in (Family.MONO_TIMES_MONO_PAIR, Family.PADDED_MONO_TIMES_MONO_PAIR):
        return weight_mono_times_mono_pair(b["I"], b["J"], b["K"], n, as_published=as_published)
    raise ValueError(f"unhandled family {f}")


def fast_weight(e: Expr, n: int) -> tuple[int, PatternHit]:
    """Closed-form weight of e.  Raises NoFastPath when no family matches."""
    hit = match_family(e, n)
    if hit is None:
        raise NoFastPath("expression matches no closed-form family")
    return weight_of(hit), hit


def monomial_expansion_cost(p: SparsePoly) -> int:
    """Cost of transforming p monomial by monomial: sum of 2^(n - deg)."""
    return sum(1 << (p.nvars - m.bit_count()) for m in p.masks)


@dataclass(frozen=True)
class SummandEstimate:
    summand: Expr
    hit: PatternHit | None
    ops: int


def estimate_breakdown(e: Expr, n: int) -> list[SummandEstimate]:
    """Per top-level summand: matched family and emitted-term count.

    A summand that matches no family is charged the monomial-expansion cost
    of its own expansion.
    """
    out = []
    for s in summands(e):
        hit = match_family(s, n)
        if hit is not None and hit.family is not Family.XN_PLUS_P:
            ops = weight_of(hit)
        else:
            hit = None
            ops = monomial_expansion_cost(expand(s, n))
        out.append(SummandEstimate(s, hit, ops))
    return out


def estimate_ops(e: Expr, n: int) -> int:
    return sum(s.ops for s in estimate_breakdown(e, n))


def fast_mobius(e: Expr, n: int) -> tuple[SparsePoly, list[SummandEstimate]]:
    """Transform e summand by summand and add the images (mu is linear).

    Matched summands use their closed form; the rest go through the
    monomial-by-monomial expansion.
    """
    acc: set[int] = set()
    parts = estimate_breakdown(e, n)
    for part in parts:
        if part.hit is not None:
            image = mobius_of(part.hit)
        else:
            image = _expand_each_monomial(expand(part.summand, n))
        acc ^= set(image.masks)
    return SparsePoly(tuple(sorted(acc)), n), parts


def _expand_each_monomial(p: SparsePoly) -> SparsePoly:
    acc: set[int] = set()
    for m in p.masks:
        acc ^= set(mu_single_monomial(mask_positions(m), p.nvars).masks)
    return SparsePoly(tuple(sorted(acc)), p.nvars)
