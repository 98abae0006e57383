"""Boolean function representations and arithmetic in the ring R_n.

Three views of the same function are supported:

* ``SparsePoly``: the polynomial form, a set of monomials over GF(2) in
  R_n = K_2[X_1..X_n] / <X_1^2, ..., X_n^2>.
* ``DenseForm``: a 2^n bit vector, either the ANF (characteristic vector of
  monomials) or the truth table (characteristic vector of minterms).
* ``Monomial``: a set of variable positions packed into an integer mask.

Position ``i`` (0-based) stands for the indeterminate X_{i+1}.  Bit ``k`` of a
dense vector corresponds to the point/monomial ``u`` with
``k = sum(u_i * 2**(i-1))``, so the mask of a monomial is also its index in
the ANF vector.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_SPARSE_VARS = 64
MAX_DENSE_VARS = 26

NEG_INF = -math.inf
"""Degree/valuation of the zero polynomial; compares below every integer."""


class BoolMobiusError(Exception):
    """Base class for library errors."""


class RepresentationError(BoolMobiusError, ValueError):
    """A dense form was used with the wrong role (ANF vs truth table)."""


class DomainError(BoolMobiusError, ValueError):
    """An argument lies outside the operation's domain."""


class CapacityError(BoolMobiusError, ValueError):
    """The requested size exceeds a dense, sparse or oracle capacity limit."""


def check_sparse_capacity(n: int) -> None:
    if n > MAX_SPARSE_VARS:
        raise CapacityError(f"n={n} exceeds the sparse limit of {MAX_SPARSE_VARS} variables")


def check_dense_capacity(n: int) -> None:
    if n > MAX_DENSE_VARS:
        raise CapacityError(f"n={n} exceeds the dense limit of {MAX_DENSE_VARS} variables")


class Monomial(int):
    """A monomial X^I stored as the bitmask of I.

    ``Monomial(0)`` is the constant 1.  Being an ``int``, a monomial can be
    used directly as an index into an ANF vector.
    """

    def __new__(cls, mask: int = 0):
        mask = int(mask)
        if mask < 0 or mask.bit_length() > MAX_SPARSE_VARS:
            raise DomainError(f"monomial mask {mask:#x} does not fit in {MAX_SPARSE_VARS} bits")
        return super().__new__(cls, mask)

    @classmethod
    def of(cls, *positions: int) -> Monomial:
        """Build X^I from 0-based positions.  Repeats are absorbed."""
        mask = 0
        for p in positions:
            if not 0 <= p < MAX_SPARSE_VARS:
                raise DomainError(f"variable position {p} out of range")
            mask |= 1 << p
        return cls(mask)

    @property
    def mask(self) -> int:
        return int(self)

    @property
    def degree(self) -> int:
        return int(self).bit_count()

    @property
    def positions(self) -> tuple[int, ...]:
        return mask_positions(int(self))

    def __repr__(self) -> str:
        if not self:
            return "Monomial(1)"
        return "Monomial(" + "*".join(f"X{p + 1}" for p in self.positions) + ")"


def mask_positions(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def mask_of(positions: Iterable[int]) -> int:
    mask = 0
    for p in positions:
        mask |= 1 << p
    return mask


@dataclass(frozen=True)
class SparsePoly:
    """A polynomial of R_n as a canonical tuple of monomial masks.

    ``masks`` is strictly ascending, so structural equality is algebraic
    equality.  ``nvars`` is the declared variable count n; it may exceed the
    largest position actually used.
    """

    masks: tuple[int, ...] = ()
    nvars: int = 0

    def __post_init__(self):
        masks = self.masks
        if any(b <= a for a, b in zip(masks, masks[1:])):
            raise DomainError("masks must be strictly ascending; use SparsePoly.from_masks")
        if masks and masks[0] < 0:
            raise DomainError("negative monomial mask")
        check_sparse_capacity(self.nvars)
        if masks and masks[-1].bit_length() > MAX_SPARSE_VARS:
            raise CapacityError(f"monomial uses a position beyond {MAX_SPARSE_VARS}")

    @classmethod
    def from_masks(cls, masks: Iterable[int], nvars: int | None = None) -> SparsePoly:
        """Collect masks with GF(2) coefficients: a mask listed twice cancels."""
        odd: set[int] = set()
        for m in masks:
            odd ^= {int(m)}
        ordered = tuple(sorted(odd))
        if nvars is None:
            nvars = max((m.bit_length() for m in ordered), default=0)
        return cls(ordered, nvars)

    @classmethod
    def from_sets(cls, monomials: Iterable[Iterable[int]], nvars: int | None = None) -> SparsePoly:
        """Build from monomials given as iterables of 0-based positions."""
        return cls.from_masks((mask_of(m) for m in monomials), nvars)

    @classmethod
    def zero(cls, nvars: int = 0) -> SparsePoly:
        return cls((), nvars)

    @classmethod
    def one(cls, nvars: int = 0) -> SparsePoly:
        return cls((0,), nvars)

    @property
    def monomials(self) -> tuple[Monomial, ...]:
        return tuple(Monomial(m) for m in self.masks)

    @property
    def support(self) -> int:
        """Mask of every position occurring in some monomial."""
        acc = 0
        for m in self.masks:
            acc |= m
        return acc

    def with_nvars(self, nvars: int) -> SparsePoly:
        return SparsePoly(self.masks, nvars)

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self):
        return iter(self.masks)

    def __contains__(self, mask) -> bool:
        return int(mask) in self._maskset

    @property
    def _maskset(self) -> frozenset[int]:
        cached = self.__dict__.get("_set")
        if cached is None:
            cached = frozenset(self.masks)
            object.__setattr__(self, "_set", cached)
        return cached

    def __bool__(self) -> bool:
        return bool(self.masks)

    def __add__(self, other: SparsePoly) -> SparsePoly:
        return xor_add(self, other)

    def __mul__(self, other: SparsePoly) -> SparsePoly:
        return ring_mul(self, other)

    def __repr__(self) -> str:
        terms = []
        for m in self.masks:
            terms.append("*".join(f"X{p + 1}" for p in mask_positions(m)) or "1")
        return f"SparsePoly({' + '.join(terms) or '0'}; n={self.nvars})"


class Role(enum.Enum):
    ANF = "anf"
    TRUTH_TABLE = "tt"

    def flipped(self) -> Role:
        return Role.TRUTH_TABLE if self is Role.ANF else Role.ANF


@dataclass(frozen=True, eq=False)
class DenseForm:
    """A read-only 2^n bit vector tagged with its role."""

    bits: np.ndarray
    role: Role

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        size = bits.size
        if bits.ndim != 1 or size < 1 or size & (size - 1):
            raise DomainError(f"dense form length {size} is not a power of two")
        if np.any(bits > 1):
            raise DomainError("dense form entries must be 0 or 1")
        check_dense_capacity(size.bit_length() - 1)
        if bits.flags.writeable:
            bits = bits.copy()
            bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str, role: Role) -> DenseForm:
        if set(text) - {"0", "1"}:
            raise DomainError(f"dense string contains characters other than 0/1: {text!r}")
        return cls(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"), role)

    @classmethod
    def zeros(cls, n: int, role: Role) -> DenseForm:
        check_dense_capacity(n)
        return cls(np.zeros(1 << n, dtype=np.uint8), role)

    @property
    def n(self) -> int:
        return self.bits.size.bit_length() - 1

    def to_string(self) -> str:
        return (self.bits + ord("0")).tobytes().decode()

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseForm):
            return NotImplemented
        return self.role is other.role and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.role, self.bits.tobytes()))

    def __repr__(self) -> str:
        body = self.to_string() if self.n <= 6 else f"<{self.bits.size} bits>"
        return f"DenseForm({self.role.value}:{body})"


@dataclass(frozen=True)
class RMSplit:
    """Reed-Muller split P = p0 + X_i * p1 with neither part containing X_i."""

    p0: SparsePoly
    p1: SparsePoly
    i: int

    def recombine(self) -> SparsePoly:
        bit = 1 << self.i
        shifted = SparsePoly.from_masks((m | bit for m in self.p1.masks), self.p1.nvars)
        return xor_add(self.p0, shifted)


def dense_to_sparse(d: DenseForm) -> SparsePoly:
    """Read an ANF vector as a polynomial form."""
    if d.role is not Role.ANF:
        raise RepresentationError("dense_to_sparse expects an ANF vector")
    return bits_to_poly(d.bits)


def bits_to_poly(bits: np.ndarray) -> SparsePoly:
    """Role-agnostic: set bit k becomes the monomial with mask k."""
    n = bits.size.bit_length() - 1
    return SparsePoly(tuple(int(k) for k in np.flatnonzero(bits)), n)


def poly_to_bits(p: SparsePoly) -> np.ndarray:
    n = p.nvars
    check_dense_capacity(n)
    if p.masks and p.masks[-1] >> n:
        raise DomainError(f"monomial uses a position >= nvars={n}")
    bits = np.zeros(1 << n, dtype=np.uint8)
    if p.masks:
        bits[np.fromiter(p.masks, dtype=np.int64, count=len(p.masks))] = 1
    return bits


def sparse_to_dense(p: SparsePoly) -> DenseForm:
    """ANF vector of p over exactly p.nvars variables."""
    return DenseForm(poly_to_bits(p), Role.ANF)


def decompose(p: SparsePoly, i: int) -> RMSplit:
    """Split p on X_{i+1}: p0 collects monomials without it, p1 its cofactor."""
    if not 0 <= i < p.nvars:
        raise DomainError(f"position {i} >= nvars={p.nvars}")
    bit = 1 << i
    p0 = tuple(m for m in p.masks if not m & bit)
    p1 = sorted(m ^ bit for m in p.masks if m & bit)
    return RMSplit(SparsePoly(p0, p.nvars), SparsePoly(tuple(p1), p.nvars), i)


def xor_add(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    """Sum in GF(2): symmetric difference of the monomial sets."""
    return SparsePoly(tuple(sorted(p._maskset ^ q._maskset)), max(p.nvars, q.nvars))


def ring_mul(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    """Product in R_n, where X_i^2 = 0: overlapping monomials vanish."""
    acc: set[int] = set()
    for b in q.masks:
        for a in p.masks:
            if not a & b:
                acc ^= {a | b}
    return SparsePoly(tuple(sorted(acc)), max(p.nvars, q.nvars))


def weight(d: DenseForm) -> int:
    """Hamming weight of a truth table."""
    if d.role is not Role.TRUTH_TABLE:
        raise RepresentationError("weight expects a truth table")
    return int(d.bits.sum(dtype=np.int64))


def degree(p: SparsePoly) -> int | float:
    if not p.masks:
        return NEG_INF
    return max(m.bit_count() for m in p.masks)


def valuation(p: SparsePoly) -> int | float:
    if not p.masks:
        return NEG_INF
    return min(m.bit_count() for m in p.masks)


def complement(p: SparsePoly) -> SparsePoly:
    """The polynomial P' with P + P' = prod_i (1 + X_i), i.e. all 2^n monomials."""
    n = p.nvars
    check_dense_capacity(n)
    bits = poly_to_bits(p)
    return SparsePoly(tuple(int(k) for k in np.flatnonzero(bits == 0)), n)


def evaluate(p: SparsePoly, point: Sequence[int]) -> int:
    """f(a) = XOR over monomials X^u of p of prod_{i in u} a_i."""
    if len(point) != p.nvars:
        raise DomainError(f"point has {len(point)} coordinates, expected {p.nvars}")
    a = mask_of(i for i, v in enumerate(point) if v)
    out = 0
    for m in p.masks:
        if m & a == m:
            out ^= 1
    return out
