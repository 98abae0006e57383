"""Möbius transform, Hamming weight and operation counting for Boolean functions."""

from .core import (
    MAX_DENSE_VARS,
    MAX_SPARSE_VARS,
    NEG_INF,
    BoolMobiusError,
    CapacityError,
    DenseForm,
    DomainError,
    Monomial,
    RepresentationError,
    RMSplit,
    Role,
    SparsePoly,
    complement,
    decompose,
    degree,
    dense_to_sparse,
    evaluate,
    ring_mul,
    sparse_to_dense,
    valuation,
    weight,
    xor_add,
)
from .fastpath import (
    Family,
    NoFastPath,
    PatternHit,
    PreconditionError,
    estimate_ops,
    expand,
    fast_mobius,
    fast_weight,
    match_family,
)
from .oracle import mobius_naive, truth_table_naive, weight_naive
from .parser import Indexing, IndexingError, ParseError, parse_dense, parse_poly, serialize
from .transforms import (
    Algo,
    OpCounter,
    OpUnit,
    exclusive_mul,
    mobius_butterfly_iterative,
    mobius_butterfly_recursive,
    mobius_dense,
    mobius_exclusive_vector,
    mobius_list_greedy,
    mobius_list_sequential,
    mobius_with_complement,
    mu_full,
    mu_xi,
)

__version__ = "0.1.0"
