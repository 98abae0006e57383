"""Differential verification and operation-count benchmarks.

Both drivers are deterministic for a given seed.  Bench reports are plain
dicts ready for ``json.dumps``; their layout is pinned by
``data/bench_report.schema.json``.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np

from .core import CapacityError, SparsePoly, bits_to_poly
from .fastpath import Expr, estimate_ops, expand, fast_mobius
from .oracle import MAX_ORACLE_VARS, mobius_naive
from .parser import achterbahn, serialize
from .transforms import Algo, OpCounter, OpUnit, mobius_list_sequential, mu_full

SCHEMA_PATH = Path(__file__).with_name("data") / "bench_report.schema.json"

VERIFIED_ALGOS = (
    Algo.RECURSIVE_BUTTERFLY,
    Algo.ITERATIVE_BUTTERFLY,
    Algo.EXCLUSIVE_MULT_VECTOR,
    Algo.EXCLUSIVE_MULT_LIST,
    Algo.GREEDY_LIST,
    Algo.COMPLEMENT,
    Algo.AUTO,
)

Transform = Callable[[SparsePoly], SparsePoly]


def default_transforms() -> dict[str, Transform]:
    return {a.value: (lambda p, a=a: mu_full(p, a)[0]) for a in VERIFIED_ALGOS}


def random_functions(n: int, count: int, seed: int) -> Iterable[SparsePoly]:
    """``count`` uniformly random functions of n variables, as polynomial forms."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield bits_to_poly(rng.integers(0, 2, size=1 << n, dtype=np.uint8))


def all_functions(n: int) -> Iterable[SparsePoly]:
    size = 1 << n
    for code in range(1 << size):
        yield SparsePoly(tuple(k for k in range(size) if code >> k & 1), n)


@dataclass
class Divergence:
    algorithm: str
    input: str
    expected: str
    got: str


@dataclass
class VerifyResult:
    n: int
    checked: int
    algorithms: list[str]
    divergence: Divergence | None = None

    @property
    def ok(self) -> bool:
        return self.divergence is None

    def to_dict(self) -> dict:
        out = {"n": self.n, "checked": self.checked, "algorithms": self.algorithms, "ok": self.ok}
        if self.divergence is not None:
            out["divergence"] = vars(self.divergence)
        return out


def verify(
    n: int,
    samples: int | None = None,
    seed: int = 0,
    transforms: Mapping[str, Transform] | None = None,
) -> VerifyResult:
    """Run every transform against the oracle; stop at the first divergence.

    ``samples=None`` enumerates all 2^(2^n) functions.
    """
    if n > MAX_ORACLE_VARS:
        raise CapacityError(f"verify needs n <= {MAX_ORACLE_VARS}")
    transforms = dict(transforms or default_transforms())
    names = sorted(transforms)
    source = all_functions(n) if samples is None else random_functions(n, samples, seed)
    checked = 0
    for p in source:
        expected = mobius_naive(p)
        for name in names:
            got = transforms[name](p)
            if got.masks != expected.masks:
                div = Divergence(name, serialize(p), serialize(expected), serialize(got))
                return VerifyResult(n, checked, names, div)
        checked += 1
    return VerifyResult(n, checked, names)


# --- benchmarks -----------------------------------------------------------

def _report(algorithm, n, descriptor, count, unit, elapsed, agrees, timing, **extra) -> dict:
    out = {
        "algorithm": algorithm,
        "n": n,
        "input": descriptor,
        "op_count": int(count),
        "op_unit": unit.value,
        "wall_time_s": round(elapsed, 6) if timing else None,
    }
    if agrees is not None:
        out["agrees_with_oracle"] = agrees
    out.update(extra)
    return out


def _timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


def bench_poly(
    p: SparsePoly,
    descriptor: str,
    algos: Iterable[Algo] = VERIFIED_ALGOS[:-1],
    order: list[int] | None = None,
    timing: bool = False,
) -> list[dict]:
    """One report per algorithm on one input, sorted by algorithm name."""
    n = p.nvars
    expected = mobius_naive(p) if n <= MAX_ORACLE_VARS else None
    reports = []
    for algo in algos:
        (image, counter), elapsed = _timed(lambda: mu_full(p, algo))
        agrees = None if expected is None else image == expected
        reports.append(_report(algo.value, n, descriptor, counter.total, counter.unit, elapsed, agrees, timing,
                               per_step=counter.per_step))
    if order is not None:
        counter = OpCounter()
        image, elapsed = _timed(lambda: mobius_list_sequential(p, order=order, counter=counter))
        agrees = None if expected is None else image == expected
        label = "list[order=" + ",".join(str(i + 1) for i in order) + "]"
        reports.append(_report(label, n, descriptor, counter.list_mods, OpUnit.LIST_MOD, elapsed, agrees, timing,
                               per_step=counter.per_step))
    reports.sort(key=lambda r: r["algorithm"])
    return reports


def bench_factored(e: Expr, n: int, descriptor: str, timing: bool = False) -> list[dict]:
    """Algorithm reports plus a fast-path record with the savings over the butterfly."""
    p = expand(e, n)
    reports = bench_poly(p, descriptor, timing=timing)
    butterfly = next(r["op_count"] for r in reports if r["algorithm"] == Algo.ITERATIVE_BUTTERFLY.value)
    (estimate, elapsed) = _timed(lambda: estimate_ops(e, n))
    agrees = None
    if n <= MAX_ORACLE_VARS:
        agrees = fast_mobius(e, n)[0] == mobius_naive(p)
    savings = 1 - estimate / butterfly
    reports.append(_report("fastpath", n, descriptor, estimate, OpUnit.EMITTED_TERM, elapsed, agrees, timing,
                           baseline="ibm", baseline_ops=butterfly, savings=round(savings, 6),
                           savings_percent=f"{100 * savings:.2f}%"))
    reports.sort(key=lambda r: r["algorithm"])
    return reports


def bench_achterbahn(timing: bool = False) -> list[dict]:
    corpus = achterbahn()
    return bench_factored(corpus.expr, corpus.nvars, "achterbahn", timing=timing)


def bench_random(n: int, samples: int, seed: int, density: float = 0.5, timing: bool = False) -> list[dict]:
    rng = np.random.default_rng(seed)
    reports = []
    for k in range(samples):
        bits = (rng.random(1 << n) < density).astype(np.uint8)
        reports.extend(bench_poly(bits_to_poly(bits), f"random[seed={seed},k={k}]", timing=timing))
    return reports


def report_lines(reports: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in reports)


def load_schema() -> dict:
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


__all__ = [
    "Divergence",
    "VerifyResult",
    "all_functions",
    "bench_achterbahn",
    "bench_factored",
    "bench_poly",
    "bench_random",
    "load_schema",
    "random_functions",
    "report_lines",
    "verify",
]
