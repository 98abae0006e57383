"""Text formats for polynomial forms and dense vectors.

Polynomial grammar (whitespace is insignificant)::

    expr   := term ('+' term)*
    term   := factor ('*' factor)*
    factor := 'X' digits | '1' | '(' expr ')'

``0`` is accepted only as a whole expression.  Multiplication must be
written out: ``X1X2`` is a syntax error.

Dense vectors carry their role as a prefix: ``anf:0101`` or ``tt:0100``.
The hex form is ``anf:hex:n=4:5000``, reading the hex digits as the binary
string in groups of four.

Corpus files start with optional ``#key=value`` header lines (``indexing``
and ``n``) followed by one expression, which may span several lines.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    MAX_SPARSE_VARS,
    BoolMobiusError,
    CapacityError,
    DenseForm,
    DomainError,
    Role,
    SparsePoly,
    mask_positions,
)
from .fastpath import Expr, Mono, One, Product, Sum


class Indexing(enum.Enum):
    ZERO_BASED = 0
    ONE_BASED = 1


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValueError(f"bad span {self.start}..{self.end}")


class ParseError(BoolMobiusError, ValueError):
    def __init__(self, message: str, span: SourceSpan | None = None, text: str | None = None):
        self.span = span
        self.text = text
        if span is not None:
            message = f"{message} at {span.start}..{span.end}"
        super().__init__(message)


class IndexingError(ParseError):
    """A variable index is invalid under the active indexing convention."""


_TOKEN = re.compile(r"\s*(?:(?P<var>X\d+)|(?P<num>\d+)|(?P<op>[+*()])|(?P<bad>\S))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        kind = m.lastgroup
        out.append((kind, m.group(kind), SourceSpan(m.start(kind), m.end(kind))))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, indexing: Indexing):
        self.text = text
        self.indexing = indexing
        self.tokens = _tokenize(text)
        self.i = 0

    def error(self, message, span=None, cls=ParseError):
        if span is None:
            span = self.tokens[self.i][2] if self.i < len(self.tokens) else SourceSpan(len(self.text), len(self.text))
        raise cls(message, span, self.text)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> Expr:
        kind, value, _ = self.peek()
        if kind is None:
            self.error("empty expression")
        if kind == "num" and value == "0" and len(self.tokens) == 1:
            return Sum(())
        expr = self.expr()
        if self.i < len(self.tokens):
            self.error("unexpected trailing input")
        return expr

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek()[1] == "+":
            self.take()
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.peek()[1] == "*":
            self.take()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self) -> Expr:
        kind, value, span = self.take()
        if kind == "var":
            index = int(value[1:])
            pos = index - self.indexing.value
            if pos < 0:
                self.error(f"X{index} is not a valid variable under one-based indexing", span, IndexingError)
            if pos >= MAX_SPARSE_VARS:
                raise CapacityError(f"X{index} exceeds the {MAX_SPARSE_VARS}-variable limit at {span.start}..{span.end}")
            if self.peek()[0] == "var" and self.peek()[2].start == span.end:
                self.error("juxtaposed variables; write '*' between factors", self.peek()[2])
            return Mono(1 << pos)
        if kind == "num":
            if value != "1":
                self.error(f"unexpected constant {value!r}; only 1 may be a factor", span)
            return One()
        if value == "(":
            inner = self.expr()
            kind2, value2, _ = self.peek()
            if value2 != ")":
                self.error("expected ')'")
            self.take()
            return inner
        if kind is None:
            self.error("unexpected end of input")
        self.error(f"unexpected token {value!r}", span)


def parse_poly(text: str, indexing: Indexing = Indexing.ONE_BASED) -> Expr:
    """Parse an expression, keeping the user's factorisation."""
    return _Parser(text, Indexing(indexing)).parse()


_HEX = re.compile(r"hex:n=(\d+):([0-9a-fA-F]+)")


def parse_dense(text: str) -> DenseForm:
    """Parse ``anf:<bits>``, ``tt:<bits>`` or their ``hex:n=<n>:`` variants."""
    text = text.strip()
    prefix, sep, payload = text.partition(":")
    if not sep or prefix not in ("anf", "tt"):
        raise ParseError("dense input needs an 'anf:' or 'tt:' prefix", SourceSpan(0, len(prefix)), text)
    role = Role(prefix)
    offset = len(prefix) + 1
    if payload.startswith("hex:"):
        m = _HEX.fullmatch(payload)
        if m is None:
            raise ParseError("malformed hex payload, expected hex:n=<int>:<digits>", SourceSpan(offset, len(text)), text)
        n = int(m.group(1))
        digits = m.group(2)
        size = 1 << n
        if len(digits) != max(1, -(-size // 4)):
            raise ParseError(f"hex payload has {len(digits)} digits, n={n} needs {max(1, -(-size // 4))}",
                             SourceSpan(offset, len(text)), text)
        bits = "".join(f"{int(c, 16):04b}" for c in digits)
        if "1" in bits[size:]:
            raise ParseError("hex payload sets padding bits", SourceSpan(offset, len(text)), text)
        payload = bits[:size]
    bad = re.search(r"[^01]", payload)
    if bad:
        raise ParseError(f"invalid character {bad.group()!r}", SourceSpan(offset + bad.start(), offset + bad.end()), text)
    size = len(payload)
    if size == 0 or size & (size - 1):
        raise ParseError(f"length {size} is not a power of two", SourceSpan(offset, len(text)), text)
    try:
        return DenseForm.from_string(payload, role)
    except DomainError as exc:
        raise ParseError(str(exc), SourceSpan(offset, len(text)), text) from exc


def dense_to_hex(d: DenseForm) -> str:
    bits = d.to_string()
    bits += "0" * (-len(bits) % 4)
    digits = "".join(f"{int(bits[k:k + 4], 2):x}" for k in range(0, len(bits), 4))
    return f"{d.role.value}:hex:n={d.n}:{digits}"


def _var(pos: int, indexing: Indexing) -> str:
    return f"X{pos + indexing.value}"


def _mono_text(mask: int, indexing: Indexing) -> str:
    if not mask:
        return "1"
    return "*".join(_var(p, indexing) for p in mask_positions(mask))


def _expr_text(e: Expr, indexing: Indexing, top: bool = True) -> str:
    if isinstance(e, One):
        return "1"
    if isinstance(e, Mono):
        return _mono_text(e.mask, indexing)
    if isinstance(e, Sum):
        if not e.children:
            return "0"
        body = " + ".join(_expr_text(c, indexing, top=False) for c in e.children)
        return body if top else f"({body})"
    if isinstance(e, Product):
        # a nested Product needs no brackets: '*' is associative in the grammar
        return "*".join(_expr_text(c, indexing, top=False) for c in e.children)
    raise TypeError(f"cannot serialize {type(e).__name__}")


def serialize(x, indexing: Indexing = Indexing.ONE_BASED) -> str:
    """Canonical text for a SparsePoly, FactoredExpr or DenseForm."""
    indexing = Indexing(indexing)
    if isinstance(x, DenseForm):
        return f"{x.role.value}:{x.to_string()}"
    if isinstance(x, SparsePoly):
        if not x.masks:
            return "0"
        return " + ".join(_mono_text(m, indexing) for m in x.masks)
    return _expr_text(x, indexing)


@dataclass(frozen=True)
class Corpus:
    expr: Expr
    nvars: int | None
    indexing: Indexing
    headers: dict


def parse_corpus(text: str, indexing: Indexing = Indexing.ONE_BASED) -> Corpus:
    """Split '#key=value' header lines from the expression body."""
    headers = {}
    body = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition("=")
            if sep:
                headers[key.strip()] = value.strip()
            continue
        body.append(line)
    if "indexing" in headers:
        try:
            indexing = Indexing(int(headers["indexing"]))
        except ValueError as exc:
            raise ParseError(f"bad indexing header {headers['indexing']!r}") from exc
    nvars = int(headers["n"]) if "n" in headers else None
    return Corpus(parse_poly("\n".join(body), indexing), nvars, indexing, headers)


def load_corpus(path) -> Corpus:
    return parse_corpus(Path(path).read_text(encoding="utf-8"))


CORPUS_DIR = Path(__file__).with_name("corpus")


def achterbahn() -> Corpus:
    """The 13-variable Achterbahn-128 filter function in factored form."""
    return load_corpus(CORPUS_DIR / "achterbahn.poly")
