"""Exact scalars and dense linear algebra.

Scalars live in one of two fields:

* ``QQ``: exact rationals,
* ``QQ(h11, h12, ...)``: rational functions in named parameters.

Both are sympy polynomial-domain objects. Rational-function elements are kept
GCD-reduced with a monic denominator under the graded-lexicographic order, with
variables sorted by name, so equality is structural.

Dense matrices are :class:`Mat` values.  Row reduction pivots on the first
structurally nonzero entry of each column.
"""
from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import sympy
from sympy import QQ
from sympy.polys.domains.domain import Domain
from sympy.polys.fields import FracElement
from sympy.polys.orderings import grlex

__all__ = [
    "AlgebraError",
    "ScalarDivisionError",
    "SamplingError",
    "QQ",
    "SAMPLE_RANGE",
    "scalar_field",
    "field_variables",
    "join_fields",
    "to_scalar",
    "convert",
    "scalar_arith",
    "format_scalar",
    "parse_scalar",
    "evaluate",
    "sample_point",
    "Mat",
    "row_reduce",
    "rank",
    "nullspace",
    "rank_generic",
    "inverse",
]

#: Inclusive integer range for numerators and denominators of sampled points.
SAMPLE_RANGE = (1, 997)

_MAX_RESAMPLES = 20


class AlgebraError(Exception):
    """Base class for errors raised by the exact-algebra layer."""


class ScalarDivisionError(AlgebraError, ZeroDivisionError):
    """Division by a structurally zero scalar."""


class SamplingError(AlgebraError):
    """Random evaluation kept hitting vanishing denominators."""


@functools.lru_cache(maxsize=None)
def _field(names: tuple[str, ...]) -> Domain:
    if not names:
        return QQ
    return QQ.frac_field(*sympy.symbols(list(names)), order=grlex)


def scalar_field(names: Iterable[str] = ()) -> Domain:
    """Field of rational functions in ``names`` (``QQ`` when empty)."""
    return _field(tuple(sorted(set(str(n) for n in names))))


def field_variables(K: Domain) -> tuple[str, ...]:
    if K == QQ:
        return ()
    return tuple(str(s) for s in K.symbols)


def join_fields(*fields: Domain) -> Domain:
    """Smallest field in our tower containing every given field."""
    names: set[str] = set()
    for K in fields:
        names.update(field_variables(K))
    return scalar_field(names)


def _sympify(value) -> sympy.Expr:
    if isinstance(value, float):
        return sympy.Rational(Fraction(value))
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, str):
        return sympy.sympify(value, rational=True)
    return sympy.sympify(value)


def to_scalar(value, K: Domain):
    """Coerce ``value`` into an element of ``K``.

    Accepts ints, floats (converted exactly), ``Fraction``, strings such as
    ``"-1/2"`` or ``"h11*h22 - h12**2"``, sympy expressions and elements of
    any field of the tower whose variables are a subset of ``K``'s.
    """
    if K == QQ and type(value) is type(QQ.one):
        return value
    if isinstance(value, FracElement):
        if K != QQ and value.field == K.field:
            return value
        value = value.as_expr()
    elif type(value) is type(QQ.one):
        return K.convert_from(value, QQ)
    expr = _sympify(value)
    extra = {str(s) for s in expr.free_symbols} - set(field_variables(K))
    if extra:
        raise AlgebraError(f"variables {sorted(extra)} not in field {K}")
    return K.from_sympy(expr)


def convert(a, src: Domain, dst: Domain):
    """Move ``a`` from field ``src`` into the (larger) field ``dst``."""
    if src == dst:
        return a
    return to_scalar(src.to_sympy(a), dst)


parse_scalar = to_scalar


def scalar_arith(a, b, op: str, K: Domain):
    """Apply ``op`` (one of ``+ - * /``, also ``− × ÷``) in the field ``K``."""
    a, b = to_scalar(a, K), to_scalar(b, K)
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        if not b:
            raise ScalarDivisionError("division by the zero scalar")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def format_scalar(a, K: Domain) -> str:
    """Normalized string form, stable for a fixed field."""
    return str(K.to_sympy(a))


def evaluate(a, K: Domain, point: Mapping[str, object]):
    """Value of ``a`` at a rational point, as an element of ``QQ``."""
    if K == QQ:
        return a
    vals = [QQ.convert(_qq(point[name])) for name in field_variables(K)]
    den = a.denom(*vals)
    if not den:
        raise ScalarDivisionError("denominator vanishes at the sample point")
    return QQ.convert(a.numer(*vals)) / QQ.convert(den)


def _qq(v):
    if isinstance(v, Fraction):
        return QQ(v.numerator, v.denominator)
    if isinstance(v, float):
        f = Fraction(v)
        return QQ(f.numerator, f.denominator)
    if isinstance(v, sympy.Rational):
        return QQ(int(v.p), int(v.q))
    return v


def _random_rational(rng: random.Random):
    lo, hi = SAMPLE_RANGE
    return QQ(rng.randint(lo, hi), rng.randint(lo, hi))


def sample_point(K: Domain, rng: random.Random, relations: Sequence = ()) -> dict:
    """Random rational point for the variables of ``K``.

    Each side relation (a polynomial that must vanish) has to be linear in at
    least one variable; that variable is solved for after the others are
    sampled, so the returned point satisfies every relation exactly.
    """
    names = field_variables(K)
    if not relations:
        return {n: _random_rational(rng) for n in names}
    syms = {n: sympy.Symbol(n) for n in names}
    plan = []
    dependent: set[str] = set()
    for rel in relations:
        expr = sympy.expand(sympy.numer(sympy.together(K.to_sympy(rel))))
        linear = [n for n in names if n not in dependent
                  and sympy.degree(expr, syms[n]) == 1]
        if not linear:
            raise AlgebraError(f"side relation {expr} is not linear in any free variable")
        var = linear[-1]
        dependent.add(var)
        a, b = sympy.Poly(expr, syms[var]).all_coeffs()
        plan.append((var, a, b))
    for _ in range(_MAX_RESAMPLES):
        point = {n: _random_rational(rng) for n in names if n not in dependent}
        ok = True
        for var, a, b in plan:
            subs = {syms[n]: sympy.Rational(int(v.numerator), int(v.denominator))
                    for n, v in point.items()}
            av = a.subs(subs)
            if av == 0:
                ok = False
                break
            point[var] = _qq(sympy.Rational(-b.subs(subs) / av))
        if ok:
            return point
    raise SamplingError("could not sample a point on the side relations")


@dataclass(frozen=True)
class Mat:
    """Dense row-major matrix over a field of the tower."""

    rows: int
    cols: int
    entries: tuple
    domain: Domain

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], K: Domain | None = None) -> "Mat":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        K = QQ if K is None else K
        entries = tuple(to_scalar(v, K) for r in rows for v in r)
        return cls(len(rows), ncols, entries, K)

    @classmethod
    def zeros(cls, rows: int, cols: int, K: Domain = QQ) -> "Mat":
        return cls(rows, cols, (K.zero,) * (rows * cols), K)

    @classmethod
    def identity(cls, n: int, K: Domain = QQ) -> "Mat":
        return cls(n, n, tuple(K.one if i == j else K.zero
                               for i in range(n) for j in range(n)), K)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def tolist(self) -> list[list]:
        return [self.row(i) for i in range(self.rows)]

    def __matmul__(self, other):
        if isinstance(other, Mat):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            K = self.domain
            out = []
            for i in range(self.rows):
                r = self.row(i)
                for j in range(other.cols):
                    s = K.zero
                    for k in range(self.cols):
                        if r[k]:
                            s += r[k] * other.entries[k * other.cols + j]
                    out.append(s)
            return Mat(self.rows, other.cols, tuple(out), K)
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return [sum((a * b for a, b in zip(self.row(i), vec) if a), self.domain.zero)
                for i in range(self.rows)]

    def evaluate(self, point: Mapping[str, object]) -> "Mat":
        return Mat(self.rows, self.cols,
                   tuple(evaluate(a, self.domain, point) for a in self.entries), QQ)

    def over(self, K: Domain) -> "Mat":
        if K == self.domain:
            return self
        return Mat(self.rows, self.cols,
                   tuple(convert(a, self.domain, K) for a in self.entries), K)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def stack(self, *others: "Mat") -> "Mat":
        entries = list(self.entries)
        rows = self.rows
        for o in others:
            if o.cols != self.cols:
                raise ValueError("column mismatch")
            entries.extend(o.over(self.domain).entries)
            rows += o.rows
        return Mat(rows, self.cols, tuple(entries), self.domain)


def row_reduce(rows: Sequence[Sequence], K: Domain) -> tuple[list[list], list[int]]:
    """Reduced row-echelon form; returns (nonzero rows, pivot columns)."""
    work = [list(r) for r in rows if any(r)]
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(work):
            break
        p = next((i for i in range(r, len(work)) if work[i][c]), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        inv = K.one / work[r][c]
        work[r] = [v * inv if v else v for v in work[r]]
        pr = work[r]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [a - f * b if b else a for a, b in zip(work[i], pr)]
        pivots.append(c)
        r += 1
    return work[:r], pivots


def rank(M: Mat) -> int:
    """Exact rank by row reduction over ``M.domain``."""
    return len(row_reduce(M.tolist(), M.domain)[1])


def nullspace(M: Mat) -> list[list]:
    """Basis of ``{v : M v = 0}``; vectors are lists of elements of ``M.domain``."""
    K = M.domain
    reduced, pivots = row_reduce(M.tolist(), K)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [K.zero] * M.cols
        v[f] = K.one
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def rank_generic(M: Mat, samples: int = 3, rng: random.Random | int | None = None,
                 relations: Sequence = ()) -> int:
    """Generic rank from exact ranks at random rational points.

    The maximum over ``samples`` points equals the symbolic rank unless every
    point lands on a proper algebraic subset (Schwartz-Zippel).  Points hitting
    a vanishing denominator are redrawn, at most a bounded number of times.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if M.domain == QQ:
        return rank(M)
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    best = 0
    for _ in range(samples):
        for _attempt in range(_MAX_RESAMPLES):
            point = sample_point(M.domain, rng, relations)
            try:
                N = M.evaluate(point)
            except ScalarDivisionError:
                continue
            break
        else:
            raise SamplingError("sampled denominators kept vanishing")
        best = max(best, rank(N))
    return best


def inverse(M: Mat) -> Mat:
    """Exact inverse by Gauss-Jordan elimination; raises on singular input."""
    if M.rows != M.cols:
        raise ValueError("inverse of a non-square matrix")
    K, n = M.domain, M.rows
    aug = [M.row(i) + [K.one if i == j else K.zero for j in range(n)] for i in range(n)]
    reduced, pivots = row_reduce(aug, K)
    if pivots[:n] != list(range(n)) or len(reduced) < n:
        raise AlgebraError("matrix is singular")
    return Mat(n, n, tuple(v for r in reduced for v in r[n:]), K)
