"""Small expression trees with forward-mode differentiation.

Encoding as JSON s-expressions:

* a number, or a string holding a rational such as ``"-1/2"``;
* ``["coord", name]`` and ``["param", name]``;
* ``["+", a, b]``, ``["-", a, b]``, ``["-", a]``, ``["*", a, b]``, ``["/", a, b]``;
* ``["exp", a]``, ``["sin", a]``, ``["cos", a]``;
* ``["pow", a, p]`` with a constant exponent ``p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import sympy

__all__ = [
    "Expr",
    "Dual",
    "const",
    "coord",
    "param",
    "exp",
    "sin",
    "cos",
    "from_sympy",
    "parse_sexpr",
    "dump_sexpr",
    "SingularPointError",
]


class SingularPointError(ArithmeticError):
    """Evaluation hit a pole or left the domain of a primitive."""


class Dual:
    """Value with a tuple of first derivatives.

    ``level`` separates nested perturbations: a ``Dual`` of higher level may
    carry lower-level ``Dual`` entries, and mixing levels treats the lower
    one as a constant of the higher.
    """

    __slots__ = ("v", "d", "level")

    def __init__(self, v, d: Sequence, level: int = 1):
        self.v = v
        self.d = tuple(d)
        self.level = level

    def _lift(self, x):
        if isinstance(x, Dual) and x.level == self.level:
            return x
        return Dual(x, (0.0,) * len(self.d), self.level)

    def _outranked(self, o) -> bool:
        return isinstance(o, Dual) and o.level > self.level

    def __add__(self, o):
        if self._outranked(o):
            return o._lift(self) + o
        o = self._lift(o)
        return Dual(self.v + o.v, [a + b for a, b in zip(self.d, o.d)], self.level)

    def __radd__(self, o):
        return self._lift(o) + self

    def __neg__(self):
        return Dual(-self.v, [-a for a in self.d], self.level)

    def __sub__(self, o):
        if self._outranked(o):
            return o._lift(self) - o
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        if self._outranked(o):
            return o._lift(self) * o
        o = self._lift(o)
        return Dual(self.v * o.v, [a * o.v + self.v * b for a, b in zip(self.d, o.d)], self.level)

    def __rmul__(self, o):
        return self._lift(o) * self

    def __truediv__(self, o):
        if self._outranked(o):
            return o._lift(self) / o
        o = self._lift(o)
        if _is_zero(o.v):
            raise SingularPointError("division by zero")
        inv = 1.0 / o.v
        val = self.v * inv
        return Dual(val, [(a - val * b) * inv for a, b in zip(self.d, o.d)], self.level)

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __repr__(self):
        return f"Dual({self.v!r}, {self.d!r}, level={self.level})"


def _is_zero(x) -> bool:
    while isinstance(x, Dual):
        x = x.v
    return x == 0


def _base(x) -> float:
    while isinstance(x, Dual):
        x = x.v
    return x


def _exp(x):
    if isinstance(x, Dual):
        e = _exp(x.v)
        return Dual(e, [e * a for a in x.d], x.level)
    return math.exp(x)


def _sin(x):
    if isinstance(x, Dual):
        c = _cos(x.v)
        return Dual(_sin(x.v), [c * a for a in x.d], x.level)
    return math.sin(x)


def _cos(x):
    if isinstance(x, Dual):
        s = _sin(x.v)
        return Dual(_cos(x.v), [-s * a for a in x.d], x.level)
    return math.cos(x)


def _pow(x, p: float):
    if isinstance(x, Dual):
        if p != int(p) and _base(x) <= 0:
            raise SingularPointError("non-integer power of a non-positive base")
        if p - 1 < 0 and _is_zero(x.v):
            raise SingularPointError("negative power of zero")
        f = p * _pow(x.v, p - 1)
        return Dual(_pow(x.v, p), [f * a for a in x.d], x.level)
    if p == int(p):
        if p < 0 and x == 0:
            raise SingularPointError("negative power of zero")
        return float(x) ** int(p)
    if x <= 0:
        raise SingularPointError("non-integer power of a non-positive base")
    return x ** p


@dataclass(frozen=True)
class Expr:
    op: str
    args: tuple

    # construction sugar
    def __add__(self, o):
        return Expr("+", (self, _wrap(o)))

    def __radd__(self, o):
        return Expr("+", (_wrap(o), self))

    def __sub__(self, o):
        return Expr("-", (self, _wrap(o)))

    def __rsub__(self, o):
        return Expr("-", (_wrap(o), self))

    def __neg__(self):
        return Expr("neg", (self,))

    def __mul__(self, o):
        return Expr("*", (self, _wrap(o)))

    def __rmul__(self, o):
        return Expr("*", (_wrap(o), self))

    def __truediv__(self, o):
        return Expr("/", (self, _wrap(o)))

    def __rtruediv__(self, o):
        return Expr("/", (_wrap(o), self))

    def __pow__(self, p):
        return Expr("pow", (self, Fraction(p) if not isinstance(p, float) else p))

    def evaluate(self, coords: Mapping[str, object], params: Mapping[str, float] = {}):
        """Value at a point; coordinate values may be :class:`Dual` numbers."""
        op, a = self.op, self.args
        if op == "const":
            return float(a[0])
        if op == "coord":
            return coords[a[0]]
        if op == "param":
            try:
                return float(params[a[0]])
            except KeyError:
                raise KeyError(f"parameter {a[0]!r} is not bound") from None
        if op == "pow":
            return _pow(a[0].evaluate(coords, params), float(a[1]))
        vals = [x.evaluate(coords, params) for x in a]
        if op == "+":
            return vals[0] + vals[1]
        if op == "-":
            return vals[0] - vals[1]
        if op == "neg":
            return -vals[0]
        if op == "*":
            return vals[0] * vals[1]
        if op == "/":
            if not isinstance(vals[1], Dual) and vals[1] == 0:
                raise SingularPointError("division by zero")
            return vals[0] / vals[1]
        if op == "exp":
            return _exp(vals[0])
        if op == "sin":
            return _sin(vals[0])
        if op == "cos":
            return _cos(vals[0])
        raise ValueError(f"unknown operation {op!r}")

    def gradient(self, coords: Sequence[str], point: Sequence[float], params=None):
        """``(value, (d/dx_1, ..., d/dx_n))`` at ``point``."""
        n = len(coords)
        env = {c: Dual(float(p), [1.0 if i == j else 0.0 for j in range(n)])
               for i, (c, p) in enumerate(zip(coords, point))}
        out = self.evaluate(env, params or {})
        if not isinstance(out, Dual):
            return out, (0.0,) * n
        return out.v, out.d

    def to_sexpr(self):
        return dump_sexpr(self)


def _wrap(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return const(x)


def const(v) -> Expr:
    return Expr("const", (Fraction(v) if not isinstance(v, float) else v,))


def coord(name: str) -> Expr:
    return Expr("coord", (name,))


def param(name: str) -> Expr:
    return Expr("param", (name,))


def exp(x) -> Expr:
    return Expr("exp", (_wrap(x),))


def sin(x) -> Expr:
    return Expr("sin", (_wrap(x),))


def cos(x) -> Expr:
    return Expr("cos", (_wrap(x),))


def from_sympy(e, coords: Sequence[str]) -> Expr:
    """Translate a sympy expression; symbols in ``coords`` become coordinates."""
    e = sympy.sympify(e)
    if e.is_Rational:
        return const(Fraction(int(e.p), int(e.q)))
    if e.is_Number:
        return const(float(e))
    if e.is_Symbol:
        name = str(e)
        return coord(name) if name in coords else param(name)
    if e.is_Add:
        terms = [from_sympy(t, coords) for t in e.args]
        out = terms[0]
        for t in terms[1:]:
            out = out + t
        return out
    if e.is_Mul:
        num, den = sympy.fraction(e)
        if den != 1:
            return from_sympy(num, coords) / from_sympy(den, coords)
        factors = [from_sympy(t, coords) for t in e.args]
        out = factors[0]
        for f in factors[1:]:
            out = out * f
        return out
    if e.is_Pow:
        base, ex = e.args
        if ex.is_Integer and ex < 0:
            return const(1) / from_sympy(base ** (-ex), coords)
        if not ex.is_Number:
            raise ValueError(f"non-constant exponent in {e}")
        return from_sympy(base, coords) ** (Fraction(int(ex.p), int(ex.q)) if ex.is_Rational else float(ex))
    if isinstance(e, sympy.exp):
        return exp(from_sympy(e.args[0], coords))
    if isinstance(e, sympy.sin):
        return sin(from_sympy(e.args[0], coords))
    if isinstance(e, sympy.cos):
        return cos(from_sympy(e.args[0], coords))
    if isinstance(e, sympy.cot):
        a = from_sympy(e.args[0], coords)
        return cos(a) / sin(a)
    if isinstance(e, sympy.tan):
        a = from_sympy(e.args[0], coords)
        return sin(a) / cos(a)
    raise ValueError(f"unsupported expression {e}")


def _num_json(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


def dump_sexpr(e: Expr):
    op, a = e.op, e.args
    if op == "const":
        return _num_json(a[0])
    if op in ("coord", "param"):
        return [op, a[0]]
    if op == "neg":
        return ["-", dump_sexpr(a[0])]
    if op == "pow":
        return ["pow", dump_sexpr(a[0]), _num_json(a[1])]
    return [op] + [dump_sexpr(x) for x in a]


def _parse_number(v):
    if isinstance(v, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        return Fraction(v)
    raise ValueError(f"bad number {v!r}")


def parse_sexpr(s) -> Expr:
    if not isinstance(s, list):
        return const(_parse_number(s))
    if not s:
        raise ValueError("empty s-expression")
    head, rest = s[0], s[1:]
    if head in ("coord", "param"):
        if len(rest) != 1 or not isinstance(rest[0], str):
            raise ValueError(f"malformed {head} node")
        return Expr(head, (rest[0],))
    if head == "pow":
        return Expr("pow", (parse_sexpr(rest[0]), _parse_number(rest[1])))
    if head == "-" and len(rest) == 1:
        return Expr("neg", (parse_sexpr(rest[0]),))
    arity = {"+": 2, "-": 2, "*": 2, "/": 2, "exp": 1, "sin": 1, "cos": 1}
    if head not in arity or len(rest) != arity[head]:
        raise ValueError(f"malformed node {head!r}")
    return Expr(head, tuple(parse_sexpr(x) for x in rest))
