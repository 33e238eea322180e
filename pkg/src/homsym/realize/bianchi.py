"""Explicit coordinate realizations of the nine Bianchi types on the chart (x, y, z).

Expressions are written as sympy strings and translated into :class:`Expr`
trees once.  Metric parameters are ``h11 ... h33``; ``q`` is the group
parameter of Types VI and VII and is bound as a fixed value.
"""
from __future__ import annotations

import random
from functools import lru_cache

import numpy as np
import sympy

from ..catalog import parse_type
from .expr import from_sympy
from .fields import ChartField, Realization

__all__ = ["realization", "sample_metric_params", "BOXES"]

CHART = ("x", "y", "z")
_LOCALS = {n: sympy.Symbol(n) for n in ("x", "y", "z", "q", "h11", "h12", "h13", "h22", "h23", "h33")}

_WIDE = ((-1.5, 1.5),) * 3
BOXES = {t: _WIDE for t in ("I", "II", "III", "IV", "V", "VI", "VII", "VIII")}
BOXES["IX"] = ((0.3, 2.8), (-3.0, 3.0), (-3.0, 3.0))  # keeps sin(x) away from 0


def _e(s: str):
    return from_sympy(sympy.sympify(s, locals=_LOCALS, rational=True), CHART)


def _fields(kind: str, rows, prefix: str):
    return tuple(ChartField(kind, tuple(_e(c) for c in comps), CHART, f"{prefix}{i + 1}")
                 for i, comps in enumerate(rows))


_DIAG = (("h11", "0", "0"), ("0", "h22", "0"), ("0", "0", "h33"))

# Realization tables: xi, X, sigma (rows = fields, columns = x, y, z components)
_DATA = {
    "I": dict(
        xi=[("1", "0", "0"), ("0", "1", "0"), ("0", "0", "1")],
        X=[("1", "0", "0"), ("0", "1", "0"), ("0", "0", "1")],
        sigma=[("1", "0", "0"), ("0", "1", "0"), ("0", "0", "1")],
        metric=_DIAG, params=("h11", "h22", "h33"),
        extra=[("0", "-z/h22", "y/h33"), ("-z/h11", "0", "x/h33"), ("-y/h11", "x/h22", "0")],
        table=[
            ("zeta1", "zeta2", {"zeta3": "1/h33"}),
            ("zeta2", "zeta3", {"zeta1": "1/h11"}),
            ("zeta3", "zeta1", {"zeta2": "1/h22"}),
            ("xi2", "zeta1", {"xi3": "1/h33"}),
            ("xi3", "zeta1", {"xi2": "-1/h22"}),
            ("xi1", "zeta2", {"xi3": "1/h33"}),
            ("xi3", "zeta2", {"xi1": "-1/h11"}),
            ("xi1", "zeta3", {"xi2": "1/h22"}),
            ("xi2", "zeta3", {"xi1": "-1/h11"}),
        ],
    ),
    "II": dict(
        xi=[("0", "1", "0"), ("0", "0", "1"), ("1", "z", "0")],
        X=[("0", "1", "0"), ("0", "x", "1"), ("1", "0", "0")],
        sigma=[("0", "1", "-x"), ("0", "0", "1"), ("1", "0", "0")],
        metric=(("h11", "0", "0"), ("0", "h22", "h23"), ("0", "h23", "h33")),
        params=("h11", "h22", "h23", "h33"),
        extra=[("(z*h22 + x*h23)/(h22*h33 - h23**2)",
                "(z**2*h22 - x**2*h33)/(2*(h22*h33 - h23**2))",
                "-(z*h23 + x*h33)/(h22*h33 - h23**2)")],
        table=[
            ("xi2", "xi3", {"xi1": "1"}),
            ("xi2", "zeta", {"xi2": "-h23/(h22*h33 - h23**2)", "xi3": "h22/(h22*h33 - h23**2)"}),
            ("xi3", "zeta", {"xi2": "-h33/(h22*h33 - h23**2)", "xi3": "h23/(h22*h33 - h23**2)"}),
        ],
    ),
    "III": dict(
        xi=[("0", "1", "0"), ("0", "0", "1"), ("1", "y", "0")],
        X=[("0", "exp(x)", "0"), ("0", "0", "1"), ("1", "0", "0")],
        sigma=[("0", "exp(-x)", "0"), ("0", "0", "1"), ("1", "0", "0")],
        metric=(("h11", "h12", "0"), ("h12", "h22", "0"), ("0", "0", "h33")),
        params=("h11", "h12", "h22", "h33"),
        extra=[("y/h33",
                "y**2/(2*h33) - exp(2*x)*h22/(2*(h11*h22 - h12**2))",
                "exp(x)*h12/(h11*h22 - h12**2)")],
        table=[
            ("xi1", "xi3", {"xi1": "1"}),
            ("xi1", "zeta", {"xi3": "1/h33"}),
            ("xi3", "zeta", {"zeta": "1"}),
        ],
    ),
    "IV": dict(
        xi=[("0", "1", "0"), ("0", "0", "1"), ("1", "y + z", "z")],
        X=[("0", "exp(x)", "0"), ("0", "x*exp(x)", "exp(x)"), ("1", "0", "0")],
        sigma=[("0", "exp(-x)", "-x*exp(-x)"), ("0", "0", "exp(-x)"), ("1", "0", "0")],
        metric=_DIAG, params=("h11", "h22", "h33"),
    ),
    "V": dict(
        xi=[("0", "1", "0"), ("0", "0", "1"), ("1", "y", "z")],
        X=[("0", "exp(x)", "0"), ("0", "0", "exp(x)"), ("1", "0", "0")],
        sigma=[("0", "exp(-x)", "0"), ("0", "0", "exp(-x)"), ("1", "0", "0")],
        metric=(("h11", "h12", "0"), ("h12", "h22", "0"), ("0", "0", "sqrt(h11*h22 - h12**2)")),
        params=("h11", "h12", "h22"),
    ),
    "VI": dict(
        xi=[("0", "1", "0"), ("0", "0", "1"), ("1", "y", "q*z")],
        X=[("0", "exp(x)", "0"), ("0", "0", "exp(q*x)"), ("1", "0", "0")],
        sigma=[("0", "exp(-x)", "0"), ("0", "0", "exp(-q*x)"), ("1", "0", "0")],
        metric=_DIAG, params=("h11", "h22", "h33"),
    ),
    "VII": dict(
        xi=[("0", "1", "0"), ("0", "0", "1"), ("1", "-z", "y + q*z")],
        X=[("0", "A1", "-B"), ("0", "B", "A2"), ("1", "0", "0")],
        sigma=[("0", "C1", "-D"), ("0", "D", "C2"), ("1", "0", "0")],
        metric=_DIAG, params=("h11", "h22", "h33"),
    ),
    "VIII": dict(
        xi=[("exp(-z)/2", "(exp(z) - y**2*exp(-z))/2", "-y*exp(-z)"),
            ("0", "0", "1"),
            ("exp(-z)/2", "-(exp(z) + y**2*exp(-z))/2", "-y*exp(-z)")],
        X=[("(1 + x**2)/2", "(1 - 2*x*y)/2", "-x"),
           ("-x", "y", "1"),
           ("(1 - x**2)/2", "(-1 + 2*x*y)/2", "x")],
        sigma=[("1", "1 + x**2", "x - y - x**2*y"),
               ("0", "2*x", "1 - 2*x*y"),
               ("1", "-1 + x**2", "x + y - x**2*y")],
        metric=_DIAG, params=("h11", "h22", "h33"),
    ),
    "IX": dict(
        xi=[("0", "1", "0"),
            ("cos(y)", "-cot(x)*sin(y)", "sin(y)/sin(x)"),
            ("-sin(y)", "-cot(x)*cos(y)", "cos(y)/sin(x)")],
        X=[("-sin(z)", "cos(z)/sin(x)", "-cot(x)*cos(z)"),
           ("cos(z)", "sin(z)/sin(x)", "-cot(x)*sin(z)"),
           ("0", "0", "1")],
        sigma=[("-sin(z)", "sin(x)*cos(z)", "0"),
               ("cos(z)", "sin(x)*sin(z)", "0"),
               ("0", "cos(x)", "1")],
        metric=_DIAG, params=("h11", "h22", "h33"),
    ),
}

# Type V: h = (h11 h22 - h12^2)^(3/2), so h^(1/3) = sqrt(det) and h^(2/3) = det.
_V_DET = "(h11*h22 - h12**2)"
_V_H = f"{_V_DET}**(3/2)"
_V_H13 = f"sqrt{_V_DET}"
_V_H23 = _V_DET
_DATA["V"]["extra"] = [
    (f"z/{_V_H13}",
     f"(y**2*h11*h12 + 2*y*z*h11*h22 + z**2*h12*h22)/(2*{_V_H}) + exp(2*x)*h12/(2*{_V_H23})",
     f"(-y**2*h11**2 - 2*y*z*h11*h12 + z**2*(h11*h22 - 2*h12**2))/(2*{_V_H}) - exp(2*x)*h11/(2*{_V_H23})"),
    (f"y/{_V_H13}",
     f"(-2*y**2*h12**2 + y**2*h11*h22 - 2*y*z*h12*h22 - z**2*h22**2)/(2*{_V_H}) - exp(2*x)*h22/(2*{_V_H23})",
     f"(y**2*h11*h12 + 2*y*z*h11*h22 + z**2*h12*h22)/(2*{_V_H}) + exp(2*x)*h12/(2*{_V_H23})"),
    ("0", f"-(y*h12 + z*h22)/{_V_H23}", f"(y*h11 + z*h12)/{_V_H23}"),
]
_DATA["V"]["table"] = [
    ("xi2", "xi3", {"xi2": "1"}),
    ("xi1", "xi3", {"xi1": "1"}),
    ("zeta2", "zeta3", {"zeta1": f"h22/{_V_H23}", "zeta2": f"h12/{_V_H23}"}),
    ("zeta3", "zeta1", {"zeta1": f"h12/{_V_H23}", "zeta2": f"h11/{_V_H23}"}),
    ("xi1", "zeta1", {"zeta3": f"-h11/{_V_H13}"}),
    ("xi2", "zeta1", {"xi3": f"1/{_V_H13}", "zeta3": f"-h12/{_V_H13}"}),
    ("xi3", "zeta1", {"zeta1": "1"}),
    ("xi1", "zeta2", {"zeta3": f"h12/{_V_H13}", "xi3": f"1/{_V_H13}"}),
    ("xi2", "zeta2", {"zeta3": f"h22/{_V_H13}"}),
    ("xi3", "zeta2", {"zeta2": "1"}),
    ("xi1", "zeta3", {"xi2": f"h11/{_V_H23}", "xi1": f"-h12/{_V_H23}"}),
    ("xi2", "zeta3", {"xi2": f"h12/{_V_H23}", "xi1": f"-h22/{_V_H23}"}),
]

# Type VII helper functions, k = q/2 and a = sqrt(4 - q^2)/2
_VII = {
    "B": "-exp(k*x)*sin(a*x)/a",
    "D": "-exp(-k*x)*sin(a*x)/a",
}
_VII["A1"] = f"exp(k*x)*cos(a*x) + k*({_VII['B']})"
_VII["A2"] = f"exp(k*x)*cos(a*x) - k*({_VII['B']})"
_VII["C1"] = f"exp(-k*x)*cos(a*x) - k*({_VII['D']})"
_VII["C2"] = f"exp(-k*x)*cos(a*x) + k*({_VII['D']})"


def _vii_expand(s: str) -> str:
    for name in ("A1", "A2", "C1", "C2", "B", "D"):
        s = s.replace(name, f"({_VII[name]})")
    return s.replace("k", "(q/2)").replace("a*x", "(sqrt(4 - q**2)/2)*x").replace("/a", "/(sqrt(4 - q**2)/2)")


@lru_cache(maxsize=None)
def _build(t: str) -> Realization:
    d = _DATA[t]
    xi, X, sigma = d["xi"], d["X"], d["sigma"]
    if t == "VII":
        X = [tuple(_vii_expand(c) for c in row) for row in X]
        sigma = [tuple(_vii_expand(c) for c in row) for row in sigma]
    extra = d.get("extra", [])
    table = tuple((l, r, {k: _e(v) for k, v in rhs.items()}) for l, r, rhs in d.get("table", []))
    return Realization(
        type=t,
        xi=_fields("vector", xi, "xi"),
        X=_fields("vector", X, "X"),
        sigma=_fields("form", sigma, "sigma"),
        box=BOXES[t],
        metric=tuple(tuple(_e(c) for c in row) for row in d["metric"]),
        extra=_fields("vector", extra, "zeta") if extra else (),
        table=table,
        singular="sin(x) = 0" if t == "IX" else "",
        parameters=tuple(d["params"]),
    )


def realization(type: str, q=None) -> Realization:
    """Realization of a Bianchi type; ``q`` is bound for Types VI and VII."""
    t = parse_type(type)
    R = _build(t)
    if t in ("VI", "VII"):
        if q is None:
            raise ValueError(f"type {t} needs q")
        return Realization(**{**R.__dict__, "fixed": {"q": float(q)}})
    return R


def sample_metric_params(R: Realization, rng: random.Random) -> dict:
    """Random parameter values making the realization's metric positive definite."""
    for _ in range(1000):
        vals = {}
        for p in R.parameters:
            vals[p] = rng.uniform(0.6, 2.5) if p[1] == p[2] else rng.uniform(-0.5, 0.5)
        env = {**R.fixed, **vals}
        try:
            H = R.metric_values(env)
            np.linalg.cholesky(H)
        except (np.linalg.LinAlgError, ArithmeticError, ValueError):
            continue
        return env
    raise RuntimeError("could not sample a positive-definite metric")  # pragma: no cover
