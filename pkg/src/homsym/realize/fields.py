"""Vector fields and one-forms on a coordinate chart, with the residual checks
that tie a coordinate realization to its structure constants."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .expr import Dual, Expr, SingularPointError, dump_sexpr, parse_sexpr

__all__ = [
    "ChartField",
    "Realization",
    "field_values",
    "lie_bracket_eval",
    "contract",
    "lie_derivative_form",
    "metric_at",
    "killing_residual",
    "check_structure",
    "enlarged_algebra_check",
    "pfaffian_consistency",
    "sample_points",
]


@dataclass(frozen=True)
class ChartField:
    """``kind`` is ``"vector"`` (components ``V^a``) or ``"form"`` (components ``w_a``)."""

    kind: str
    components: tuple[Expr, ...]
    chart: tuple[str, ...] = ("x", "y", "z")
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("vector", "form"):
            raise ValueError("kind must be 'vector' or 'form'")
        if len(self.components) != len(self.chart):
            raise ValueError("component count must equal chart dimension")

    def to_json(self) -> dict:
        return {"kind": self.kind, "label": self.label, "chart": list(self.chart),
                "components": [dump_sexpr(c) for c in self.components]}

    @classmethod
    def from_json(cls, d: dict) -> "ChartField":
        return cls(d["kind"], tuple(parse_sexpr(c) for c in d["components"]),
                   tuple(d.get("chart", ("x", "y", "z"))), d.get("label", ""))


def field_values(F: ChartField, p: Sequence[float], params: Mapping) -> tuple[np.ndarray, np.ndarray]:
    """Components and Jacobian ``J[i, j] = d_j F_i`` at ``p``."""
    vals, jac = [], []
    for c in F.components:
        v, g = c.gradient(F.chart, p, params)
        vals.append(v)
        jac.append(g)
    return np.array(vals, dtype=float), np.array(jac, dtype=float)


def lie_bracket_eval(V: ChartField, W: ChartField, p, params: Mapping = {}) -> np.ndarray:
    """``[V, W]^a = V^b d_b W^a - W^b d_b V^a``."""
    v, Jv = field_values(V, p, params)
    w, Jw = field_values(W, p, params)
    return Jw @ v - Jv @ w


def contract(V: ChartField, w: ChartField, p, params: Mapping = {}) -> float:
    v, _ = field_values(V, p, params)
    f, _ = field_values(w, p, params)
    return float(v @ f)


def lie_derivative_form(V: ChartField, w: ChartField, p, params: Mapping = {}) -> np.ndarray:
    """``(Lie_V w)_b = V^c d_c w_b + w_c d_b V^c``."""
    v, Jv = field_values(V, p, params)
    f, Jf = field_values(w, p, params)
    return Jf @ v + Jv.T @ f


def metric_at(sigma: Sequence[ChartField], h: np.ndarray, p, params: Mapping = {}):
    """``g_ab = h_AB sigma^A_a sigma^B_b`` and ``dg[c, a, b] = d_c g_ab``."""
    S, dS = [], []
    for s in sigma:
        v, J = field_values(s, p, params)
        S.append(v)
        dS.append(J)
    S, dS = np.array(S), np.array(dS)  # S[A, a], dS[A, a, c]
    g = np.einsum("AB,Aa,Bb->ab", h, S, S)
    dg = np.einsum("AB,Aac,Bb->cab", h, dS, S) + np.einsum("AB,Aa,Bbc->cab", h, S, dS)
    return g, dg


def killing_residual(sigma: Sequence[ChartField], h: np.ndarray, Z: ChartField, p,
                     params: Mapping = {}) -> float:
    """Max-norm of ``(Lie_Z g)_ab = Z^c d_c g_ab + g_cb d_a Z^c + g_ac d_b Z^c``."""
    g, dg = metric_at(sigma, h, p, params)
    z, Jz = field_values(Z, p, params)  # Jz[c, a] = d_a Z^c
    L = np.einsum("c,cab->ab", z, dg) + np.einsum("cb,ca->ab", g, Jz) + np.einsum("ac,cb->ab", g, Jz)
    return float(np.max(np.abs(L)))


@dataclass(frozen=True)
class Realization:
    """Coordinate data of one Bianchi type.

    ``xi`` are the homogeneity Killing fields, ``X`` the reciprocal frame,
    ``sigma`` its dual coframe, ``extra`` the additional Killing fields (their
    components may depend on metric parameters), and ``table`` lists the
    nonvanishing commutators of the enlarged algebra as
    ``(left, right, {label: coefficient})``.
    """

    type: str
    xi: tuple[ChartField, ...]
    X: tuple[ChartField, ...]
    sigma: tuple[ChartField, ...]
    box: tuple[tuple[float, float], ...]
    metric: tuple[tuple[Expr, ...], ...]  # h_AB as expressions in parameters
    extra: tuple[ChartField, ...] = ()
    table: tuple = ()
    singular: str = ""
    parameters: tuple[str, ...] = ()  # free metric parameters to sample
    constraint: str = ""  # sampler hint
    fixed: Mapping = field(default_factory=dict)

    def fields(self) -> dict:
        out = {f"xi{i + 1}": f for i, f in enumerate(self.xi)}
        if len(self.extra) == 1:
            out["zeta"] = self.extra[0]
        else:
            out.update({f"zeta{i + 1}": f for i, f in enumerate(self.extra)})
        return out

    def metric_values(self, params: Mapping) -> np.ndarray:
        return np.array([[e.evaluate({}, params) for e in row] for row in self.metric])

    def to_json(self) -> dict:
        return {
            "type": self.type,
            "chart": list(self.xi[0].chart),
            "box": [list(b) for b in self.box],
            "singular": self.singular,
            "xi": [f.to_json() for f in self.xi],
            "X": [f.to_json() for f in self.X],
            "sigma": [f.to_json() for f in self.sigma],
            "extra": [f.to_json() for f in self.extra],
            "metric": [[dump_sexpr(e) for e in row] for row in self.metric],
            "table": [[l, r, {k: dump_sexpr(v) for k, v in rhs.items()}] for l, r, rhs in self.table],
            "parameters": list(self.parameters),
            "fixed": {k: v for k, v in self.fixed.items()},
        }

    @classmethod
    def from_json(cls, d: dict) -> "Realization":
        fl = lambda key: tuple(ChartField.from_json(x) for x in d.get(key, []))
        return cls(
            d["type"], fl("xi"), fl("X"), fl("sigma"),
            tuple(tuple(b) for b in d["box"]),
            tuple(tuple(parse_sexpr(e) for e in row) for row in d["metric"]),
            fl("extra"),
            tuple((l, r, {k: parse_sexpr(v) for k, v in rhs.items()}) for l, r, rhs in d.get("table", [])),
            d.get("singular", ""), tuple(d.get("parameters", [])), "", dict(d.get("fixed", {})),
        )


def sample_points(R: Realization, count: int, rng: random.Random) -> list[tuple[float, ...]]:
    return [tuple(rng.uniform(lo, hi) for lo, hi in R.box) for _ in range(count)]


def _max(vals) -> float:
    vals = list(vals)
    return float(max(vals)) if vals else 0.0


def _combo(fields: Mapping[str, ChartField], coeffs: Mapping[str, Expr], p, params) -> np.ndarray:
    out = np.zeros(3)
    for lab, c in coeffs.items():
        v, _ = field_values(fields[lab], p, params)
        out = out + c.evaluate({}, params) * v
    return out


def check_structure(R: Realization, C: np.ndarray, points, params: Mapping = {}) -> dict:
    """Max residual per category over ``points``.

    ``[xi_A, xi_B] = C^M_{AB} xi_M``, ``[X_A, X_B] = -C^M_{AB} X_M``,
    ``[xi_A, X_B] = 0``, ``X_A . sigma^B = delta``, ``Lie_{xi_A} sigma^B = 0``.
    """
    n = len(R.xi)
    out = {"xi_brackets": 0.0, "X_brackets": 0.0, "mixed_brackets": 0.0,
           "duality": 0.0, "xi_drag_sigma": 0.0}
    for p in points:
        xiv = [field_values(f, p, params)[0] for f in R.xi]
        Xv = [field_values(f, p, params)[0] for f in R.X]
        for a in range(n):
            for b in range(n):
                if a < b:
                    rhs = sum(C[m, a, b] * xiv[m] for m in range(n))
                    out["xi_brackets"] = max(out["xi_brackets"], _max(np.abs(
                        lie_bracket_eval(R.xi[a], R.xi[b], p, params) - rhs)))
                    rhs = -sum(C[m, a, b] * Xv[m] for m in range(n))
                    out["X_brackets"] = max(out["X_brackets"], _max(np.abs(
                        lie_bracket_eval(R.X[a], R.X[b], p, params) - rhs)))
                out["mixed_brackets"] = max(out["mixed_brackets"], _max(np.abs(
                    lie_bracket_eval(R.xi[a], R.X[b], p, params))))
                out["duality"] = max(out["duality"], abs(
                    contract(R.X[a], R.sigma[b], p, params) - (1.0 if a == b else 0.0)))
                out["xi_drag_sigma"] = max(out["xi_drag_sigma"], _max(np.abs(
                    lie_derivative_form(R.xi[a], R.sigma[b], p, params))))
    return out


def enlarged_algebra_check(R: Realization, params: Mapping, points) -> dict:
    """Residual of every listed commutator; unlisted pairs must commute.

    Returns ``{"listed": max residual, "unlisted": max residual, "pairs": {label: value}}``.
    """
    fields = R.fields()
    labels = list(fields)
    listed = {(l, r): rhs for l, r, rhs in R.table}
    pairs = {}
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            if (a, b) in listed:
                key, rhs, sign = (a, b), listed[(a, b)], 1.0
            elif (b, a) in listed:
                key, rhs, sign = (b, a), listed[(b, a)], -1.0
            else:
                key, rhs, sign = (a, b), {}, 1.0
            worst = 0.0
            for p in points:
                lhs = sign * lie_bracket_eval(fields[a], fields[b], p, params)
                worst = max(worst, _max(np.abs(lhs - _combo(fields, rhs, p, params))))
            pairs[f"[{key[0]},{key[1]}]"] = worst
    lis = [v for k, v in pairs.items() if tuple(k[1:-1].split(",")) in listed]
    unl = [v for k, v in pairs.items() if tuple(k[1:-1].split(",")) not in listed]
    return {"listed": _max(lis), "unlisted": _max(unl), "pairs": pairs}


def _frame_data(R: Realization, Z: ChartField, h: np.ndarray, coords, params):
    """``u = (zeta^A, F_AB for A < B)`` at a point whose coordinates may be Dual."""
    n = len(R.sigma)
    chart = Z.chart
    env = {c: v for c, v in zip(chart, coords)}

    def comps(F):
        return [e.evaluate(env, params) for e in F.components]

    z = comps(Z)
    sig = [comps(s) for s in R.sigma]
    X = [comps(x) for x in R.X]
    zeta = [sum(sig[A][a] * z[a] for a in range(n)) for A in range(n)]
    # (Lie_Z sigma^A)_b = Z^c d_c sigma^A_b + sigma^A_c d_b Z^c ; needs first derivatives
    L = []
    for A in range(n):
        row = []
        for b in range(n):
            val = 0.0
            for c in range(n):
                val = val + z[c] * _d(sig[A][b], c) + sig[A][c] * _d(z[c], b)
            row.append(val)
        L.append(row)
    Psi = [[sum(L[A][b] * X[B][b] for b in range(n)) for B in range(n)] for A in range(n)]
    Fm = [[sum(h[A, K] * Psi[K][B] for K in range(n)) for B in range(n)] for A in range(n)]
    u = list(zeta) + [Fm[a][b] for a in range(n) for b in range(a + 1, n)]
    return u, Fm


def _d(x, c):
    return x.d[c] if isinstance(x, Dual) and x.level == 2 else 0.0


def _val(x):
    while isinstance(x, Dual):
        x = x.v
    return float(x)


def pfaffian_consistency(R: Realization, Z: ChartField, h: np.ndarray, M: Sequence[np.ndarray],
                         p, params: Mapping = {}) -> dict:
    """Compare ``X_N u`` computed from coordinates with ``M_N u``.

    Second derivatives of ``Z`` are needed for ``F``; they come from nesting
    a directional dual number inside the coordinate-gradient dual numbers.
    Returns the residual and the maximum of ``|F + F^T|``.
    """
    n = len(R.sigma)
    Xp = [field_values(x, p, params)[0] for x in R.X]
    worst = 0.0
    u0 = None
    asym = 0.0
    for N in range(n):
        coords = []
        for i in range(n):
            outer = Dual(float(p[i]), [float(Xp[N][i])], level=1)
            coords.append(Dual(outer, [1.0 if i == j else 0.0 for j in range(n)], level=2))
        u, Fm = _frame_data(R, Z, h, coords, params)
        vals = np.array([_val(x) for x in u])
        der = np.array([_outer_d(x) for x in u])
        if u0 is None:
            u0 = vals
            asym = max(abs(_val(Fm[a][b]) + _val(Fm[b][a])) for a in range(n) for b in range(n))
        worst = max(worst, float(np.max(np.abs(der - np.asarray(M[N], dtype=float) @ vals))))
    return {"residual": worst, "antisymmetry": asym, "u": u0.tolist()}


def _outer_d(x) -> float:
    # x is a level-2 Dual (or lower) whose value carries the level-1 direction
    v = x.v if isinstance(x, Dual) and x.level == 2 else x
    if isinstance(v, Dual):
        return float(_val(v.d[0]))
    return 0.0


def safe(f, *args, **kwargs):
    """Call ``f`` and map singular evaluations to ``nan``."""
    try:
        return f(*args, **kwargs)
    except SingularPointError:
        return math.nan
