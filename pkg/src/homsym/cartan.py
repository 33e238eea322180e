"""Rigid-frame Riemannian data of a left-invariant metric.

Conventions, all in the invariant coframe ``sigma^A``:

* ``d sigma^A = 1/2 C^A_{MN} sigma^M ^ sigma^N``,
* ``d sigma^A = -Gamma^A_B ^ sigma^B`` with ``Gamma^A_B = gamma^A_{BM} sigma^M``,
  so torsion-freeness reads ``gamma^A_{[BM]} = 1/2 C^A_{BM}``,
* metricity for constant ``h``: ``h_{AS} gamma^S_{BM} + h_{SB} gamma^S_{AM} = 0``,
* ``Omega^A_B = d Gamma^A_B + Gamma^A_M ^ Gamma^M_B = 1/2 R^A_{BMN} sigma^M ^ sigma^N``,
  which for constant ``gamma`` gives
  ``R^A_{BMN} = gamma^A_{BS} C^S_{MN} + gamma^A_{SM} gamma^S_{BN} - gamma^A_{SN} gamma^S_{BM}``,
* Ricci contraction on the first and third slots, ``Ric_{BN} = R^A_{BAN}``.

With these signs the round 3-sphere has positive scalar curvature.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from sympy.polys.domains.domain import Domain

from .exact import (
    QQ,
    AlgebraError,
    Mat,
    convert,
    evaluate,
    field_variables,
    format_scalar,
    inverse,
    join_fields,
    nullspace,
    row_reduce,
    scalar_field,
    to_scalar,
    _sympify,
)
from .lie import StructureConstants

__all__ = [
    "FrameMetric",
    "ConnectionCoefficients",
    "CurvatureTensor",
    "IdentityReport",
    "connection_coefficients",
    "connection_by_linear_solve",
    "curvature",
    "identity_suite",
    "curvature_class",
    "curvature_report",
    "common_field",
]


def _obj(shape, K: Domain) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(K.zero)
    return arr


def _convert_array(arr: np.ndarray, src: Domain, dst: Domain) -> np.ndarray:
    if src == dst:
        return arr
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = convert(v, src, dst)
    return out


@dataclass(frozen=True, eq=False)
class FrameMetric:
    """Constant symmetric frame metric ``h_AB``.

    ``side_relations`` are polynomials in the parameters that must vanish on
    the metrics this object stands for (e.g. ``h33**2 - (h11*h22 - h12**2)``).
    """

    array: np.ndarray
    domain: Domain
    side_relations: tuple = field(default=())

    def __post_init__(self):
        n = self.array.shape[0]
        if self.array.shape != (n, n):
            raise ValueError("frame metric must be square")
        for a in range(n):
            for b in range(a + 1, n):
                if self.array[a, b] != self.array[b, a]:
                    raise AlgebraError("frame metric is not symmetric")
        self.array.flags.writeable = False

    @classmethod
    def from_rows(cls, rows, domain: Domain | None = None, side_relations=()) -> "FrameMetric":
        if domain is None:
            names: set[str] = set()
            for r in rows:
                for v in r:
                    if isinstance(v, str) or hasattr(v, "free_symbols"):
                        names.update(str(s) for s in _sympify(v).free_symbols)
            for rel in side_relations:
                names.update(str(s) for s in _sympify(rel).free_symbols)
            domain = scalar_field(names)
        n = len(rows)
        arr = np.empty((n, n), dtype=object)
        for a in range(n):
            for b in range(n):
                arr[a, b] = to_scalar(rows[a][b], domain)
        rels = tuple(to_scalar(r, domain) for r in side_relations)
        return cls(arr, domain, rels)

    @classmethod
    def generic(cls, n: int) -> "FrameMetric":
        """Fully symbolic symmetric metric with entries ``h11, h12, ...``."""
        rows = [[f"h{min(a, b) + 1}{max(a, b) + 1}" for b in range(n)] for a in range(n)]
        return cls.from_rows(rows)

    @property
    def n(self) -> int:
        return self.array.shape[0]

    @property
    def parameters(self) -> tuple[str, ...]:
        """Variables actually occurring in the entries."""
        K = self.domain
        names = set()
        for v in self.array.flat:
            names.update(str(s) for s in K.to_sympy(v).free_symbols)
        return tuple(sorted(names))

    def mat(self) -> Mat:
        return Mat(self.n, self.n, tuple(self.array.flat), self.domain)

    @cached_property
    def inverse(self) -> np.ndarray:
        try:
            inv = inverse(self.mat())
        except AlgebraError as exc:
            raise AlgebraError("frame metric is singular") from exc
        arr = np.array(inv.tolist(), dtype=object)
        arr.flags.writeable = False
        return arr

    def over(self, K: Domain) -> "FrameMetric":
        if K == self.domain:
            return self
        return FrameMetric(_convert_array(self.array, self.domain, K), K,
                           tuple(convert(r, self.domain, K) for r in self.side_relations))

    def scaled(self, c) -> "FrameMetric":
        c = to_scalar(c, self.domain)
        return FrameMetric(self.array * c, self.domain, self.side_relations)

    def evaluate(self, point) -> "FrameMetric":
        """Rational metric at a parameter point (side relations are checked)."""
        for rel in self.side_relations:
            if evaluate(rel, self.domain, point):
                raise AlgebraError("point violates a side relation")
        arr = np.empty(self.array.shape, dtype=object)
        for idx, v in np.ndenumerate(self.array):
            arr[idx] = evaluate(v, self.domain, point)
        return FrameMetric(arr, QQ)

    def numeric(self) -> np.ndarray:
        if self.domain != QQ:
            raise AlgebraError("numeric() needs a rational metric")
        return np.array([[float(v) for v in row] for row in self.array])

    def is_positive_definite(self) -> bool:
        """Sylvester's criterion with exact leading minors; rational metrics only."""
        if self.domain != QQ:
            raise AlgebraError("definiteness is only decided for rational metrics")
        for k in range(1, self.n + 1):
            sub = Mat(k, k, tuple(self.array[:k, :k].flat), QQ)
            reduced = [r[:] for r in sub.tolist()]
            det = QQ.one
            for c in range(k):
                p = reduced[c][c]
                if not p or p < 0:
                    # leading pivot of the symmetric elimination
                    return False
                det *= p
                for r in range(c + 1, k):
                    f = reduced[r][c] / p
                    reduced[r] = [x - f * y for x, y in zip(reduced[r], reduced[c])]
        return True

    def tolist(self, as_str: bool = True):
        K = self.domain
        return [[format_scalar(v, K) if as_str else v for v in row] for row in self.array]


def common_field(*objs) -> Domain:
    return join_fields(*(o.domain for o in objs))


@dataclass(frozen=True, eq=False)
class ConnectionCoefficients:
    """Ricci rotation coefficients ``gamma^A_{BM}`` (0-based ``array[a, b, m]``)."""

    array: np.ndarray
    metric: FrameMetric
    constants: StructureConstants

    @property
    def domain(self) -> Domain:
        return self.metric.domain

    def lowered(self) -> np.ndarray:
        return np.einsum("as,sbm->abm", self.metric.array, self.array)


def connection_coefficients(C: StructureConstants, h: FrameMetric) -> ConnectionCoefficients:
    """Unique metric, torsion-free connection of a rigid frame (Koszul formula).

    With ``C_{ABM} = h_{AS} C^S_{BM}``, the lowered coefficients are
    ``gamma_{ABM} = 1/2 (C_{ABM} + C_{BMA} - C_{MAB})``.
    """
    if C.n != h.n:
        raise ValueError("dimension mismatch between constants and metric")
    K = common_field(C, h)
    C, h = C.over(K), h.over(K)
    Cl = np.einsum("as,sbm->abm", h.array, C.array)
    half = K.one / 2
    low = (Cl + Cl.transpose(2, 0, 1) - Cl.transpose(1, 2, 0)) * half
    # low[a,b,m] = 1/2 (Cl[a,b,m] + Cl[b,m,a] - Cl[m,a,b])
    gamma = np.einsum("as,sbm->abm", h.inverse, low)
    gamma.flags.writeable = False
    return ConnectionCoefficients(gamma, h, C)


def connection_by_linear_solve(C: StructureConstants, h: FrameMetric) -> ConnectionCoefficients:
    """Reference solver: stack metricity and torsion equations in the ``n^3`` unknowns.

    Raises if the homogeneous system has a nontrivial kernel (non-unique solution).
    """
    K = common_field(C, h)
    C, h = C.over(K), h.over(K)
    n = C.n

    def col(a, b, m):
        return (a * n + b) * n + m

    rows = []
    for a in range(n):
        for b in range(a, n):
            for m in range(n):
                row = [K.zero] * (n ** 3 + 1)
                for s in range(n):
                    row[col(s, b, m)] += h.array[a, s]
                    row[col(s, a, m)] += h.array[s, b]
                rows.append(row)
    for a in range(n):
        for b in range(n):
            for m in range(b + 1, n):
                row = [K.zero] * (n ** 3 + 1)
                row[col(a, b, m)] += K.one
                row[col(a, m, b)] -= K.one
                row[-1] = C.array[a, b, m]
                rows.append(row)
    homogeneous = Mat(len(rows), n ** 3, tuple(v for r in rows for v in r[:-1]), K)
    if nullspace(homogeneous):
        raise AlgebraError("connection is not unique")
    reduced, pivots = row_reduce(rows, K)
    if n ** 3 in pivots:
        raise AlgebraError("connection equations are inconsistent")
    gamma = _obj((n, n, n), K)
    for r, p in zip(reduced, pivots):
        a, rem = divmod(p, n * n)
        b, m = divmod(rem, n)
        gamma[a, b, m] = r[-1]
    gamma.flags.writeable = False
    return ConnectionCoefficients(gamma, h, C)


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """Frame components ``R^A_{BMN}`` with Ricci tensor and scalar curvature."""

    array: np.ndarray
    metric: FrameMetric

    @property
    def domain(self) -> Domain:
        return self.metric.domain

    @cached_property
    def ricci(self) -> np.ndarray:
        return np.einsum("abac->bc", self.array)

    @cached_property
    def scalar(self):
        return np.einsum("bc,bc->", self.metric.inverse, self.ricci)

    def lowered(self) -> np.ndarray:
        return np.einsum("as,sbmn->abmn", self.metric.array, self.array)


def curvature(gamma: ConnectionCoefficients, C: StructureConstants | None = None) -> CurvatureTensor:
    """Curvature from the second structure equation for constant ``gamma``."""
    C = gamma.constants if C is None else C.over(gamma.domain)
    g, A = gamma.array, C.array
    R = (np.einsum("abs,smn->abmn", g, A)
         + np.einsum("asm,sbn->abmn", g, g)
         - np.einsum("asn,sbm->abmn", g, g))
    R.flags.writeable = False
    return CurvatureTensor(R, gamma.metric)


@dataclass(frozen=True)
class IdentityReport:
    residuals: dict

    @property
    def passed(self) -> bool:
        return all(not any(r.flat) for r in self.residuals.values())

    def failures(self) -> list[str]:
        return [k for k, r in self.residuals.items() if any(r.flat)]


def identity_suite(R: CurvatureTensor, gamma: ConnectionCoefficients,
                   h: FrameMetric | None = None, C: StructureConstants | None = None) -> IdentityReport:
    """Residual tensors of every identity the rigid-frame data must satisfy."""
    h = gamma.metric if h is None else h.over(gamma.domain)
    C = gamma.constants if C is None else C.over(gamma.domain)
    Rm, g = R.array, gamma.array
    Rl = np.einsum("as,sbmn->abmn", h.array, Rm)
    gl = np.einsum("as,sbm->abm", h.array, g)
    half = h.domain.one / 2
    return IdentityReport({
        "cyclic": Rm + Rm.transpose(0, 3, 1, 2) + Rm.transpose(0, 2, 3, 1),
        "pair": Rl - Rl.transpose(2, 3, 0, 1),
        "antisym_mn": Rm + Rm.transpose(0, 1, 3, 2),
        "antisym_ab": Rl + Rl.transpose(1, 0, 2, 3),
        "metricity": gl + gl.transpose(1, 0, 2),
        "torsion": (g - g.transpose(0, 2, 1)) * half - C.array * half,
    })


def curvature_class(R: CurvatureTensor) -> tuple[str, object]:
    """``("flat", 0)``, ``("constant", k)`` or ``("non-constant", None)``.

    Constant curvature means ``R_{ABMN} = k (h_AM h_BN - h_AN h_BM)``.
    """
    K = R.domain
    Rl = R.lowered()
    if not any(Rl.flat):
        return "flat", K.zero
    h = R.metric.array
    G = np.einsum("am,bn->abmn", h, h) - np.einsum("an,bm->abmn", h, h)
    k = None
    for idx, v in np.ndenumerate(G):
        if v:
            k = Rl[idx] / v
            break
    if k is not None and not any((Rl - G * k).flat):
        return "constant", k
    return "non-constant", None


def curvature_report(R: CurvatureTensor) -> dict:
    """JSON-ready dict; components listed in lexicographic index order (1-based)."""
    K = R.domain
    comps = [{"index": [i + 1 for i in idx], "value": format_scalar(v, K)}
             for idx, v in np.ndenumerate(R.array)]
    label, k = curvature_class(R)
    return {
        "components": comps,
        "ricci": [[format_scalar(v, K) for v in row] for row in R.ricci],
        "scalar": format_scalar(R.scalar, K),
        "class": label,
        "sectional": None if k is None else format_scalar(k, K),
    }


def dumps_curvature_report(R: CurvatureTensor) -> str:
    return json.dumps(curvature_report(R), indent=2, sort_keys=True)
