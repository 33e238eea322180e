"""Killing vector fields of a locally homogeneous metric as a closed linear Pfaffian system.

A Killing field ``zeta`` is described in the invariant frame by its components
``zeta^A = sigma^A(zeta)`` and by the antisymmetric matrix ``F_{AB}`` with
``Lie_zeta sigma^A = h^{AK} F_{KB} sigma^B``.  Both are prescribed along every
frame direction,

    X_N zeta^A = h^{AK} F_{KN} - C^A_{MN} zeta^M
    X_N F_{AB} = F_{AM} gamma^M_{BN} - gamma_{AMN} h^{MK} F_{KB} - gamma_{ABS} h^{SK} F_{KN}

with ``gamma_{ABM} = h_{AS} gamma^S_{BM}``, so the Killing algebra is the space of
initial data ``u = (zeta, F)`` at one point that survive every integrability
condition.  The base point is the group identity; by homogeneity any point
gives the same count.  At the identity the homogeneity fields have
``zeta = e_A`` and ``F = 0``.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass

import numpy as np
from sympy.polys.domains.domain import Domain

from .cartan import FrameMetric, connection_coefficients
from .exact import (
    QQ,
    AlgebraError,
    ScalarDivisionError,
    SamplingError,
    field_variables,
    format_scalar,
    sample_point,
    scalar_field,
)
from .lie import StructureConstants

__all__ = [
    "ClosureBoundError",
    "KillingInitialData",
    "PfaffianSystem",
    "ClosureResult",
    "build_pfaffian",
    "integrability_matrices",
    "closure_dimension",
    "extra_killing_data",
    "maximal_symmetry_check",
]

DEFAULT_SAMPLES = 3


class ClosureBoundError(AlgebraError):
    """``d_total`` fell outside ``[n, n(n+1)/2]``; always an implementation fault."""


@dataclass(frozen=True, eq=False)
class KillingInitialData:
    zeta: tuple
    F: np.ndarray  # antisymmetric n x n
    domain: Domain

    def __post_init__(self):
        if any((self.F + self.F.T).flat):
            raise AlgebraError("F must be antisymmetric")

    def to_json(self) -> dict:
        K = self.domain
        return {"zeta": [format_scalar(v, K) for v in self.zeta],
                "F": [[format_scalar(v, K) for v in r] for r in self.F]}


def _f_pairs(n):
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


@dataclass(frozen=True, eq=False)
class PfaffianSystem:
    """``X_N u = M_N u`` for ``u = (zeta^1..zeta^n, F_12, F_13, ..., F_{n-1,n})``."""

    n: int
    matrices: tuple  # M_N as m x m object arrays, N = 1..n
    domain: Domain

    @property
    def m(self) -> int:
        return self.n + self.n * (self.n - 1) // 2

    def labels(self) -> list[str]:
        return [f"zeta{a + 1}" for a in range(self.n)] + [f"F{a + 1}{b + 1}" for a, b in _f_pairs(self.n)]

    def to_json(self) -> dict:
        K = self.domain
        return {"unknowns": self.labels(),
                "M": [[[format_scalar(v, K) for v in r] for r in M] for M in self.matrices]}


def build_pfaffian(C: StructureConstants, h: FrameMetric, gamma=None) -> PfaffianSystem:
    """Pack both derivative rules into constant matrices ``M_N``."""
    if C.n != h.n:
        raise ValueError("dimension mismatch between constants and metric")
    if gamma is None:
        gamma = connection_coefficients(C, h)
    K = gamma.domain
    n = C.n
    A = C.over(K).array
    hi = gamma.metric.inverse
    g = gamma.array
    gl = gamma.lowered()
    pairs = _f_pairs(n)
    m = n + len(pairs)
    where = {}
    for r, (a, b) in enumerate(pairs):
        where[(a, b)] = (n + r, K.one)
        where[(b, a)] = (n + r, -K.one)

    mats = []
    for N in range(n):
        M = np.empty((m, m), dtype=object)
        M.fill(K.zero)
        for a in range(n):
            for mm in range(n):
                M[a, mm] -= A[a, mm, N]
            for k in range(n):
                if k != N:
                    j, s = where[(k, N)]
                    M[a, j] += hi[a, k] * s
        for r, (a, b) in enumerate(pairs):
            row = n + r
            for mm in range(n):
                if mm != a and g[mm, b, N]:
                    j, s = where[(a, mm)]
                    M[row, j] += s * g[mm, b, N]
            for k in range(n):
                if k != b:
                    coef = sum((gl[a, mm, N] * hi[mm, k] for mm in range(n)), K.zero)
                    if coef:
                        j, s = where[(k, b)]
                        M[row, j] -= coef * s
                if k != N:
                    coef = sum((gl[a, b, ss] * hi[ss, k] for ss in range(n)), K.zero)
                    if coef:
                        j, s = where[(k, N)]
                        M[row, j] -= coef * s
        M.flags.writeable = False
        mats.append(M)
    return PfaffianSystem(n, tuple(mats), K)


def integrability_matrices(P: PfaffianSystem, C: StructureConstants) -> list[np.ndarray]:
    """``K_PQ = M_P M_Q - M_Q M_P - C^S_{PQ} M_S`` for ``P < Q``.

    Follows from ``[X_P, X_Q] = -C^S_{PQ} X_S`` applied to ``X_N u = M_N u``.
    """
    A = C.over(P.domain).array
    Ms = P.matrices
    out = []
    for p in range(P.n):
        for q in range(p + 1, P.n):
            Kpq = Ms[p] @ Ms[q] - Ms[q] @ Ms[p]
            for s in range(P.n):
                if A[s, p, q]:
                    Kpq = Kpq - Ms[s] * A[s, p, q]
            out.append(Kpq)
    return out


class _RowSpace:
    """Echelon basis grown one vector at a time (pivot = first nonzero entry)."""

    def __init__(self, m: int, K: Domain):
        self.m, self.K = m, K
        self.rows: dict[int, list] = {}

    def reduce(self, v):
        v = list(v)
        for c in range(self.m):
            if v[c] and c in self.rows:
                f = v[c]
                r = self.rows[c]
                v = [x - f * y for x, y in zip(v, r)]
        return v

    def add(self, v) -> list | None:
        v = self.reduce(v)
        for c, x in enumerate(v):
            if x:
                inv = self.K.one / x
                v = [y * inv for y in v]
                self.rows[c] = v
                return v
        return None

    @property
    def dim(self) -> int:
        return len(self.rows)

    def nullspace(self) -> list[list]:
        """Basis of ``{u : r . u = 0 for every basis row r}``."""
        K, m = self.K, self.m
        # back-substitute to reduced echelon form first
        piv = sorted(self.rows)
        rows = {p: list(self.rows[p]) for p in piv}
        for p in reversed(piv):
            for q in piv:
                if q < p and rows[q][p]:
                    f = rows[q][p]
                    rows[q] = [x - f * y for x, y in zip(rows[q], rows[p])]
        free = [c for c in range(m) if c not in rows]
        basis = []
        for fcol in free:
            v = [K.zero] * m
            v[fcol] = K.one
            for p in piv:
                v[p] = -rows[p][fcol]
            basis.append(v)
        return basis


def _closure(C: StructureConstants, h: FrameMetric):
    P = build_pfaffian(C, h)
    K, m = P.domain, P.m
    space = _RowSpace(m, K)
    frontier = []
    for Kpq in integrability_matrices(P, C):
        for row in Kpq:
            added = space.add(row)
            if added is not None:
                frontier.append(added)
    depth = 0
    while frontier:
        depth += 1
        if depth > m + 1:
            raise ClosureBoundError("constraint closure did not stabilise")
        new = []
        for r in frontier:
            rv = np.array(r, dtype=object)
            for M in P.matrices:
                added = space.add(list(rv @ M))
                if added is not None:
                    new.append(added)
        frontier = new
    return P, space, depth


@dataclass(frozen=True, eq=False)
class ClosureResult:
    d_total: int
    n: int
    basis: tuple  # admissible u vectors at the base point
    domain: Domain
    mode: str  # "symbolic" or "sampled"
    samples: tuple  # sample points used (sampled mode)
    seed: object
    depth: int

    @property
    def extra(self) -> int:
        return self.d_total - self.n


def _point_json(point):
    return {k: str(v) for k, v in sorted(point.items())}


def closure_dimension(C: StructureConstants, h: FrameMetric, *, symbolic: bool = False,
                      samples: int = DEFAULT_SAMPLES, seed: int | None = 0) -> ClosureResult:
    """Dimension of the Killing algebra and a basis of its initial data.

    In sampled mode (default) the metric parameters are set to random
    rational points, honoring side relations, and the whole computation runs
    over the rationals; the smallest dimension found is the generic one.
    Symbolic mode works over the rational-function field and falls back to
    sampling when the metric carries side relations.
    """
    n = C.n
    params = field_variables(scalar_field(field_variables(C.domain) + field_variables(h.domain)))
    if not params or (symbolic and not h.side_relations):
        P, space, depth = _closure(C, h)
        d = P.m - space.dim
        maximal_symmetry_check(d, n)
        return ClosureResult(d, n, tuple(space.nullspace()), P.domain,
                             "symbolic" if params else "exact", (), seed, depth)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = random.Random(seed)
    K = scalar_field(params)
    Cf, hf = C.over(K), h.over(K)
    best = None
    points = []
    attempts = 0
    while len(points) < samples:
        attempts += 1
        if attempts > 20 * samples:
            raise SamplingError("could not find regular sample points")
        point = sample_point(K, rng, hf.side_relations)
        try:
            hp = hf.evaluate(point)
            Cp = StructureConstants(_eval_array(Cf.array, K, point), QQ)
            P, space, depth = _closure(Cp, hp)
        except (ScalarDivisionError, AlgebraError) as exc:
            if isinstance(exc, ClosureBoundError):
                raise
            continue
        points.append(point)
        d = P.m - space.dim
        if best is None or d < best[0]:
            best = (d, space, depth)
    d, space, depth = best
    maximal_symmetry_check(d, n)
    return ClosureResult(d, n, tuple(space.nullspace()), QQ, "sampled",
                         tuple(_point_json(p) for p in points), seed, depth)


def _eval_array(arr, K, point):
    from .exact import evaluate

    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = evaluate(v, K, point)
    out.flags.writeable = False
    return out


def homogeneity_data(n: int, K: Domain = QQ) -> list[list]:
    """Initial data of the ``n`` homogeneity fields at the identity: ``(e_A, 0)``."""
    m = n + n * (n - 1) // 2
    out = []
    for a in range(n):
        v = [K.zero] * m
        v[a] = K.one
        out.append(v)
    return out


def extra_killing_data(result: ClosureResult) -> list[KillingInitialData]:
    """Representatives of the admissible data modulo the homogeneity fields.

    Every ``(zeta, 0)`` is admissible, so ``(zeta, F)`` and ``(0, F)`` define the
    same class; representatives are returned with ``zeta = 0``.
    """
    n, K = result.n, result.domain
    m = n + n * (n - 1) // 2
    basis = [list(v) for v in result.basis]
    # the homogeneity data must be admissible; check by rank
    space = _RowSpace(m, K)
    for v in basis:
        space.add(v)
    for v in homogeneity_data(n, K):
        if any(space.reduce(v)):
            raise ClosureBoundError("homogeneity initial data are not admissible")
    perm = list(range(n, m)) + list(range(n))
    sub = _RowSpace(m, K)
    for v in basis:
        sub.add([v[c] for c in perm])
    extra = []
    pairs = _f_pairs(n)
    for piv, row in sorted(sub.rows.items()):
        if piv >= m - n:
            continue
        vals = [K.zero] * m
        for newc, oldc in enumerate(perm):
            vals[oldc] = row[newc]
        F = np.empty((n, n), dtype=object)
        F.fill(K.zero)
        for r, (a, b) in enumerate(pairs):
            F[a, b] = vals[n + r]
            F[b, a] = -vals[n + r]
        extra.append(KillingInitialData(tuple(K.zero for _ in range(n)), F, K))
    if len(extra) != result.extra:
        raise ClosureBoundError("extra data count disagrees with d_total - n")
    return extra


def maximal_symmetry_check(d_total: int, n: int) -> str:
    """``"exact-homogeneity"``, ``"extra"`` or ``"maximal"``."""
    top = n * (n + 1) // 2
    if not n <= d_total <= top:
        raise ClosureBoundError(f"d_total={d_total} outside [{n}, {top}]")
    if d_total == n:
        return "exact-homogeneity"
    if d_total == top:
        return "maximal"
    return "extra"


def closure_report(result: ClosureResult) -> dict:
    extra = extra_killing_data(result)
    return {
        "d_total": result.d_total,
        "extra_count": result.extra,
        "classification": maximal_symmetry_check(result.d_total, result.n),
        "mode": result.mode,
        "seed": result.seed,
        "sample_points": list(result.samples),
        "base_point": "group identity",
        "closure_depth": result.depth,
        "F_bases": [d.to_json()["F"] for d in extra],
    }


def dumps_closure(result: ClosureResult) -> str:
    return json.dumps(closure_report(result), indent=2, sort_keys=True)
