"""Inner-automorphism gauge freedom acting on constant frame metrics.

An automorphism ``S`` of the algebra changes the invariant frame to
``e'_M = e_A (S^-1)^A_M`` without changing the structure constants, and the
metric becomes ``h' = S^-T h S^-1``.  Only the inner ones, generated by the
``ad_K``, come from diffeomorphisms, so they are the only ones used here.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg
import sympy
from scipy.optimize import brentq, least_squares

from .cartan import FrameMetric
from .exact import (
    QQ,
    AlgebraError,
    Mat,
    field_variables,
    format_scalar,
    inverse,
    rank,
    rank_generic,
    scalar_field,
    to_scalar,
    _sympify,
)
from .lie import StructureConstants, adjoint, inner_outer_split

__all__ = [
    "UnsupportedOperationError",
    "GaugeRank",
    "FiniteTransform",
    "CanonicalForm",
    "gauge_variation",
    "gauge_rank",
    "exp_inner",
    "transform_metric",
    "preservation_residual",
    "canonicalize",
    "condition_violation",
]


class UnsupportedOperationError(AlgebraError, NotImplementedError):
    """The requested exact exponential has no closed form in the scalar tower."""


def _pairs(n):
    return [(a, b) for a in range(n) for b in range(a, n)]


def gauge_variation(C: StructureConstants, h: FrameMetric) -> Mat:
    """Matrix of ``eps -> delta h`` with one row per ``(A <= B)`` and one column per ``eps^N``.

    ``delta h_AB = h_AM C^M_{NB} eps^N + h_MB C^M_{NA} eps^N``.
    """
    K = scalar_field(field_variables(C.domain) + field_variables(h.domain))
    A, H = C.over(K).array, h.over(K).array
    n = C.n
    T = np.einsum("am,mnb->abn", H, A) + np.einsum("mb,mna->abn", H, A)
    rows = [T[a, b, :].tolist() for a, b in _pairs(n)]
    return Mat(len(rows), n, tuple(v for r in rows for v in r), K)


@dataclass(frozen=True)
class GaugeRank:
    rank: int
    residual: int
    abelian_exception: bool
    effective_residual: int

    def to_json(self) -> dict:
        return {"rank": self.rank, "residual": self.residual,
                "abelian_exception": self.abelian_exception,
                "effective_residual": self.effective_residual}


def gauge_rank(C: StructureConstants, h: FrameMetric, *, samples: int = 3,
               rng: random.Random | int | None = 0, symbolic: bool = False) -> GaugeRank:
    """Generic rank of the gauge variation and the leftover metric parameter count.

    For an abelian algebra the inner action is trivial, yet any basis change
    preserves ``C = 0``; the rotations then remove ``n(n-1)/2`` parameters.
    That case is flagged and its ``effective_residual`` reports ``n``.
    """
    M = gauge_variation(C, h)
    rels = h.side_relations
    if symbolic and not rels:
        r = rank(M)
    else:
        r = rank_generic(M, samples=samples, rng=rng, relations=rels)
    n = C.n
    total = n * (n + 1) // 2
    abelian = not any(C.array.flat)
    eff = n if abelian else total - r
    return GaugeRank(r, total - r, abelian, eff)


# -- finite inner transforms -------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteTransform:
    """Invertible ``S``, either exact (``Mat``) or at double precision (``ndarray``).

    ``factors`` lists the one-parameter pieces ``(K, t)`` in application order,
    so the matrix is ``S_k ... S_1``.  ``parameters`` explains any fresh
    variable introduced for an exponential (e.g. ``{"u": "exp(-t)"}``).
    """

    matrix: object
    factors: tuple = ()
    parameters: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return isinstance(self.matrix, Mat)

    @property
    def n(self) -> int:
        return self.matrix.rows if self.exact else self.matrix.shape[0]

    @classmethod
    def identity(cls, n: int) -> "FiniteTransform":
        return cls(Mat.identity(n))

    def numeric(self) -> np.ndarray:
        if not self.exact:
            return self.matrix
        if self.matrix.domain != QQ:
            raise AlgebraError("transform still depends on parameters")
        return np.array([[float(v) for v in r] for r in self.matrix.tolist()])

    def then(self, other: "FiniteTransform") -> "FiniteTransform":
        """Apply ``self`` first, then ``other``."""
        params = {**self.parameters, **other.parameters}
        factors = self.factors + other.factors
        if self.exact and other.exact:
            K = scalar_field(field_variables(self.matrix.domain) + field_variables(other.matrix.domain))
            return FiniteTransform(other.matrix.over(K) @ self.matrix.over(K), factors, params)
        return FiniteTransform(other.numeric() @ self.numeric(), factors, params)

    def evaluate(self, point) -> "FiniteTransform":
        if not self.exact:
            return self
        return FiniteTransform(self.matrix.evaluate(point), self.factors, self.parameters)

    def to_json(self) -> dict:
        if self.exact:
            K = self.matrix.domain
            mat = [[format_scalar(v, K) for v in r] for r in self.matrix.tolist()]
        else:
            mat = self.matrix.tolist()
        return {"factors": [[k, _t_json(t)] for k, t in self.factors],
                "matrix": mat, "exact": self.exact, "parameters": dict(self.parameters)}


def _t_json(t):
    if isinstance(t, float):
        return t
    return str(t)


def _obj_power(A: np.ndarray, k: int, one):
    n = A.shape[0]
    P = np.empty((n, n), dtype=object)
    P.fill(one * 0)
    for i in range(n):
        P[i, i] = one
    for _ in range(k):
        P = P @ A
    return P


def _is_nilpotent(A: np.ndarray) -> bool:
    n = A.shape[0]
    P = A.copy()
    for _ in range(n - 1):
        P = P @ A
    return not any(P.flat)


def _fresh(name: str, taken) -> str:
    if name not in taken:
        return name
    i = 1
    while f"{name}{i}" in taken:
        i += 1
    return f"{name}{i}"


def exp_inner(C: StructureConstants, K: int, t, *, fresh: str | None = None) -> FiniteTransform:
    """``exp(t ad_K)``.

    * nilpotent ``ad_K``: exact finite sum for any ``t`` (floats are taken at
      their exact binary value);
    * otherwise, numeric ``t``: double-precision matrix exponential;
    * otherwise, symbolic ``t`` with rational eigenvalues: exact in a fresh
      positive parameter ``u = exp(-t/d)``;
    * symbolic ``t``, ``ad_K^3 = -r^2 ad_K`` with rational ``r``: exact in the
      fresh parameter ``s = tan(r t / 2)``.

    Anything else raises :class:`UnsupportedOperationError`.
    """
    A = adjoint(C, K)
    n = C.n
    if _is_nilpotent(A):
        texpr = _sympify(t)
        Kf = scalar_field(field_variables(C.domain) + tuple(str(s) for s in texpr.free_symbols))
        A = C.over(Kf).array[:, K - 1, :]
        tv = to_scalar(texpr, Kf)
        S = _obj_power(A, 0, Kf.one)
        term = S.copy()
        for k in range(1, n):
            term = term @ A * (tv / k)
            S = S + term
        return FiniteTransform(Mat.from_rows(S.tolist(), Kf), ((K, t),))
    symbolic = isinstance(t, str) or (hasattr(t, "free_symbols") and t.free_symbols)
    if not symbolic:
        if C.domain != QQ:
            raise UnsupportedOperationError("numeric exponential needs rational constants")
        G = C.numeric()[:, K - 1, :]
        return FiniteTransform(scipy.linalg.expm(float(t) * G), ((K, t),))
    if C.domain != QQ:
        raise UnsupportedOperationError("closed-form exponential needs rational constants")
    M = sympy.Matrix(A.tolist()).applyfunc(lambda v: QQ.to_sympy(v))
    taken = set(field_variables(C.domain)) | {str(s) for s in _sympify(t).free_symbols}
    eig = M.eigenvals()
    if all(ev.is_rational for ev in eig) and M.is_diagonalizable():
        d = sympy.ilcm(*[sympy.Rational(ev).q for ev in eig])
        name = _fresh(fresh or "u", taken)
        u = sympy.Symbol(name)
        S = sympy.zeros(n, n)
        for lam in eig:
            P = sympy.eye(n)
            for mu in eig:
                if mu != lam:
                    P = P * (M - mu * sympy.eye(n)) / (lam - mu)
            S += u ** int(-lam * d) * P
        Kf = scalar_field(field_variables(C.domain) + (name,))
        return FiniteTransform(Mat.from_rows(S.tolist(), Kf), ((K, t),),
                               {name: f"exp(-({t})/{d})"})
    M3 = M ** 3
    nz = [(i, j) for i in range(n) for j in range(n) if M[i, j] != 0]
    ratio = -M3[nz[0]] / M[nz[0]]
    r = sympy.sqrt(ratio)
    if ratio > 0 and r.is_rational and M3 == -ratio * M:
        name = _fresh(fresh or "s", taken)
        s = sympy.Symbol(name)
        S = (sympy.eye(n) + (2 * s / (1 + s ** 2)) / r * M
             + (2 * s ** 2 / (1 + s ** 2)) / r ** 2 * M * M)
        Kf = scalar_field(field_variables(C.domain) + (name,))
        return FiniteTransform(Mat.from_rows(S.tolist(), Kf), ((K, t),),
                               {name: f"tan({r}*({t})/2)"})
    raise UnsupportedOperationError(f"no closed form for exp(t ad_{K}) with symbolic t")


def preservation_residual(C: StructureConstants, S: FiniteTransform) -> np.ndarray:
    """``S^A_B C^B_{MN} - C^A_{KL} S^K_M S^L_N``; zero iff ``S`` is an automorphism."""
    if S.exact:
        Kf = scalar_field(field_variables(C.domain) + field_variables(S.matrix.domain))
        A = C.over(Kf).array
        Sm = np.array(S.matrix.over(Kf).tolist(), dtype=object)
    else:
        A = C.numeric()
        Sm = S.matrix
    return np.einsum("ab,bmn->amn", Sm, A) - np.einsum("akl,km,ln->amn", A, Sm, Sm)


def transform_metric(h, S: FiniteTransform):
    """``h'_{MN} = h_AB (S^-1)^A_M (S^-1)^B_N``.

    Exact ``h`` and exact ``S`` give a :class:`FrameMetric`; otherwise a float array.
    """
    if isinstance(h, FrameMetric) and S.exact:
        Kf = scalar_field(field_variables(h.domain) + field_variables(S.matrix.domain))
        try:
            Si = np.array(inverse(S.matrix.over(Kf)).tolist(), dtype=object)
        except AlgebraError as exc:
            raise AlgebraError("transform is singular") from exc
        out = Si.T @ h.over(Kf).array @ Si
        return FrameMetric(out, Kf, tuple(h.over(Kf).side_relations))
    H = h.numeric() if isinstance(h, FrameMetric) else np.asarray(h, dtype=float)
    Sn = S.numeric()
    if abs(np.linalg.det(Sn)) < 1e-300:
        raise AlgebraError("transform is singular")
    Si = np.linalg.inv(Sn)
    out = Si.T @ H @ Si
    return (out + out.T) / 2


# -- canonicalization --------------------------------------------------------

def condition_violation(cond, H: np.ndarray) -> float:
    """Scale-free signed measure of how far ``H`` is from satisfying ``cond``."""
    i, j = cond.i - 1, cond.j - 1
    if cond.kind == "zero":
        return H[i, j] / math.sqrt(H[i, i] * H[j, j])
    if cond.kind == "equal":
        return (H[i, i] - H[j, j]) / (H[i, i] + H[j, j])
    if cond.kind == "det_root":
        root = math.sqrt(max(H[0, 0] * H[1, 1] - H[0, 1] ** 2, 0.0))
        return (H[2, 2] - root) / (H[2, 2] + root)
    raise ValueError(f"unknown condition kind {cond.kind!r}")


def _is_pd(H: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        return False
    return True


class _Flow:
    """Fast ``t -> exp(t G)`` for a fixed real 3x3 generator."""

    def __init__(self, G: np.ndarray):
        self.G = G
        self.nilpotent = not np.any(np.linalg.matrix_power(G, G.shape[0]))
        self.vals = self.vecs = self.inv = None
        if not self.nilpotent:
            vals, vecs = np.linalg.eig(G)
            if np.linalg.cond(vecs) < 1e8:
                self.vals, self.vecs, self.inv = vals, vecs, np.linalg.inv(vecs)

    def __call__(self, t: float) -> np.ndarray:
        G = self.G
        if self.nilpotent:
            return np.eye(3) + t * G + (t * t / 2) * (G @ G)
        if self.vals is not None:
            return ((self.vecs * np.exp(t * self.vals)) @ self.inv).real
        return scipy.linalg.expm(t * G)

    def batch(self, ts: np.ndarray) -> np.ndarray:
        G = self.G
        if self.nilpotent:
            return (np.eye(3) + ts[:, None, None] * G
                    + (ts[:, None, None] ** 2 / 2) * (G @ G))
        if self.vals is not None:
            E = np.exp(ts[:, None] * self.vals[None, :])
            return np.einsum("ij,tj,jk->tik", self.vecs, E, self.inv).real
        return scipy.linalg.expm(ts[:, None, None] * G)


_T_MAX = 15.0
_GRID = np.concatenate([-np.geomspace(1e-3, _T_MAX, 60)[::-1], [0.0], np.geomspace(1e-3, _T_MAX, 60)])


def _transformed(H, Si):
    """Congruence by an already inverted transform."""
    out = Si.T @ H @ Si
    return (out + out.T) / 2


def _batch_transformed(H, Sis):
    return np.einsum("tam,ab,tbn->tmn", Sis, H, Sis)


def _batch_violation(cond, Hs):
    i, j = cond.i - 1, cond.j - 1
    if cond.kind == "zero":
        return Hs[:, i, j] / np.sqrt(np.abs(Hs[:, i, i] * Hs[:, j, j]))
    if cond.kind == "equal":
        return (Hs[:, i, i] - Hs[:, j, j]) / (Hs[:, i, i] + Hs[:, j, j])
    root = np.sqrt(np.maximum(Hs[:, 0, 0] * Hs[:, 1, 1] - Hs[:, 0, 1] ** 2, 0.0))
    return (Hs[:, 2, 2] - root) / (Hs[:, 2, 2] + root)


def _score(conds, H) -> float:
    return sum(condition_violation(c, H) ** 2 for c in conds)


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    input: np.ndarray
    h: np.ndarray
    witness: FiniteTransform
    reached: bool
    zero_count: int
    max_violation: float
    witness_residual: float
    witness_exact: bool
    findings: tuple[str, ...]

    def to_json(self) -> dict:
        pattern = [[0 if abs(self.h[i, j]) <= 1e-10 * math.sqrt(self.h[i, i] * self.h[j, j])
                    else "*" for j in range(3)] for i in range(3)]
        return {
            "input": self.input.tolist(),
            "output": self.h.tolist(),
            "witness": [[k, t] for k, t in self.witness.factors],
            "witness_exact": self.witness_exact,
            "witness_residual": self.witness_residual,
            "pattern": pattern,
            "zero_count": self.zero_count,
            "reached": self.reached,
            "max_violation": self.max_violation,
            "findings": list(self.findings),
        }


def _generators(C: StructureConstants):
    """(label, exact-or-None matrix, float matrix) for each gauge direction."""
    n = C.n
    if not any(C.array.flat):
        out = []
        for a in range(n):
            for b in range(a + 1, n):
                G = np.zeros((n, n))
                G[a, b], G[b, a] = 1.0, -1.0
                out.append((f"R{a + 1}{b + 1}", G))
        return out
    split = inner_outer_split(C)
    Cn = C.numeric()
    return [(K, Cn[:, K - 1, :]) for K in split.inner_indices]


def canonicalize(C: StructureConstants, h, conditions=None, *, tol: float = 1e-10,
                 max_steps: int = 200) -> CanonicalForm:
    """Greedy search along one-parameter inner subgroups toward a sparse metric.

    ``conditions`` default to the catalog entry of ``C`` (literal match) or to
    "all off-diagonal entries vanish".  Each step tries every generator and
    every unmet condition, solves that condition exactly along the subgroup
    (bracketing plus Brent's method), and keeps the move with the smallest
    total violation.  Abelian algebras use rotations, since every basis change
    is an automorphism there.
    """
    from .catalog import Condition, identify_catalog

    if C.domain != QQ:
        raise AlgebraError("canonicalize needs rational structure constants")
    H0 = h.numeric() if isinstance(h, FrameMetric) else np.array(h, dtype=float)
    if H0.shape != (3, 3) and conditions is None:
        raise AlgebraError("default conditions exist only for n = 3")
    if not _is_pd(H0):
        raise AlgebraError("canonicalize needs a positive-definite metric")
    if conditions is None:
        entry = identify_catalog(C)
        conditions = entry.conditions if entry else tuple(
            Condition("zero", i, j) for i in range(1, 4) for j in range(i + 1, 4))
    gens = [(lab, G, _Flow(G)) for lab, G in _generators(C)]
    H = H0.copy()
    factors: list[tuple] = []
    findings: list[str] = []
    score = _score(conditions, H)
    for _ in range(max_steps):
        if max(abs(condition_violation(c, H)) for c in conditions) < tol:
            break
        candidates = []
        for lab, G, flow in gens:
            Hs = _batch_transformed(H, flow.batch(-_GRID))
            for c in conditions:
                v = _batch_violation(c, Hs)
                if abs(v[60]) < tol:
                    continue
                t = _nearest_root(lambda s: condition_violation(c, _transformed(H, flow(-s))), v)
                if t is None:
                    continue
                Ht = _transformed(H, flow(-t))
                if not _is_pd(Ht):
                    continue
                candidates.append((_score(conditions, Ht), abs(t), lab, t, Ht))
        if not candidates:
            break
        candidates.sort(key=lambda c: (c[0], c[1]))
        sc, _, lab, t, Ht = candidates[0]
        if sc >= score:
            break
        H, score = Ht, sc
        factors.append((lab, float(t)))
    viol = max((abs(condition_violation(c, H)) for c in conditions), default=0.0)
    if viol >= tol:
        H, factors = _polish(H, gens, conditions, factors)
        viol = max(abs(condition_violation(c, H)) for c in conditions)
    reached = viol < tol
    if not reached:
        unmet = [f"{c.kind}({c.i},{c.j})" for c in conditions
                 if abs(condition_violation(c, H)) >= tol]
        findings.append("target pattern not reached along inner subgroups; unmet: "
                        + ", ".join(unmet))
    witness, exact, resid = _witness(C, gens, factors)
    if not _is_pd(H):  # pragma: no cover - congruence preserves definiteness
        findings.append("canonical metric lost positive definiteness")
    zero_count = sum(1 for i in range(3) for j in range(i + 1, 3)
                     if abs(H[i, j]) <= tol * math.sqrt(H[i, i] * H[j, j]))
    return CanonicalForm(H0, H, witness, reached, zero_count, viol, resid, exact, tuple(findings))


def _polish(H, gens, conditions, factors, sweeps: int = 2, restarts: int = 4):
    """Joint least-squares solve over a product of all one-parameter subgroups.

    Needed when a target requires a combination of generators, e.g. two
    commuting nilpotent directions that each move both entries of a column.
    """
    order = [g for _ in range(sweeps) for g in gens]

    def apply(tau):
        Si = np.eye(H.shape[0])
        for (_, _, flow), t in zip(order, tau):
            Si = Si @ flow(-t)
        return _transformed(H, Si)

    def resid(tau):
        Ht = apply(tau)
        if not _is_pd(Ht):
            return np.full(len(conditions), 1e3)
        return np.array([condition_violation(c, Ht) for c in conditions])

    best_tau, best = None, float(np.max(np.abs(resid(np.zeros(len(order))))))
    rng = np.random.default_rng(0)
    starts = [np.zeros(len(order))] + [rng.normal(scale=0.5, size=len(order)) for _ in range(restarts)]
    for x0 in starts:
        sol = least_squares(resid, x0, bounds=(-_T_MAX, _T_MAX), xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=2000)
        val = float(np.max(np.abs(resid(sol.x))))
        if val < best:
            best_tau, best = sol.x, val
        if best < 1e-13:
            break
    if best_tau is None:
        return H, factors
    extra = [(lab, float(t)) for (lab, _, _), t in zip(order, best_tau) if t != 0.0]
    return apply(best_tau), list(factors) + extra


def _nearest_root(f, values: np.ndarray):
    """Root of ``f`` closest to ``t = 0`` among sign changes on the grid."""
    mid = 60
    best = None
    for side in (range(mid, len(_GRID) - 1), range(mid, 0, -1)):
        for k in side:
            k2 = k + 1 if side.step == 1 else k - 1
            a, b = values[k], values[k2]
            if not (np.isfinite(a) and np.isfinite(b)):
                break
            if a == 0:
                return float(_GRID[k])
            if a * b < 0:
                t = brentq(f, _GRID[k], _GRID[k2], xtol=1e-15, rtol=1e-15, maxiter=200)
                if best is None or abs(t) < abs(best):
                    best = t
                break
    return best


def _witness(C, gens, factors):
    """Assemble the witness and its structure-preservation residual."""
    labels = {lab: G for lab, G, _ in gens}
    all_nilpotent = all(isinstance(lab, int) and _is_nilpotent(adjoint(C, lab))
                        for lab, _ in factors)
    if all_nilpotent:
        S = FiniteTransform.identity(C.n)
        for lab, t in factors:
            S = S.then(exp_inner(C, lab, Fraction(t)))
        S = FiniteTransform(S.matrix, tuple(factors))
        res = preservation_residual(C, S)
        return S, True, 0.0 if not any(res.flat) else float(max(abs(float(v)) for v in res.flat))
    Sn = np.eye(C.n)
    for lab, t in factors:
        Sn = scipy.linalg.expm(t * labels[lab]) @ Sn
    S = FiniteTransform(Sn, tuple(factors))
    res = preservation_residual(C, S)
    return S, False, float(np.max(np.abs(res))) if res.size else 0.0


def dumps_canonical(form: CanonicalForm) -> str:
    return json.dumps(form.to_json(), indent=2, sort_keys=True)
