"""Structure constants and their derivation algebra.

Index convention: the public API is 1-based, matching ``C^A_{BC}`` with
``[xi_B, xi_C] = C^A_{BC} xi_A``.  Arrays stored on the objects are 0-based,
``array[a, b, c] == C^{a+1}_{b+1, c+1}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sympy.polys.domains.domain import Domain

from .exact import (
    QQ,
    AlgebraError,
    Mat,
    convert,
    field_variables,
    format_scalar,
    inverse,
    nullspace,
    rank,
    scalar_field,
    to_scalar,
    _sympify,
)

__all__ = [
    "StructureConstants",
    "InnerOuterSplit",
    "jacobi_check",
    "jacobi_passes",
    "adjoint",
    "derivation_residual",
    "derivation_algebra",
    "center",
    "inner_outer_split",
    "load_constants",
    "dump_constants",
]


def _zeros(shape, K: Domain) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(K.zero)
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class StructureConstants:
    array: np.ndarray
    domain: Domain

    @property
    def n(self) -> int:
        return self.array.shape[0]

    def __getitem__(self, idx):
        a, b, c = idx
        return self.array[a - 1, b - 1, c - 1]

    def __eq__(self, other):
        if not isinstance(other, StructureConstants) or other.n != self.n:
            return NotImplemented
        K = scalar_field(field_variables(self.domain) + field_variables(other.domain))
        return all(convert(x, self.domain, K) == convert(y, other.domain, K)
                   for x, y in zip(self.array.flat, other.array.flat))

    __hash__ = None

    @classmethod
    def from_entries(cls, n: int, entries: dict, domain: Domain | None = None):
        """Build from ``{(A, B, C): value}`` with ``B < C`` (1-based).

        The ``(A, C, B)`` entries are filled in by antisymmetry.
        """
        if domain is None:
            names: set[str] = set()
            for v in entries.values():
                if isinstance(v, (str,)) or hasattr(v, "free_symbols"):
                    names.update(str(s) for s in _sympify(v).free_symbols)
            domain = scalar_field(names)
        C = _zeros((n, n, n), domain)
        for (a, b, c), v in entries.items():
            if not (1 <= a <= n and 1 <= b <= n and 1 <= c <= n):
                raise IndexError(f"index {(a, b, c)} out of range for n={n}")
            if b >= c:
                raise AlgebraError(f"entry {(a, b, c)}: only B < C entries may be given")
            val = to_scalar(v, domain)
            C[a - 1, b - 1, c - 1] = val
            C[a - 1, c - 1, b - 1] = -val
        return cls(_frozen(C), domain)

    @classmethod
    def zeros(cls, n: int) -> "StructureConstants":
        return cls(_frozen(_zeros((n, n, n), QQ)), QQ)

    def over(self, K: Domain) -> "StructureConstants":
        if K == self.domain:
            return self
        C = np.empty(self.array.shape, dtype=object)
        for idx, v in np.ndenumerate(self.array):
            C[idx] = convert(v, self.domain, K)
        return StructureConstants(_frozen(C), K)

    def is_antisymmetric(self) -> bool:
        return all(not (self.array[a, b, c] + self.array[a, c, b])
                   for a in range(self.n) for b in range(self.n) for c in range(self.n))

    def nonzero_entries(self) -> dict:
        """``{(A, B, C): value}`` for ``B < C`` and nonzero value, 1-based."""
        n = self.n
        return {(a + 1, b + 1, c + 1): self.array[a, b, c]
                for a in range(n) for b in range(n) for c in range(b + 1, n)
                if self.array[a, b, c]}

    def numeric(self) -> np.ndarray:
        """Float copy; the field must be ``QQ``."""
        if self.domain != QQ:
            raise AlgebraError("numeric() needs rational structure constants")
        return np.array([[[float(v) for v in row] for row in mat] for mat in self.array])

    def change_basis(self, S: Mat) -> "StructureConstants":
        """Constants in the basis ``e'_B = e_A (S^-1)^A_B``.

        ``C'^A_{BC} = S^A_D C^D_{EF} (S^-1)^E_B (S^-1)^F_C``; the result is an
        isomorphic algebra.
        """
        K = scalar_field(field_variables(self.domain) + field_variables(S.domain))
        Sa = np.array(S.over(K).tolist(), dtype=object)
        Si = np.array(inverse(S.over(K)).tolist(), dtype=object)
        C = self.over(K).array
        out = np.einsum("ad,def,eb,fc->abc", Sa, C, Si, Si)
        return StructureConstants(_frozen(out), K)

    def to_json(self) -> dict:
        entries = [{"A": a, "B": b, "C": c, "value": format_scalar(v, self.domain)}
                   for (a, b, c), v in sorted(self.nonzero_entries().items())]
        return {"n": self.n, "entries": entries}

    @classmethod
    def from_json(cls, data: dict) -> "StructureConstants":
        try:
            n = int(data["n"])
            raw = [(int(e["A"]), int(e["B"]), int(e["C"]), str(e["value"]))
                   for e in data["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise AlgebraError(f"malformed structure-constants document: {exc}") from exc
        entries = {}
        for a, b, c, v in raw:
            if (a, b, c) in entries:
                raise AlgebraError(f"duplicate entry {(a, b, c)}")
            entries[(a, b, c)] = v
        return cls.from_entries(n, entries)


def load_constants(path) -> StructureConstants:
    with open(Path(path)) as fh:
        return StructureConstants.from_json(json.load(fh))


def dump_constants(C: StructureConstants, path) -> None:
    with open(Path(path), "w") as fh:
        json.dump(C.to_json(), fh, indent=2)
        fh.write("\n")


def jacobi_check(C: StructureConstants) -> np.ndarray:
    """Jacobi residual ``J^A_{BCD}`` (0-based array); all zero iff Jacobi holds."""
    A = C.array
    t1 = np.einsum("amb,mcd->abcd", A, A)
    t2 = np.einsum("amc,mdb->abcd", A, A)
    t3 = np.einsum("amd,mbc->abcd", A, A)
    return t1 + t2 + t3


def jacobi_passes(C: StructureConstants) -> bool:
    return C.is_antisymmetric() and not any(jacobi_check(C).flat)


def adjoint(C: StructureConstants, K: int) -> np.ndarray:
    """Matrix of ``ad_K``: ``(ad_K)^A_B = C^A_{KB}`` (``K`` is 1-based)."""
    if not 1 <= K <= C.n:
        raise IndexError(f"adjoint index {K} out of range 1..{C.n}")
    return C.array[:, K - 1, :].copy()


def derivation_residual(C: StructureConstants, lam: np.ndarray) -> np.ndarray:
    """``lam^A_B C^B_{MN} - lam^Q_M C^A_{QN} - lam^Q_N C^A_{MQ}``, indexed ``[A, M, N]``."""
    A = C.array
    return (np.einsum("ab,bmn->amn", lam, A)
            - np.einsum("qm,aqn->amn", lam, A)
            - np.einsum("qn,amq->amn", lam, A))


def _derivation_system(C: StructureConstants) -> Mat:
    # unknown lam^X_Y sits in column X*n + Y; one row per (A, M, N)
    n, K, A = C.n, C.domain, C.array
    rows = []
    for a in range(n):
        for m in range(n):
            for nn in range(n):
                row = [K.zero] * (n * n)
                for b in range(n):
                    row[a * n + b] += A[b, m, nn]
                for q in range(n):
                    row[q * n + m] -= A[a, q, nn]
                    row[q * n + nn] -= A[a, m, q]
                rows.append(row)
    return Mat(len(rows), n * n, tuple(v for r in rows for v in r), K)


def derivation_algebra(C: StructureConstants) -> list[np.ndarray]:
    """Basis of the derivations of the algebra (generators of its automorphisms)."""
    n = C.n
    return [np.array(v, dtype=object).reshape(n, n)
            for v in nullspace(_derivation_system(C))]


def center(C: StructureConstants) -> list[list]:
    """Basis of ``{v : C^A_{KB} v^K = 0 for all A, B}``."""
    n, A = C.n, C.array
    rows = [[A[a, k, b] for k in range(n)] for a in range(n) for b in range(n)]
    return nullspace(Mat(len(rows), n, tuple(v for r in rows for v in r), C.domain))


@dataclass(frozen=True)
class InnerOuterSplit:
    inner_dim: int
    outer_dim: int
    inner_basis: tuple  # independent ad_K matrices
    inner_indices: tuple  # their 1-based K


def _flat_rank(mats, K: Domain) -> int:
    if not mats:
        return 0
    rows = [list(m.flat) for m in mats]
    return rank(Mat(len(rows), len(rows[0]), tuple(v for r in rows for v in r), K))


def inner_outer_split(C: StructureConstants, D: list[np.ndarray] | None = None) -> InnerOuterSplit:
    """Split the derivation algebra into inner (``span{ad_K}``) and outer parts."""
    if D is None:
        D = derivation_algebra(C)
    K = C.domain
    chosen, idx = [], []
    for k in range(1, C.n + 1):
        ad = adjoint(C, k)
        if _flat_rank(chosen + [ad], K) > len(chosen):
            chosen.append(ad)
            idx.append(k)
    if _flat_rank(list(D) + chosen, K) != len(D):
        raise AlgebraError("inner derivations escape the derivation algebra; Jacobi identity fails")
    return InnerOuterSplit(len(chosen), len(D) - len(chosen), tuple(chosen), tuple(idx))
