"""The nine three-dimensional real Lie algebras of Bianchi's list, with their
irreducible frame-metric patterns and the isometry counts they should produce.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cartan import FrameMetric
from .exact import QQ, _sympify, to_scalar
from .lie import StructureConstants

__all__ = [
    "TYPES",
    "ParameterDomainError",
    "Expected",
    "Condition",
    "CatalogEntry",
    "catalog",
    "all_entries",
    "identify_catalog",
    "parse_type",
]

TYPES = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX")


class ParameterDomainError(ValueError):
    """``q`` missing, superfluous, or outside the allowed range."""


@dataclass(frozen=True)
class Expected:
    inner_dim: int
    gauge_rank: int
    residual: int
    d_total: int
    extra: int
    gauge_exception: bool = False


@dataclass(frozen=True)
class Condition:
    """Target relation on a numeric metric used by canonicalization.

    ``kind`` is ``"zero"`` (``h_ij = 0``), ``"equal"`` (``h_ii = h_jj``) or
    ``"det_root"`` (``h_33 = sqrt(h11 h22 - h12^2)``); indices are 1-based.
    """

    kind: str
    i: int
    j: int


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    type: str
    q: object  # element of ``constants.domain`` or None
    sector: str | None
    constants: StructureConstants
    pattern: FrameMetric
    conditions: tuple[Condition, ...]
    expected: Expected | None
    realization: str  # key into ``homsym.realize.bianchi``

    @property
    def label(self) -> str:
        if self.q is None:
            return self.type
        return f"{self.type}(q={_fmt_q(self.q)})"

    @property
    def free_count(self) -> int:
        return len(self.pattern.parameters) - len(self.pattern.side_relations)

    def zero_pattern(self) -> list[tuple[int, int]]:
        """1-based upper-triangular positions the pattern forces to zero."""
        arr = self.pattern.array
        return [(a + 1, b + 1) for a in range(3) for b in range(a + 1, 3) if not arr[a, b]]


def _fmt_q(q) -> str:
    try:
        f = Fraction(int(q.numerator), int(q.denominator))
        return str(f)
    except (AttributeError, TypeError):
        return str(q)


def parse_type(name: str) -> str:
    t = str(name).strip().upper()
    if t.startswith("TYPE"):
        t = t[4:].strip(" _-")
    if t not in TYPES:
        raise ParameterDomainError(f"unknown Bianchi type {name!r}")
    return t


_DIAG = [["h11", 0, 0], [0, "h22", 0], [0, 0, "h33"]]
_OFFDIAG_ZERO = (Condition("zero", 1, 2), Condition("zero", 1, 3), Condition("zero", 2, 3))
_BLOCK_12 = (Condition("zero", 1, 3), Condition("zero", 2, 3))


def _constants(t: str, q) -> dict:
    return {
        "I": {},
        "II": {(1, 2, 3): 1},
        "III": {(1, 1, 3): 1},
        "IV": {(1, 1, 3): 1, (1, 2, 3): 1, (2, 2, 3): 1},
        "V": {(1, 1, 3): 1, (2, 2, 3): 1},
        "VI": {(1, 1, 3): 1, (2, 2, 3): q},
        "VII": {(2, 1, 3): 1, (1, 2, 3): -1, (2, 2, 3): q},
        "VIII": {(1, 2, 3): -1, (2, 1, 3): -1, (3, 1, 2): 1},
        "IX": {(1, 2, 3): 1, (2, 1, 3): -1, (3, 1, 2): 1},
    }[t]


def _check_q(t: str, q):
    needs_q = t in ("VI", "VII")
    if not needs_q:
        if q is not None:
            raise ParameterDomainError(f"type {t} takes no parameter q")
        return None, None
    if q is None:
        raise ParameterDomainError(f"type {t} needs a parameter q")
    expr = _sympify(q)
    if expr.free_symbols:
        return expr, None
    if not expr.is_rational:
        raise ParameterDomainError("q must be rational or a symbol")
    qq = to_scalar(expr, QQ)
    if t == "VI":
        if qq == 0 or qq == 1:
            raise ParameterDomainError("type VI requires q not in {0, 1}")
        return expr, ("q=-1" if qq == -1 else "q!=-1")
    if qq * qq >= 4:
        raise ParameterDomainError("type VII requires q^2 < 4")
    return expr, ("q=0" if qq == 0 else "q!=0")


def catalog(type: str, q=None) -> CatalogEntry:
    """Catalog entry for a Bianchi type; ``q`` is required exactly for VI and VII."""
    t = parse_type(type)
    qexpr, sector = _check_q(t, q)
    C = StructureConstants.from_entries(3, _constants(t, qexpr))
    rels = ()
    conditions = _OFFDIAG_ZERO
    rows = _DIAG
    if t == "II":
        rows = [["h11", 0, 0], [0, "h22", "h23"], [0, "h23", "h33"]]
        conditions = (Condition("zero", 1, 2), Condition("zero", 1, 3))
    elif t == "III":
        rows = [["h11", "h12", 0], ["h12", "h22", 0], [0, 0, "h33"]]
        conditions = _BLOCK_12
    elif t == "V":
        rows = [["h11", "h12", 0], ["h12", "h22", 0], [0, 0, "h33"]]
        rels = ("h33**2 - (h11*h22 - h12**2)",)
        conditions = _BLOCK_12 + (Condition("det_root", 3, 3),)
    elif t == "VI" and sector == "q=-1":
        rows = [["h11", "h12", 0], ["h12", "h11", 0], [0, 0, "h33"]]
        conditions = _BLOCK_12 + (Condition("equal", 1, 2),)
    pattern = FrameMetric.from_rows(rows, side_relations=rels)
    expected = _expected(t) if (q is None or sector is not None) else None
    q_val = None if qexpr is None else to_scalar(qexpr, C.domain)
    return CatalogEntry(t, q_val, sector, C, pattern, conditions, expected, t)


def _expected(t: str) -> Expected:
    return {
        "I": Expected(0, 0, 6, 6, 3, gauge_exception=True),
        "II": Expected(2, 2, 4, 4, 1),
        "III": Expected(2, 2, 4, 4, 1),
        "IV": Expected(3, 3, 3, 3, 0),
        "V": Expected(3, 3, 3, 6, 3),
    }.get(t, Expected(3, 3, 3, 3, 0))


# (type, q) pairs exercised by the reproduction table
REPRODUCTION_ROWS = (
    ("I", None), ("II", None), ("III", None), ("IV", None), ("V", None),
    ("VI", -1), ("VI", 2), ("VI", Fraction(1, 2)),
    ("VII", 0), ("VII", 1),
    ("VIII", None), ("IX", None),
)


def all_entries() -> list[CatalogEntry]:
    return [catalog(t, q) for t, q in REPRODUCTION_ROWS]


def identify_catalog(C: StructureConstants) -> CatalogEntry | None:
    """Catalog entry whose constants coincide entry-for-entry with ``C``, if any.

    Only literal equality is recognised; isomorphic algebras in another basis
    are not classified.
    """
    if C.n != 3 or C.domain != QQ:
        return None
    for t in TYPES:
        if t in ("VI", "VII"):
            q = C[2, 2, 3]
            try:
                cand = catalog(t, q)
            except ParameterDomainError:
                continue
        else:
            cand = catalog(t)
        if cand.constants == C:
            return cand
    return None

