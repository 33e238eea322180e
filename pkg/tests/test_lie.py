from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from homsym.catalog import catalog
from homsym.exact import QQ, AlgebraError, Mat
from homsym.lie import (StructureConstants, adjoint, center, derivation_algebra,
                        derivation_residual, dump_constants, inner_outer_split, jacobi_check,
                        jacobi_passes, load_constants)


def _ix():
    return StructureConstants.from_entries(3, {(1, 2, 3): 1, (2, 1, 3): -1, (3, 1, 2): 1})


def test_jacobi_examples():
    assert jacobi_passes(_ix())
    assert jacobi_passes(StructureConstants.zeros(3))
    bad = StructureConstants.from_entries(3, {(1, 2, 3): 1, (2, 1, 3): -1, (3, 1, 2): 1, (1, 1, 2): 1})
    assert not jacobi_passes(bad)
    assert any(jacobi_check(bad).flat)


def test_only_upper_entries_accepted():
    with pytest.raises(AlgebraError):
        StructureConstants.from_entries(3, {(1, 3, 2): 1})


def test_adjoint_examples():
    assert not any(adjoint(StructureConstants.zeros(3), 2).flat)
    ad2 = adjoint(catalog("II").constants, 2)
    assert [(i, j) for (i, j), v in np.ndenumerate(ad2) if v] == [(0, 2)] and ad2[0, 2] == 1
    ad3 = adjoint(catalog("III").constants, 3)
    assert [(i, j) for (i, j), v in np.ndenumerate(ad3) if v] == [(0, 0)] and ad3[0, 0] == -1


def test_derivation_counts_match_frozen(golden):
    frozen = golden("closure_and_derivations.json")["derivation_count"]
    for label, count in frozen.items():
        t, _, q = label.partition("(q=")
        e = catalog(t, q.rstrip(")") or None)
        D = derivation_algebra(e.constants)
        assert len(D) == count, label
        for d in D:
            assert not any(derivation_residual(e.constants, d).flat)


def test_ix_derivations_are_inner():
    C = _ix()
    D = derivation_algebra(C)
    stacked = sympy.Matrix([[QQ.to_sympy(v) for v in m.flat] for m in D]
                           + [[QQ.to_sympy(v) for v in adjoint(C, k).flat] for k in (1, 2, 3)])
    assert stacked.rank() == 3


def test_inner_outer_examples():
    for t, inner, outer in [("I", 0, 9), ("II", 2, 4), ("IX", 3, 0)]:
        s = inner_outer_split(catalog(t).constants)
        assert (s.inner_dim, s.outer_dim) == (inner, outer)
    assert center(catalog("II").constants) == [[QQ(1), QQ(0), QQ(0)]]


def test_json_roundtrip(tmp_path):
    C = catalog("VII", "1").constants
    dump_constants(C, tmp_path / "c.json")
    assert load_constants(tmp_path / "c.json") == C
    with pytest.raises(AlgebraError):
        StructureConstants.from_json({"n": 3, "entries": [{"A": 1}]})


rational = st.builds(Fraction, st.integers(-3, 3), st.integers(1, 4))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["II", "III", "IV", "V", "VIII", "IX"]),
       st.lists(rational, min_size=9, max_size=9))
def test_basis_change_preserves_jacobi_and_counts(t, vals):
    S = Mat.from_rows([[str(v + (3 if i == j else 0)) for j, v in enumerate(vals[3 * i:3 * i + 3])]
                       for i in range(3)], QQ)
    if sympy.Matrix(S.tolist()).applyfunc(QQ.to_sympy).det() == 0:
        return
    C = catalog(t).constants
    C2 = C.change_basis(S)
    assert jacobi_passes(C2)
    assert len(derivation_algebra(C2)) == len(derivation_algebra(C))
    assert inner_outer_split(C2).inner_dim == inner_outer_split(C).inner_dim
