import numpy as np
import pytest
import sympy

from homsym.cartan import FrameMetric, connection_coefficients, curvature
from homsym.catalog import all_entries, catalog
from homsym.exact import QQ, Mat, rank, rank_generic
from homsym.gauge import (FiniteTransform, UnsupportedOperationError, canonicalize, exp_inner,
                          gauge_rank, gauge_variation, preservation_residual, transform_metric)


def _struct_zero(S, C):
    return not any(preservation_residual(C, S).flat)


def test_variation_examples():
    assert gauge_variation(catalog("I").constants, FrameMetric.generic(3)).is_zero()
    II = gauge_variation(catalog("II").constants, FrameMetric.generic(3))
    assert rank(II) == 2
    # first column (eps^1) vanishes: e1 is central
    assert all(not II[i, 0] for i in range(II.rows))
    assert rank(gauge_variation(catalog("IX").constants, FrameMetric.generic(3))) == 3


def test_type_ii_rank_at_a_point_matches_sympy():
    M = gauge_variation(catalog("II").constants, FrameMetric.generic(3))
    pt = {"h11": 2, "h12": 1, "h13": 3, "h22": 5, "h23": -1, "h33": 7}
    S = sympy.Matrix([[M.domain.to_sympy(M[i, j]).subs(pt) for j in range(3)] for i in range(6)])
    assert S.rank() == rank_generic(M) == 2


@pytest.mark.parametrize("t,rank_,res,flag,eff", [
    ("III", 2, 4, False, 4), ("V", 3, 3, False, 3), ("I", 0, 6, True, 3), ("II", 2, 4, False, 4)])
def test_gauge_rank_examples(t, rank_, res, flag, eff):
    e = catalog(t)
    g = gauge_rank(e.constants, e.pattern)
    assert (g.rank, g.residual, g.abelian_exception, g.effective_residual) == (rank_, res, flag, eff)
    if not e.pattern.side_relations:
        assert gauge_rank(e.constants, e.pattern, symbolic=True) == g


def test_nilpotent_flow_is_exact():
    C = catalog("II").constants
    S = exp_inner(C, 2, "t")
    A = S.matrix
    K = A.domain
    assert A[0, 2] == K.from_sympy(sympy.Symbol("t")) and A[0, 0] == K.one
    assert _struct_zero(S, C)


def test_zero_parameter_is_identity():
    for e in all_entries():
        for k in range(1, 4):
            S = exp_inner(e.constants, k, 0)
            assert np.allclose(S.numeric(), np.eye(3))


def test_diagonalizable_flow_closed_form():
    C = catalog("III").constants
    S = exp_inner(C, 3, "t")
    assert "u" in S.parameters
    assert _struct_zero(S, C)


def test_rotation_flow_closed_form():
    C = catalog("VII", "0").constants
    S = exp_inner(C, 3, "t")
    assert "s" in S.parameters and _struct_zero(S, C)
    ix = catalog("IX").constants
    for k in (1, 2, 3):
        assert _struct_zero(exp_inner(ix, k, "t"), ix)


def test_non_semisimple_symbolic_unsupported():
    with pytest.raises(UnsupportedOperationError):
        exp_inner(catalog("IV").constants, 3, "t")
    # numeric parameter still works
    S = exp_inner(catalog("IV").constants, 3, 0.7)
    assert np.max(np.abs(preservation_residual(catalog("IV").constants, S))) < 1e-12


def test_identity_leaves_metric():
    h = FrameMetric.generic(3)
    out = transform_metric(h, FiniteTransform.identity(3))
    assert out.tolist() == h.tolist()


def test_type_ii_zeroing_by_solving_two_conditions():
    C = catalog("II").constants
    h = FrameMetric.from_rows([[2, 1, "1/2"], [1, 3, "1/3"], ["1/2", "1/3", 4]])
    S = exp_inner(C, 2, "a").then(exp_inner(C, 3, "b"))
    ht = transform_metric(h, S)
    K = ht.domain
    a, b = sympy.symbols("a b")
    e12, e13 = (K.to_sympy(ht.array[0, 1]), K.to_sympy(ht.array[0, 2]))
    sol = sympy.solve([sympy.numer(sympy.together(e12)), sympy.numer(sympy.together(e13))], [a, b], dict=True)
    assert len(sol) == 1
    pt = {str(k): v for k, v in sol[0].items()}
    final = ht.evaluate(pt)
    assert not final.array[0, 1] and not final.array[0, 2]


def test_scalar_curvature_invariant_under_inner_transform():
    h = FrameMetric.from_rows([[3, 1, "1/2"], [1, 2, "1/5"], ["1/2", "1/5", 5]])
    for t, k in [("IX", 2), ("II", 2), ("VIII", 3), ("III", 3)]:
        C = catalog(t).constants
        S = exp_inner(C, k, "t")
        name = next(iter(S.parameters), "t")
        S = S.evaluate({name: QQ(1, 3)})
        assert S.matrix.domain == QQ
        ht = transform_metric(h, S)
        r0 = curvature(connection_coefficients(C, h)).scalar
        r1 = curvature(connection_coefficients(C, ht)).scalar
        assert r0 == r1, t


def _pd(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(3, 3))
    return A @ A.T + 0.3 * np.eye(3)


def test_canonicalize_type_ii_exact_witness():
    C = catalog("II").constants
    for s in range(5):
        f = canonicalize(C, _pd(s))
        assert f.reached and f.witness_exact and f.witness_residual == 0
        assert abs(f.h[0, 1]) < 1e-10 * f.h[0, 0] and abs(f.h[0, 2]) < 1e-10 * f.h[0, 0]
        assert np.all(np.linalg.eigvalsh(f.h) > 0)


def test_canonicalize_ix_diagonal():
    C = catalog("IX").constants
    f = canonicalize(C, _pd(11))
    assert f.reached and f.witness_residual < 1e-10
    assert np.max(np.abs(f.h - np.diag(np.diag(f.h)))) < 1e-9
    # orthogonal witness: eigenvalues of h are preserved
    assert np.allclose(np.linalg.eigvalsh(f.h), np.linalg.eigvalsh(_pd(11)))


def test_canonical_input_gets_identity_witness():
    f = canonicalize(catalog("IX").constants, np.diag([1.0, 2.0, 3.0]))
    assert f.reached and f.witness.factors == ()
    assert np.allclose(f.witness.numeric(), np.eye(3))


def test_unreachable_case_is_reported():
    f = canonicalize(catalog("III").constants, _pd(2))
    assert not f.reached and f.findings
