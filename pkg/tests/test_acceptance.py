"""Acceptance gate: one test per criterion, each at its stated tolerance.

A summary line per criterion is printed at the end of the pytest run.
"""
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from homsym.cartan import FrameMetric, connection_coefficients, curvature, curvature_class, identity_suite
from homsym.catalog import all_entries, catalog
from homsym.exact import QQ, Mat
from homsym.gauge import (UnsupportedOperationError, canonicalize, condition_violation, exp_inner,
                          gauge_rank, preservation_residual, transform_metric)
from homsym.killing import closure_dimension
from homsym.lie import StructureConstants, jacobi_passes
from homsym.reports import realization_summary, reproduction_table

pytestmark = pytest.mark.acceptance

D_TOTAL = {"I": 6, "II": 4, "III": 4, "IV": 3, "V": 6, "VI(q=-1)": 3, "VI(q=2)": 3, "VI(q=1/2)": 3,
           "VII(q=0)": 3, "VII(q=1)": 3, "VIII": 3, "IX": 3}
GAUGE = {"I": 0, "II": 2, "III": 2, "IV": 3, "V": 3, "VI": 3, "VII": 3, "VIII": 3, "IX": 3}


def test_criterion_1_catalog_integrity(record):
    t0 = time.perf_counter()
    entries = all_entries()
    bad = [e.label for e in entries if not jacobi_passes(e.constants)]
    types = {e.type for e in entries}
    mutated = StructureConstants.from_entries(3, {(1, 2, 3): 1, (2, 1, 3): -1, (3, 1, 2): 1, (1, 1, 2): 1})
    mutant_fails = not jacobi_passes(mutated)
    dt = time.perf_counter() - t0
    ok = not bad and len(types) == 9 and mutant_fails and dt < 1.0
    record(1, ok, f"{len(entries)} sets over {len(types)} types, failures={bad}, mutant rejected={mutant_fails}, {dt:.2f}s")
    assert ok


def test_criterion_2_isometry_dimensions(record):
    got, times = {}, {}
    for symbolic in (False, True):
        t0 = time.perf_counter()
        got[symbolic] = {e.label: closure_dimension(e.constants, e.pattern, symbolic=symbolic).d_total
                         for e in all_entries()}
        times[symbolic] = time.perf_counter() - t0
    ok = got[False] == D_TOTAL and got[True] == D_TOTAL and times[False] < 5 and times[True] < 30
    wrong = {k: v for k, v in got[True].items() if D_TOTAL[k] != v}
    record(2, ok, f"sampled {times[False]:.2f}s, symbolic {times[True]:.2f}s, mismatches={wrong}")
    assert ok


def test_criterion_3_gauge_ranks(record):
    problems = []
    for e in all_entries():
        g = gauge_rank(e.constants, e.pattern)
        if g.rank != GAUGE[e.type] or g.residual != 6 - g.rank:
            problems.append(f"{e.label}: rank {g.rank} residual {g.residual}")
        leftover = g.effective_residual if g.abelian_exception else g.residual
        if leftover != e.free_count:
            problems.append(f"{e.label}: residual {leftover} vs free entries {e.free_count}")
        if g.abelian_exception != (e.type == "I"):
            problems.append(f"{e.label}: exception flag {g.abelian_exception}")
    ok = not problems
    record(3, ok, "all ranks and residual counts match" if ok else "; ".join(problems))
    assert ok


def _random_pd(rng):
    A = rng.normal(size=(3, 3))
    return A @ A.T + 0.3 * np.eye(3)


def _witness_ok(e, form):
    """Recheck the witness independently of the canonicalizer's own bookkeeping."""
    W = form.witness
    res = preservation_residual(e.constants, W)
    if W.exact:
        structural = not any(res.flat)
        if not structural:
            return False
    elif np.max(np.abs(res)) >= 1e-10:
        return False
    Hn = transform_metric(form.input, W)
    return np.allclose(Hn, form.h, rtol=1e-9, atol=1e-9 * np.max(np.abs(form.h)))


def test_criterion_4_canonicalization(record):
    rng = np.random.default_rng(1)
    summary, all_ok = [], True
    for e in all_entries():
        reached = 0
        witnesses = 0
        for _ in range(20):
            form = canonicalize(e.constants, _random_pd(rng), e.conditions)
            viol = max((abs(condition_violation(c, form.h)) for c in e.conditions), default=0.0)
            if form.reached and viol <= 1e-10 and np.all(np.linalg.eigvalsh(form.h) > 0):
                reached += 1
            if _witness_ok(e, form):
                witnesses += 1
        all_ok &= reached == 20 and witnesses == 20
        summary.append(f"{e.label} {reached}/20" + ("" if witnesses == 20 else f" (witness {witnesses}/20)"))
    record(4, all_ok, "reached pattern: " + ", ".join(summary))
    assert all_ok, summary


def test_criterion_5_coordinate_oracle(record):
    problems = []
    for e in all_entries():
        q = None if e.q is None else str(Fraction(int(e.q.numerator), int(e.q.denominator)))
        s = realization_summary(e.type, q, points=10, seed=17, tolerance=1e-9)
        needed = {"xi_brackets", "X_brackets", "mixed_brackets", "duality", "xi_drag_sigma"}
        if e.type in ("I", "II", "III", "V"):
            needed |= {"killing", "enlarged_listed", "enlarged_unlisted"}
        missing = needed - set(s["residuals"])
        if missing or not s["passes"]:
            worst = max(s["residuals"].items(), key=lambda kv: kv[1])
            problems.append(f"{e.label}: missing={sorted(missing)} worst={worst}")
    ok = not problems
    record(5, ok, "all residuals < 1e-9 at 10 points per type" if ok else "; ".join(problems))
    assert ok


def test_criterion_6_specialization_sensitivity(record):
    C = catalog("IX").constants
    stated = {(1, 1, 2): 3, (1, 1, 3): 3, (1, 1, 1): 6}
    got = {}
    for diag in stated:
        h = FrameMetric.from_rows(np.diag(diag).tolist())
        got[diag] = closure_dimension(C, h).d_total
    unit = FrameMetric.from_rows(np.eye(3, dtype=int).tolist())
    constant = curvature_class(curvature(connection_coefficients(C, unit)))[0] == "constant"
    distinct = closure_dimension(C, FrameMetric.from_rows(np.diag([1, 2, 3]).tolist())).d_total
    ok = got == stated and constant
    detail = ", ".join(f"diag{d}: {got[d]} (stated {stated[d]})" for d in stated)
    record(6, ok, f"{detail}; unit metric constant curvature={constant}; diag(1,2,3): {distinct}")
    assert ok, detail


def _random_basis_change(rng):
    while True:
        S = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) + (2 if i == j else 0) for j in range(3)]
             for i in range(3)]
        M = Mat.from_rows([[str(v) for v in r] for r in S], QQ)
        if np.linalg.det(np.array(S, dtype=float)) != 0:
            return M


def _random_rational_pd(rng):
    L = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) if j < i else
          (Fraction(rng.randint(1, 4), rng.randint(1, 2)) if i == j else Fraction(0)) for j in range(3)]
         for i in range(3)]
    H = [[sum(L[i][k] * L[j][k] for k in range(3)) for j in range(3)] for i in range(3)]
    return FrameMetric.from_rows([[str(v) for v in r] for r in H])


def _random_inner(C, rng):
    """An exact inner automorphism at a random rational parameter, or None for abelian C."""
    ks = [1, 2, 3]
    rng.shuffle(ks)
    for k in ks:
        if not any(C.array[:, k - 1, :].flat):
            continue
        try:
            S = exp_inner(C, k, "t")
        except UnsupportedOperationError:
            continue
        name = next(iter(S.parameters), "t")
        return S.evaluate({name: QQ(rng.randint(1, 5), rng.randint(1, 4))})
    return None


def test_criterion_7_property_suite(record):
    rng = random.Random(2024)
    entries = all_entries()
    problems = []
    for case in range(50):
        e = entries[case % len(entries)]
        C = e.constants.change_basis(_random_basis_change(rng))
        if not jacobi_passes(C):
            problems.append(f"case {case}: transformed constants fail Jacobi")
            continue
        h = _random_rational_pd(rng)
        d = closure_dimension(C, h).d_total
        if not 3 <= d <= 6:
            problems.append(f"case {case}: d_total {d}")
        S = _random_inner(C, rng)
        if S is not None:
            if any(preservation_residual(C, S).flat):
                problems.append(f"case {case}: inner transform is not an automorphism")
            d2 = closure_dimension(C, transform_metric(h, S)).d_total
            if d2 != d:
                problems.append(f"case {case}: d_total {d} -> {d2} under inner transform")
        g = connection_coefficients(C, h)
        R = curvature(g)
        c = rng.randint(2, 9)
        Rc = curvature(connection_coefficients(C, h.scaled(c)))
        if any(a != b for a, b in zip(R.array.flat, Rc.array.flat)):
            problems.append(f"case {case}: mixed curvature changes under scaling")
        rep = identity_suite(R, g)
        if not rep.passed:
            problems.append(f"case {case}: identities fail {rep.failures()}")
    ok = not problems
    record(7, ok, "50 transformed algebras with random metrics" if ok else "; ".join(problems[:5]))
    assert ok


def test_criterion_8_out_of_scope_documented(record):
    table = reproduction_table()
    text = table.get("out_of_scope", "")
    ok = "Einstein" in text and "not reproduced" in text and table["passes"]
    record(8, ok, f"reproduce output states: {text!r}")
    assert ok
