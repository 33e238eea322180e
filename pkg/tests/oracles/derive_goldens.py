"""Regenerate tests/golden/*.json using plain sympy only (no homsym imports).

Run from the repository root: ``python3 tests/oracles/derive_goldens.py``.
"""
from __future__ import annotations

import itertools
import json
from pathlib import Path

import sympy as sp

OUT = Path(__file__).resolve().parent.parent / "golden"
R = sp.Rational


def constants(entries, n=3):
    C = [[[sp.Integer(0)] * n for _ in range(n)] for _ in range(n)]
    for (a, b, c), v in entries.items():
        C[a - 1][b - 1][c - 1] = sp.nsimplify(v)
        C[a - 1][c - 1][b - 1] = -sp.nsimplify(v)
    return C


TYPES = {
    "I": {}, "II": {(1, 2, 3): 1}, "III": {(1, 1, 3): 1},
    "IV": {(1, 1, 3): 1, (1, 2, 3): 1, (2, 2, 3): 1}, "V": {(1, 1, 3): 1, (2, 2, 3): 1},
    "VI(q=-1)": {(1, 1, 3): 1, (2, 2, 3): -1}, "VI(q=2)": {(1, 1, 3): 1, (2, 2, 3): 2},
    "VI(q=1/2)": {(1, 1, 3): 1, (2, 2, 3): R(1, 2)},
    "VII(q=0)": {(2, 1, 3): 1, (1, 2, 3): -1}, "VII(q=1)": {(2, 1, 3): 1, (1, 2, 3): -1, (2, 2, 3): 1},
    "VIII": {(1, 2, 3): -1, (2, 3, 1): 1, (3, 1, 2): 1}, "IX": {(1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1},
}


def gamma_by_solve(C, h):
    """Solve metricity plus torsion-freeness for the 27 unknowns gamma^A_{BM}."""
    n = len(h)
    g = [[[sp.Symbol(f"g_{a}{b}{m}") for m in range(n)] for b in range(n)] for a in range(n)]
    eqs = []
    for a, b, m in itertools.product(range(n), repeat=3):
        eqs.append(sum(h[a][s] * g[s][b][m] + h[s][b] * g[s][a][m] for s in range(n)))
        eqs.append(g[a][b][m] - g[a][m][b] - C[a][b][m])
    sol = sp.solve(eqs, [x for p in g for q in p for x in q], dict=True)
    assert len(sol) == 1
    return [[[sp.factor(sol[0][g[a][b][m]]) for m in range(n)] for b in range(n)] for a in range(n)]


def coordinate_scalar(coframe, coords, C, h):
    """Scalar curvature of g = h_AB sigma^A sigma^B by Christoffel symbols.

    Also asserts d sigma^A = 1/2 C^A_MN sigma^M ^ sigma^N so the chart matches C.
    """
    n = len(coords)
    S = sp.Matrix(coframe)  # S[A, i] = sigma^A_i
    Si = S.inv()
    for A in range(n):
        for i, j in itertools.combinations(range(n), 2):
            d = sp.diff(S[A, j], coords[i]) - sp.diff(S[A, i], coords[j])
            w = sum(C[A][M][N] * S[M, i] * S[N, j] for M in range(n) for N in range(n))
            assert sp.simplify(d - w) == 0, (A, i, j)
    g = sp.simplify(S.T * sp.Matrix(h) * S)
    gi = sp.simplify(g.inv())
    G = [[[sum(gi[k, l] * (sp.diff(g[l, i], coords[j]) + sp.diff(g[l, j], coords[i]) - sp.diff(g[i, j], coords[l]))
               for l in range(n)) / 2 for j in range(n)] for i in range(n)] for k in range(n)]

    def riem(a, b, c, d):  # R^a_{bcd}
        return (sp.diff(G[a][d][b], coords[c]) - sp.diff(G[a][c][b], coords[d])
                + sum(G[a][c][e] * G[e][d][b] - G[a][d][e] * G[e][c][b] for e in range(n)))

    ric = [[sum(riem(a, b, a, d) for a in range(n)) for d in range(n)] for b in range(n)]
    del Si
    return sp.nsimplify(sp.simplify(sum(gi[b, d] * ric[b][d] for b in range(n) for d in range(n))))


def pfaffian(C, h):
    n = len(h)
    h = sp.Matrix(h)
    hi = h.inv()
    Cl = [[[sum(h[a, s] * C[s][b][m] for s in range(n)) for m in range(n)] for b in range(n)] for a in range(n)]
    gl = [[[R(1, 2) * (Cl[a][b][m] + Cl[b][m][a] - Cl[m][a][b]) for m in range(n)] for b in range(n)] for a in range(n)]
    g = [[[sum(hi[a, s] * gl[s][b][m] for s in range(n)) for m in range(n)] for b in range(n)] for a in range(n)]
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    m = n + len(pairs)

    def fidx(a, b):
        if a == b:
            return None, 0
        return (n + pairs.index((a, b)), 1) if a < b else (n + pairs.index((b, a)), -1)

    Ms = []
    for N in range(n):
        M = sp.zeros(m, m)
        for A in range(n):
            for Mi in range(n):
                M[A, Mi] += -C[A][Mi][N]
            for K in range(n):
                j, s = fidx(K, N)
                if j is not None:
                    M[A, j] += hi[A, K] * s
        for r, (A, B) in enumerate(pairs):
            row = n + r
            for Mi in range(n):
                j, s = fidx(A, Mi)
                if j is not None:
                    M[row, j] += s * g[Mi][B][N]
            for Mi in range(n):
                for K in range(n):
                    j, s = fidx(K, B)
                    if j is not None:
                        M[row, j] += -gl[A][Mi][N] * hi[Mi, K] * s
            for S_ in range(n):
                for K in range(n):
                    j, s = fidx(K, N)
                    if j is not None:
                        M[row, j] += -gl[A][B][S_] * hi[S_, K] * s
        Ms.append(M.applyfunc(sp.factor))
    return Ms


def d_total(C, h):
    Ms = pfaffian(C, h)
    n, m = len(h), Ms[0].shape[0]
    rows = [Ms[P] * Ms[Q] - Ms[Q] * Ms[P] - sum((C[S][P][Q] * Ms[S] for S in range(n)), sp.zeros(m, m))
            for P in range(n) for Q in range(P + 1, n)]
    Rm = sp.Matrix.vstack(*rows)
    r = Rm.rank()
    while True:
        Rm = sp.Matrix.vstack(Rm, *[Rm * M for M in Ms])
        r2 = Rm.rank()
        if r2 == r:
            return m - r
        r = r2


def derivation_count(C):
    n = len(C)
    lam = sp.Matrix(n, n, lambda i, j: sp.Symbol(f"l{i}{j}"))
    eqs = []
    for a, b, c in itertools.product(range(n), repeat=3):
        eqs.append(sum(lam[a, s] * C[s][b][c] - C[a][s][c] * lam[s, b] - C[a][b][s] * lam[s, c]
                       for s in range(n)))
    A = sp.Matrix([[sp.diff(e, x) for x in lam] for e in eqs])
    return n * n - A.rank()


def main():
    OUT.mkdir(exist_ok=True)
    h11, h22, h33, h12 = sp.symbols("h11 h22 h33 h12")
    C3 = constants(TYPES["III"])

    gam = gamma_by_solve(C3, [[h11, 0, 0], [0, h22, 0], [0, 0, h33]])
    (OUT / "type_iii_gamma.json").write_text(json.dumps({
        "metric": [["h11", "0", "0"], ["0", "h22", "0"], ["0", "0", "h33"]],
        "gamma": [[[str(x) for x in r] for r in p] for p in gam]}, indent=1) + "\n")

    Ms = pfaffian(C3, [[h11, h12, 0], [h12, h22, 0], [0, 0, h33]])
    (OUT / "type_iii_pfaffian.json").write_text(json.dumps({
        "metric": [["h11", "h12", "0"], ["h12", "h22", "0"], ["0", "0", "h33"]],
        "M": [[[str(x) for x in M.row(i)] for i in range(M.rows)] for M in Ms]}, indent=1) + "\n")

    x, y, z = sp.symbols("x y z")
    th, ph, ps = sp.symbols("theta phi psi")
    # Type III: sigma^1 = e^{-z} dx, sigma^2 = dy, sigma^3 = dz.
    s3 = [[sp.exp(-z), 0, 0], [0, 1, 0], [0, 0, 1]]
    # Type IX via Euler angles (theta, phi, psi); sign chosen so d sigma = +1/2 C sigma ^ sigma.
    s9 = [[-sp.sin(ps), sp.cos(ps) * sp.sin(th), 0],
          [-sp.cos(ps), -sp.sin(ps) * sp.sin(th), 0],
          [0, -sp.cos(th), -1]]
    scalars = {}
    for label, cof, coords, C, h in [
        ("IX diag(1,1,1)", s9, [th, ph, ps], constants(TYPES["IX"]), sp.diag(1, 1, 1).tolist()),
        ("IX diag(1,2,3)", s9, [th, ph, ps], constants(TYPES["IX"]), sp.diag(1, 2, 3).tolist()),
        ("III [[2,1/3,0],[1/3,1,0],[0,0,3]]", s3, [x, y, z], C3, [[2, R(1, 3), 0], [R(1, 3), 1, 0], [0, 0, 3]]),
    ]:
        scalars[label] = {"metric": [[str(v) for v in r] for r in h],
                          "scalar": str(coordinate_scalar(cof, coords, C, h))}
    (OUT / "scalar_curvature.json").write_text(json.dumps(scalars, indent=1, sort_keys=True) + "\n")

    gen = [[R(3), R(1, 3), R(1, 5)], [R(1, 3), R(5, 2), R(2, 7)], [R(1, 5), R(2, 7), R(7, 3)]]
    dt = {k: d_total(constants(e), gen) for k, e in TYPES.items()}
    ix = {str(d): d_total(constants(TYPES["IX"]), sp.diag(*d).tolist())
          for d in ([1, 1, 1], [1, 1, 4], [1, 1, 2], [1, 1, 3], [1, 2, 3])}
    der = {k: derivation_count(constants(e)) for k, e in TYPES.items()}
    (OUT / "closure_and_derivations.json").write_text(json.dumps({
        "generic_metric": [[str(v) for v in r] for r in gen],
        "d_total_generic": dt, "d_total_ix_diagonal": ix, "derivation_count": der},
        indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
