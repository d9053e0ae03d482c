"""Independent brute-force oracle for the reduced observables of the R^5 example.

Uses sympy only: differential forms on R^5 as dicts {sorted index tuple: expr},
the textbook exterior derivative and interior product, generic unknown
coefficients, and a rank computation. Prints the dimensions that
tests/test_reduction.py freezes.

    python3 tests/oracles/r5_reduced_dims.py 2
"""

import itertools
import sys

import sympy as sp

t, x1, x2, y1, y2 = X = sp.symbols("t x1 x2 y1 y2")
N = 5


def monos(D):
    out = []
    for exps in itertools.product(range(D + 1), repeat=N):
        if sum(exps) <= D:
            out.append(sp.Mul(*[v**e for v, e in zip(X, exps)]))
    return out


def add(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = sp.expand(out.get(k, 0) + v)
    return {k: v for k, v in out.items() if v != 0}


def wedge_dx(j, word):
    """dx_j ^ dx_word as (sign, sorted word) or None."""
    if j in word:
        return None
    w = (j,) + word
    inv = sum(1 for a, b in itertools.combinations(w, 2) if a > b)
    return (-1) ** inv, tuple(sorted(w))


def d(form):
    out = {}
    for word, c in form.items():
        for j in range(N):
            r = wedge_dx(j, word)
            if r:
                s, w = r
                out = add(out, {w: s * sp.diff(c, X[j])})
    return out


def iota(field, form):
    """Insert the vector field into the first slot."""
    out = {}
    for word, c in form.items():
        for pos, j in enumerate(word):
            rest = word[:pos] + word[pos + 1 :]
            out = add(out, {rest: (-1) ** pos * field[j] * c})
    return out


def lie(field, form):
    return add(d(iota(field, form)), iota(field, d(form)))


def bracket(Xf, Yf):
    return [sp.expand(sum(Xf[i] * sp.diff(Yf[j], X[i]) - Yf[i] * sp.diff(Xf[j], X[i]) for i in range(N))) for j in range(N)]


omega = {(0, 1, 3): sp.Integer(1), (0, 2, 4): sp.Integer(1)}
xi = [0, 1, 0, 0, 0]  # d/dx1, the symmetry; the ideal is (y1)


def on_zero_set(expr):
    return sp.expand(expr.subs(y1, 0))


def pullback_eqs(form):
    """Pullback to y1 = 0 vanishes."""
    return [on_zero_set(c) for w, c in form.items() if 3 not in w]


def coeff_eqs(exprs, unknowns):
    rows = []
    for e in exprs:
        e = sp.expand(e)
        if e == 0:
            continue
        poly = sp.Poly(e, *X)
        for c in poly.coeffs():
            rows.append([sp.diff(c, u) for u in unknowns])
    return rows


def nullity(rows, n):
    if not rows:
        return n
    return n - sp.Matrix(rows).rank()


def degree_minus_one(D):
    basis = monos(D)
    cs = sp.symbols(f"c0:{len(basis)}")
    f = sum(c * m for c, m in zip(cs, basis))
    fm = {(): f}
    num = coeff_eqs(pullback_eqs(iota(xi, fm)) + pullback_eqs(lie(xi, fm)), cs)
    den = coeff_eqs(pullback_eqs(fm), cs)
    return nullity(num, len(cs)), nullity(den, len(cs))


def degree_zero(D):
    basis = monos(D)
    a = [sp.symbols(f"a{i}_0:{len(basis)}") for i in range(N)]
    v = [sp.symbols(f"v{i}_0:{len(basis)}") for i in range(N)]
    unknowns = [u for grp in a + v for u in grp]
    alpha = {(i,): sum(c * m for c, m in zip(a[i], basis)) for i in range(N)}
    Xf = [sum(c * m for c, m in zip(v[i], basis)) for i in range(N)]
    pair = list(add(iota(Xf, omega), d(alpha)).values())
    in_W = [on_zero_set(Xf[3])]  # X(y1) in (y1)
    br = bracket(xi, Xf)
    in_F = lambda Z: [on_zero_set(Z[j]) for j in range(N) if j != 1]  # A d/dx1 + y1 X
    num = coeff_eqs(pair + pullback_eqs(iota(xi, alpha)) + pullback_eqs(lie(xi, alpha)) + in_W + in_F(br), unknowns)
    den = coeff_eqs(pair + pullback_eqs(alpha) + in_F(Xf), unknowns)
    return nullity(num, len(unknowns)), nullity(den, len(unknowns))


if __name__ == "__main__":
    D = int(sys.argv[1]) if len(sys.argv) > 1 else 2
    for name, fn in (("-1", degree_minus_one), ("0", degree_zero)):
        n, m = fn(D)
        print(f"degree {name}: numerator {n} denominator {m} reduced {n - m}")
