"""Exact arithmetic layer: fields, valuations, expansions, SNF, homology."""

import random

import pytest

from btq import kernels
from btq.exact import (
    RF,
    ZHALF,
    FgAbGroup,
    Place,
    Poly,
    Z,
    Zmod,
    gf,
    homology_of_pair,
    kernel_basis,
    monic_irreducibles,
    padic_expand,
    parse_poly,
    snf,
    solve,
    valuation,
    verify_snf,
)
from btq.exact import intmat


# --- independent SNF oracle: textbook reduction, no pivot heuristics ----


def _oracle_snf(M):
    """Plain elementary reduction; reference for the fast implementations."""
    A = [[int(x) for x in row] for row in M]
    m, n = len(A), len(A[0]) if A else 0
    t = 0
    while t < min(m, n):
        nz = [(i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        i, j = nz[0]
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            for i in range(t + 1, m):
                while A[i][t]:
                    q = A[i][t] // A[t][t]
                    for k in range(n):
                        A[i][k] -= q * A[t][k]
                    if A[i][t]:
                        A[t], A[i] = A[i], A[t]
                        done = False
            for j in range(t + 1, n):
                while A[t][j]:
                    q = A[t][j] // A[t][t]
                    for row in A:
                        row[j] -= q * row[t]
                    if A[t][j]:
                        for row in A:
                            row[t], row[j] = row[j], row[t]
                        done = False
            if done:
                break
        t += 1
    diag = [abs(A[i][i]) for i in range(min(m, n)) if A[i][i]]
    # repair divisibility: diag(a,b) ~ diag(gcd,lcm)
    from math import gcd

    changed = True
    while changed:
        changed = False
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                if diag[j] % diag[i]:
                    g = gcd(diag[i], diag[j])
                    l = diag[i] * diag[j] // g
                    diag[i], diag[j] = g, l
                    changed = True
    return sorted(diag, key=lambda d: (len(str(d)), d)) and diag


def test_snf_identity():
    assert snf([[1, 0], [0, 1]]).factors == (1, 1)


def test_snf_derived_example():
    # oracle first: d1 = gcd of entries, d1*d2 = |det|
    oracle = _oracle_snf([[2, 4], [6, 8]])
    assert oracle == [2, 4]
    assert snf([[2, 4], [6, 8]]).factors == (2, 4)


def test_snf_zero():
    assert snf([[0, 0, 0], [0, 0, 0], [0, 0, 0]]).factors == ()


def test_snf_transforms_random():
    rng = random.Random(7)
    for _ in range(100):
        m = rng.randint(1, 8)
        n = rng.randint(1, 8)
        M = [[rng.randint(-20, 20) for _ in range(n)] for _ in range(m)]
        res = snf(M, transforms=True)
        assert verify_snf(M, res)
        for i in range(1, len(res.factors)):
            assert res.factors[i] % res.factors[i - 1] == 0
        assert list(res.factors) == _oracle_snf(M)


def test_snf_backends_agree():
    rng = random.Random(11)
    from btq.kernels import _core_py

    for _ in range(50):
        m = rng.randint(1, 7)
        n = rng.randint(1, 7)
        M = [[rng.randint(-30, 30) for _ in range(n)] for _ in range(m)]
        assert kernels.snf_diagonal(M) == _core_py.snf_diagonal(M)


def test_kernel_and_solve():
    M = [[1, 2, 3], [2, 4, 6]]
    K = kernel_basis(M)
    assert len(K) == 2
    for v in K:
        assert all(sum(M[i][j] * v[j] for j in range(3)) == 0 for i in range(2))
    x = solve([[2, 0], [0, 3]], [4, 9])
    assert x == [2, 3]
    assert solve([[2]], [3]) is None


# --- finite fields ------------------------------------------------------


@pytest.mark.parametrize("p,e", [(2, 2), (2, 3), (3, 2), (5, 2), (7, 2)])
def test_field_axioms_spot(p, e):
    F = gf(p, e)
    rng = random.Random(p * 100 + e)
    els = list(F.elements())
    for _ in range(60):
        a, b, c = (rng.choice(els) for _ in range(3))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.add(a, b) == F.add(b, a)
        if a:
            assert F.mul(a, F.inv(a)) == 1
        # Frobenius is additive
        assert F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b))


def test_defining_polys_irreducible():
    from btq.exact.gf import _DEFINING

    for (p, e), coeffs in _DEFINING.items():
        f = Poly(gf(p), coeffs)
        assert f.degree == e
        assert f.is_irreducible()


def test_multiplicative_generator():
    F = gf(3, 2)
    g = F.multiplicative_generator()
    seen = set()
    x = 1
    for _ in range(F.q - 1):
        x = F.mul(x, g)
        seen.add(x)
    assert len(seen) == F.q - 1


# --- valuations and expansions -------------------------------------------


def test_valuation_trivial_examples():
    F2 = gf(2)
    t = Poly.x(F2)
    P0 = Place.finite(t)
    Pinf = Place.infinity(F2)
    f = RF(t * t * t, t + Poly.one(F2))  # t^3/(t+1)
    assert valuation(f, P0) == 3
    g = RF(t * t + Poly.one(F2), t)  # (t^2+1)/t
    assert valuation(g, Pinf) == -1
    pi = parse_poly(F2, "t^2+t+1")
    assert valuation(RF(pi), Place.finite(pi)) == 1
    with pytest.raises(ValueError):
        valuation(RF.zero(F2), P0)


def test_valuation_multiplicative_random():
    rng = random.Random(5)
    F = gf(3)
    places = [Place.infinity(F)] + [Place.finite(f) for f in monic_irreducibles(F, 2)]
    nonzero = lambda: _random_rf(F, rng)
    for _ in range(40):
        f, g = nonzero(), nonzero()
        for P in places:
            assert valuation(f * g, P) == valuation(f, P) + valuation(g, P)


def _random_rf(F, rng):
    irr = list(monic_irreducibles(F, 2))
    num = Poly.const(F, rng.randrange(1, F.q))
    den = Poly.one(F)
    for f in rng.sample(irr, k=rng.randint(1, 3)):
        e = rng.randint(-2, 2)
        if e > 0:
            for _ in range(e):
                num = num * f
        else:
            for _ in range(-e):
                den = den * f
    return RF(num, den)


def test_sum_formula():
    # sum over all places of deg(P) * v_P(f) = 0, incl. infinity
    rng = random.Random(17)
    for q in (2, 3, 5):
        F = gf(q)
        irr = list(monic_irreducibles(F, 3))
        for _ in range(34):
            factors = rng.sample(irr, k=rng.randint(1, 4))
            exps = [rng.choice([-2, -1, 1, 2]) for _ in factors]
            num = Poly.const(F, rng.randrange(1, q))
            den = Poly.one(F)
            for f, e in zip(factors, exps):
                for _ in range(abs(e)):
                    if e > 0:
                        num = num * f
                    else:
                        den = den * f
            g = RF(num, den)
            total = sum(P.degree * valuation(g, P) for P in map(Place.finite, factors))
            total += valuation(g, Place.infinity(F))
            assert total == 0


def test_padic_geometric_series():
    F2 = gf(2)
    t = Poly.x(F2)
    P = Place.finite(t)
    f = RF(Poly.one(F2), Poly.one(F2) - t)  # 1/(1-t) = 1+t+t^2+...
    terms = padic_expand(f, P, 3)
    assert [(v, c.coeffs) for v, c in terms] == [(0, (1,)), (1, (1,)), (2, (1,))]


def test_padic_monomial_and_infinity():
    F3 = gf(3)
    t = Poly.x(F3)
    P = Place.finite(t)
    assert [(v, c.coeffs) for v, c in padic_expand(RF(t), P, 3)] == [(1, (1,))]
    Pinf = Place.infinity(F3)
    f = RF(Poly.one(F3), t)  # 1/t = pi_inf
    assert [(v, c.coeffs) for v, c in padic_expand(f, Pinf, 2)] == [(1, (1,))]


def test_padic_roundtrip_and_degree2_place():
    F2 = gf(2)
    pi = parse_poly(F2, "t^2+t+1")
    P = Place.finite(pi)
    f = RF(Poly.x(F2), pi * pi)
    terms = padic_expand(f, P, 3)
    assert terms[0][0] == -2
    for v, c in terms:
        assert c.degree < 2 and not c.is_zero() or c.is_zero()
    approx = P.from_expansion(terms)
    assert (f - approx).is_zero() or valuation(f - approx, P) >= 3


def test_padic_expand_infinity_general():
    F3 = gf(3)
    t = Poly.x(F3)
    Pinf = Place.infinity(F3)
    f = RF(t * t + Poly.one(F3), t)  # (t^2+1)/t: expansion starts at -1
    terms = padic_expand(f, Pinf, 4)
    assert terms[0][0] == -1
    approx = Pinf.from_expansion(terms)
    assert (f - approx).is_zero() or valuation(f - approx, Pinf) >= 4


# --- homology backend ----------------------------------------------------


def test_homology_circle():
    # cellular circle with 4 vertices and 4 edges
    d1 = [
        [-1, 0, 0, 1],
        [1, -1, 0, 0],
        [0, 1, -1, 0],
        [0, 0, 1, -1],
    ]
    h0 = homology_of_pair(intmat.zeros(0, 4), d1)
    h1 = homology_of_pair(d1, intmat.zeros(4, 0))
    assert h0 == FgAbGroup(1)
    assert h1 == FgAbGroup(1)


def test_homology_times2_times3():
    d = [[2]]
    assert homology_of_pair(intmat.zeros(0, 1), d) == FgAbGroup(0, (2,))
    assert homology_of_pair(intmat.zeros(0, 1), d, ZHALF) == FgAbGroup(0)
    d3 = [[3]]
    assert homology_of_pair(intmat.zeros(0, 1), d3, Zmod(3)) == FgAbGroup(0, (3,))
    assert homology_of_pair(d3, intmat.zeros(1, 0), Zmod(3)) == FgAbGroup(0, (3,))


def test_homology_not_a_complex():
    with pytest.raises(ValueError, match="not a complex"):
        homology_of_pair([[1]], [[1]])


def random_complex(rng, nmax=6, emax=9):
    """Random pair (d_n, d_{n+1}) with d_n . d_{n+1} = 0."""
    n = rng.randint(1, nmax)
    m = rng.randint(0, nmax)
    A = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(m)]
    K = kernel_basis(A) if m else [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    k = rng.randint(0, emax)
    cols = []
    for _ in range(k):
        v = [0] * n
        for basis_vec in K:
            c = rng.randint(-3, 3)
            for i in range(n):
                v[i] += c * basis_vec[i]
        cols.append(v)
    B = intmat.from_columns(cols, nrows=n)
    return A, B


def test_zhalf_localization_random():
    rng = random.Random(23)
    for _ in range(100):
        A, B = random_complex(rng)
        hz = homology_of_pair(A, B, Z)
        hhalf = homology_of_pair(A, B, ZHALF)
        assert hhalf == hz.localize_away_2()


def test_fgabgroup_str():
    assert str(FgAbGroup(0)) == "0"
    assert str(FgAbGroup(2, (2, 6))) == "Z^2 + Z/2 + Z/6"
