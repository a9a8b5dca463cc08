"""Tree of lattice classes: canonical coordinates vs. the matrix oracle."""

import random

import pytest

from btq.exact import RF, Place, Poly, gf, parse_poly
from btq.tree import (
    LatticeMatrix,
    ball,
    base_vertex,
    canonicalize,
    distance,
    distance_bfs,
    link,
    link_direction,
    matrix_equivalent,
    neighbor,
    residue_lifts,
)


def _mat(P, rows):
    return LatticeMatrix(tuple(rows), P)


def _rf_of(F, s):
    num, _, den = s.partition("/")
    n = parse_poly(F, num)
    if den:
        return RF(n, parse_poly(F, den))
    return RF(n)


def test_canonicalize_identity():
    F = gf(2)
    P = Place.finite(Poly.x(F))
    M = _mat(P, (RF.one(F), RF.zero(F), RF.zero(F), RF.one(F)))
    v = canonicalize(M)
    assert v == base_vertex(P)
    assert v.m == 0 and v.tail == ()


def test_canonicalize_link_matrices():
    # [[t,1],[0,1]] and [[t,0],[0,1]] at P=(t) over F_2: distinct level-1 classes
    F = gf(2)
    P = Place.finite(Poly.x(F))
    t = RF.t(F)
    one, zero = RF.one(F), RF.zero(F)
    v1 = canonicalize(_mat(P, (t, one, zero, one)))
    v0 = canonicalize(_mat(P, (t, zero, zero, one)))
    assert v1.m == 1 and [(e, c.coeffs) for e, c in v1.tail] == [(0, (1,))]
    assert v0.m == 1 and v0.tail == ()
    assert v1 != v0


def test_canonicalize_scalar_invariance():
    rng = random.Random(3)
    F = gf(3)
    P = Place.finite(Poly.x(F))
    for _ in range(25):
        M = _random_invertible(P, rng)
        lam = _random_scalar(F, rng)
        M2 = _mat(P, tuple(x * lam for x in M.entries()))
        assert canonicalize(M) == canonicalize(M2)


def _random_scalar(F, rng):
    t = RF.t(F)
    lam = RF.const(F, rng.randrange(1, F.q))
    for _ in range(rng.randint(0, 2)):
        lam = lam * rng.choice([t, (t + RF.one(F)).inverse(), t.inverse()])
    return lam


def _random_invertible(P, rng):
    F = P.field
    t = RF.t(F)
    while True:
        entries = []
        for _ in range(4):
            num = Poly(F, [rng.randrange(F.q) for _ in range(rng.randint(1, 3))])
            den = rng.choice([Poly.one(F), Poly.x(F), Poly.x(F) * Poly.x(F)])
            entries.append(RF(num, den) if not num.is_zero() else RF.zero(F))
        M = _mat(P, tuple(entries))
        if not M.det().is_zero():
            return M


def test_matrix_equivalent_examples():
    F = gf(2)
    P = Place.finite(Poly.x(F))
    t, one, zero = RF.t(F), RF.one(F), RF.zero(F)
    M = _mat(P, (t, one, zero, one))
    piM = _mat(P, tuple(x * t for x in M.entries()))
    assert matrix_equivalent(M, piM)
    M1 = _mat(P, (t, zero, zero, one))
    M2 = _mat(P, (t, one, zero, one))
    assert not matrix_equivalent(M1, M2)
    # derived check: quotient scaled to O-entries has non-unit determinant
    N = M1.inverse().mul(M2)
    vals = [P.valuation(x) for x in N.entries() if not x.is_zero()]
    assert P.valuation(N.det()) - 2 * min(vals) != 0


def test_matrix_equivalent_gl2o_fuzz():
    rng = random.Random(9)
    F = gf(3)
    P = Place.finite(Poly.x(F))
    for _ in range(25):
        M = _random_invertible(P, rng)
        g = _random_gl2o(P, rng)
        assert matrix_equivalent(M, M.mul(g))
        assert canonicalize(M) == canonicalize(M.mul(g))


def _random_gl2o(P, rng):
    """Random element of GL_2(O_P): unit determinant, integral entries."""
    F = P.field
    while True:
        entries = []
        for _ in range(4):
            cs = [rng.randrange(F.q) for _ in range(3)]
            entries.append(RF(Poly(F, cs)))
        g = _mat(P, tuple(entries))
        if not g.det().is_zero() and P.valuation(g.det()) == 0:
            if all(x.is_zero() or P.valuation(x) >= 0 for x in g.entries()):
                return g


def test_canonical_oracle_agreement_exhaustive_f2():
    """canonicalize(M1) == canonicalize(M2)  <=>  matrix_equivalent(M1, M2),
    for all invertible matrices with polynomial entries of degree <= 1 over F_2."""
    F = gf(2)
    P = Place.finite(Poly.x(F))
    polys = [Poly(F, cs) for cs in [(), (1,), (0, 1), (1, 1)]]
    mats = []
    for a in polys:
        for b in polys:
            for c in polys:
                for d in polys:
                    M = _mat(P, (RF(a), RF(b), RF(c), RF(d)))
                    if not M.det().is_zero():
                        mats.append(M)
    canon = [canonicalize(M) for M in mats]
    for i in range(len(mats)):
        for j in range(i, len(mats)):
            assert (canon[i] == canon[j]) == matrix_equivalent(mats[i], mats[j])


@pytest.mark.parametrize(
    "q,deg", [(2, 1), (3, 1), (4, None), (5, 1), (2, 2)]
)
def test_ball_sizes_homogeneous(q, deg):
    # valence q_v + 1 with q_v = q^deg; q_v = 4 via F_4 rational place or F_2 quadratic
    if deg is None:
        F = gf(2, 2)
        P = Place.finite(Poly.x(F))
        q_v = 4
    else:
        F = gf(q)
        if deg == 1:
            P = Place.finite(Poly.x(F))
        else:
            P = Place.finite(parse_poly(F, "t^2+t+1"))
        q_v = q**deg
    for r in range(5):
        b = ball(base_vertex(P), r)
        expect = 1 if r == 0 else 1 + (q_v + 1) * (q_v**r - 1) // (q_v - 1)
        assert len(b) == expect


def test_link_f3_and_f2():
    F3 = gf(3)
    P3 = Place.finite(Poly.x(F3))
    assert len(link(base_vertex(P3))) == 4
    F2 = gf(2)
    P2 = Place.finite(Poly.x(F2))
    nb = link(base_vertex(P2))
    keys = {(v.m, tuple(c.coeffs for _, c in v.tail)) for v in nb}
    assert keys == {(1, ()), (1, ((1,),)), (-1, ())}


def test_link_symmetry_and_types():
    F = gf(3)
    P = Place.finite(Poly.x(F))
    v = base_vertex(P)
    for w in link(v):
        assert v in link(w)
        assert (w.vertex_type - v.vertex_type) % 2 == 1


def test_link_matches_matrix_route():
    """Link via coordinates equals link via right multiplication by the
    elementary matrices [[pi, lift],[0,1]] and [[pi^-1,0],[0,1]]."""
    rng = random.Random(31)
    F = gf(3)
    for P in [Place.finite(Poly.x(F)), Place.infinity(F)]:
        pi = P.uniformizer()
        zero, one = RF.zero(F), RF.one(F)
        vs = [base_vertex(P)] + rng.sample(sorted(ball(base_vertex(P), 2), key=lambda v: v.sort_key()), 4)
        for v in vs:
            M = v.matrix()
            expected = set()
            for lift in residue_lifts(P):
                E = _mat(P, (pi, RF(lift), zero, one))
                expected.add(canonicalize(M.mul(E)))
            expected.add(canonicalize(M.mul(_mat(P, (pi.inverse(), zero, zero, one)))))
            assert expected == set(link(v))
            assert len(link(v)) == len(expected)


def test_no_cycles_radius4():
    F = gf(2)
    P = Place.finite(Poly.x(F))
    seen = {base_vertex(P)}
    frontier = [base_vertex(P)]
    parent = {base_vertex(P): None}
    for _ in range(4):
        nxt = []
        for v in frontier:
            for w in link(v):
                if w == parent[v]:
                    continue
                assert w not in seen, "cycle found"
                seen.add(w)
                parent[w] = v
                nxt.append(w)
        frontier = nxt


def test_distance_examples_and_bfs():
    F = gf(2)
    P = Place.finite(Poly.x(F))
    b = base_vertex(P)
    assert distance(b, b) == 0
    far = b
    for _ in range(3):
        far = neighbor(far, Poly.zero(F))
    assert far.m == 3 and far.tail == ()
    assert distance(b, far) == 3
    assert distance_bfs(b, far) == 3
    rng = random.Random(4)
    verts = sorted(ball(b, 3), key=lambda v: v.sort_key())
    for _ in range(30):
        v, w = rng.choice(verts), rng.choice(verts)
        d = distance(v, w)
        assert d == distance(w, v) == distance_bfs(v, w)


def test_distance_infinite_place():
    F = gf(3)
    P = Place.infinity(F)
    b = base_vertex(P)
    verts = sorted(ball(b, 2), key=lambda v: v.sort_key())
    for v in verts:
        assert distance(b, v) == distance_bfs(b, v)


def test_distance_different_places_error():
    F = gf(2)
    v1 = base_vertex(Place.finite(Poly.x(F)))
    v2 = base_vertex(Place.infinity(F))
    with pytest.raises(ValueError):
        distance(v1, v2)


def test_link_direction_roundtrip():
    F = gf(3)
    P = Place.finite(Poly.x(F))
    v = base_vertex(P)
    for w in link(v):
        assert neighbor(v, link_direction(v, w)) == w
