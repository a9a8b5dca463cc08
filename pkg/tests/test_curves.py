"""Curves, closed points, Picard groups, the localization sequence, units."""

import random

import pytest

from btq.curves import (
    CurveConfig,
    EllClosedPoint,
    UnsupportedConfiguration,
    elliptic_config,
    enumerate_closed_points,
    kummer,
    kummer_of_invariants,
    kummer_size_from_group,
    nagata,
    nagata_report,
    p1_config,
    unit_divisor_vector,
    units_group,
)
from btq.ellfun import EllPoint
from btq.exact import FgAbGroup, Place, Poly, gf, monic_irreducibles, parse_poly


def _pl(F, s):
    return Place.infinity(F) if s == "inf" else Place.finite(parse_poly(F, s))


def cfg_p1(q, *puncture_strs):
    F = gf(q)
    return p1_config(q, [_pl(F, s) for s in puncture_strs])


def test_closed_points_p1_f2():
    pts = enumerate_closed_points(cfg_p1(2, "inf"), 2)
    deg1 = [P for P in pts if P.degree == 1]
    deg2 = [P for P in pts if P.degree == 2]
    assert len(deg1) == 3  # t, t+1, infinity
    assert len(deg2) == 1  # t^2+t+1 (exhaustive irreducibility testing)
    assert all(P.is_infinite or P.pi.is_irreducible() for P in pts)


def test_closed_points_p1_f3_degree1():
    pts = enumerate_closed_points(cfg_p1(3, "inf"), 1)
    assert len(pts) == 4  # |P^1(F_3)|


def test_closed_points_elliptic_f5():
    cfg = elliptic_config(5, (0, 0, 0, -1, 0), [EllClosedPoint.origin()])  # y^2=x^3-x
    pts = enumerate_closed_points(cfg, 1)
    assert len(pts) == 8  # |E(F_5)| by brute-force enumeration incl. origin
    deg2 = [P for P in enumerate_closed_points(cfg, 2) if P.degree == 2]
    # #E(F_25) = 25 + 1 - a^2 + 2*... consistency: exact-degree-2 orbits
    E2 = cfg.arith_over(2)
    n2 = len(E2.points())
    assert len(deg2) == (n2 - 8) // 2


def test_nagata_p1_two_rational():
    rep = nagata_report(cfg_p1(3, "t", "inf"))
    pic = rep["pic"]
    assert pic.pic_c.is_trivial
    assert pic.unit_rank == 1
    assert rep["ok"]
    # generator realizes div(t) = (0) - (inf)
    u = rep["units"][0]
    assert sorted(u.vector) == [-1, 1]


def test_nagata_p1_degree2_puncture_f3():
    rep = nagata_report(cfg_p1(3, "t^2+1"))
    pic = rep["pic"]
    assert pic.pic_c == FgAbGroup(0, (2,))
    assert pic.unit_rank == 0
    assert rep["ok"]


def test_nagata_elliptic_origin_only():
    cfg = elliptic_config(5, (0, 0, 0, -1, 0), [EllClosedPoint.origin()])
    rep = nagata_report(cfg)
    pic = rep["pic"]
    # Pic(C) = (Z + E(F_5))/<[O]-class>: abstractly E(F_5) = Z/2 x Z/4
    assert pic.pic_c == FgAbGroup(0, (2, 4))
    assert pic.unit_rank == 0
    assert rep["ok"]


def test_nagata_more_configs():
    for cfg in [
        cfg_p1(2, "t", "inf"),
        cfg_p1(2, "t", "t+1", "inf"),
        cfg_p1(5, "t", "inf"),
        cfg_p1(5, "t^2+2"),
        cfg_p1(2, "t^2+t+1", "inf"),
    ]:
        rep = nagata_report(cfg)
        assert rep["ok"], cfg
        assert rep["pic"].unit_rank == cfg.s - 1


def test_nagata_elliptic_two_punctures():
    # y^2 = x^3 - x over F_5, punctures O and (0,0) (a 2-torsion point)
    cfg = elliptic_config(
        5, (0, 0, 0, -1, 0),
        [EllClosedPoint.origin(), EllClosedPoint(1, [EllPoint(0, 0)])],
    )
    rep = nagata_report(cfg)
    assert rep["ok"]
    pic = rep["pic"]
    assert pic.unit_rank == 1
    u = rep["units"][0]
    vec = unit_divisor_vector(cfg, u)
    assert sorted(vec) == [-2, 2]  # div(x) = 2(0,0) - 2(O) up to sign


def test_nagata_elliptic_second_curve():
    # y^2 = x^3 + x + 1 over F_5
    cfg = elliptic_config(5, (0, 0, 0, 1, 1), [EllClosedPoint.origin()])
    rep = nagata_report(cfg)
    assert rep["ok"]
    E = cfg.arith()
    assert rep["pic"].pic_c.order() == len(E.points())


def test_elliptic_unit_supported_on_punctures_only():
    cfg = elliptic_config(
        5, (0, 0, 0, -1, 0),
        [EllClosedPoint.origin(), EllClosedPoint(1, [EllPoint(0, 0)])],
    )
    units = units_group(cfg)
    pf = units[0].func_ell
    E = cfg.arith()
    for pt in E.points():
        if pt.infinite or pt == EllPoint(0, 0):
            continue
        assert pf.valuation(pt) == 0
    # and at a few non-rational points (evaluated over the extension)
    E2 = cfg.arith_over(2)
    others = [p for p in E2.points() if not p.infinite and p.x >= 5][:10]
    for pt in others:
        assert pf.valuation(pt, E2) == 0


def test_p1_units_three_punctures():
    cfg = cfg_p1(3, "t", "t+2", "inf")  # 0, 1, infinity over F_3
    units = units_group(cfg)
    assert len(units) == 2
    F = gf(3)
    rng = random.Random(1)
    other = [Place.finite(f) for f in monic_irreducibles(F, 3)
             if f.coeffs not in ((0, 1), (2, 1))]
    for u in units:
        f = u.func_p1
        for P in rng.sample(other, 12):
            assert P.valuation(f) == 0


def test_p1_unit_degree2_with_infinity():
    cfg = cfg_p1(3, "t^2+1", "inf")
    units = units_group(cfg)
    assert len(units) == 1
    vec = unit_divisor_vector(cfg, units[0])
    assert vec in ((1, -2), (-1, 2))  # div(t^2+1) = (t^2+1) - 2(inf)


def test_kummer_examples():
    assert len(kummer_of_invariants((3,))) == 2
    assert len(kummer_of_invariants((2,))) == 2
    assert len(kummer_of_invariants((8,))) == 5
    for factors in [(3,), (2,), (8,), (2, 4), (12,)]:
        ks = kummer_of_invariants(factors)
        g = FgAbGroup(0, tuple(d for d in factors if d > 1))
        assert len(ks) == kummer_size_from_group(g)
        assert sum(len(o) for o in ks.orbits) == g.order()


def test_kummer_of_config():
    pic = nagata(cfg_p1(3, "t^2+1"))
    ks = kummer(pic)
    assert len(ks) == 2
    assert ks.fixed_count == 2  # both elements of Z/2 are 2-torsion


def test_invalid_configs():
    F = gf(3)
    with pytest.raises(UnsupportedConfiguration):
        CurveConfig(3, "genus2", (Place.infinity(F),))
    with pytest.raises(UnsupportedConfiguration):
        p1_config(3, [])
    with pytest.raises(UnsupportedConfiguration):
        p1_config(3, [Place.infinity(F), Place.infinity(F)])
    with pytest.raises(UnsupportedConfiguration):
        elliptic_config(5, (0, 0, 0, 0, 0), [EllClosedPoint.origin()])  # singular


def test_im_phi_cap_pic0_exposure():
    cfg = elliptic_config(
        5, (0, 0, 0, -1, 0),
        [EllClosedPoint.origin(), EllClosedPoint(1, [EllPoint(0, 0)])],
    )
    pic = nagata(cfg)
    data = pic.im_phi_cap_pic0()
    # (0,0) - O generates a subgroup of order 2 inside E(F_5)
    assert data["order"] == 2
    assert data["pic0_c"].order() == 4
