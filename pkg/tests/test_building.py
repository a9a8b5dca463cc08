"""Product building: links, balls, apartment spheres, antipodal quotients."""

import pytest

from btq.building import (
    BuildingCube,
    antipodal_quotient,
    apartment_link,
    ball,
    ball_complex,
    base_building_vertex,
    vertex_link,
)
from btq.exact import FgAbGroup, Place, Poly, gf, parse_poly


def _places_rational(q, n):
    F = gf(q)
    out = [Place.infinity(F)]
    for f in [Poly.x(F), parse_poly(F, "t+1"), parse_poly(F, "t+2")]:
        if len(out) >= n:
            break
        out.append(Place.finite(f))
    return out[:n]


def test_vertex_link_bipartite_f2():
    v = base_building_vertex(_places_rational(2, 2))
    lk = vertex_link(v)
    assert lk.simplex_count(0) == 6
    assert lk.simplex_count(1) == 9  # K_{3,3}
    assert lk.simplex_count(2) == 0


def test_vertex_link_s1():
    v = base_building_vertex(_places_rational(3, 1))
    lk = vertex_link(v)
    assert lk.simplex_count(0) == 4
    assert lk.simplex_count(1) == 0


def test_vertex_link_s3_f2():
    v = base_building_vertex(_places_rational(2, 3))
    lk = vertex_link(v)
    assert lk.simplex_count(2) == 27
    assert lk.simplex_count(1) == 3 * 9
    assert len(lk.simplices(2)) == 27


def test_ball_radius0():
    v = base_building_vertex(_places_rational(2, 2))
    verts, cubes = ball(v, 0)
    assert verts == [v]
    assert 1 not in cubes


def test_ball_s1_tree_counts():
    v = base_building_vertex(_places_rational(2, 1))
    verts, cubes = ball(v, 2)
    assert len(verts) == 10  # 1+3+6
    assert len(cubes.get(1, [])) == 9


def test_ball_s2_radius1_no_squares():
    v = base_building_vertex(_places_rational(2, 2))
    verts, cubes = ball(v, 1)
    assert len(verts) == 7
    assert len(cubes.get(1, [])) == 6
    assert len(cubes.get(2, [])) == 0  # L^1 ball of radius 1 has no 2-cubes


def test_ball_closed_under_faces_and_d2():
    v = base_building_vertex(_places_rational(2, 2))
    cx = ball_complex(v, 2)
    assert cx.n_cells(2) > 0
    assert cx.chain_complex().check_complex()
    # faces of every cube present
    _, cubes = ball(v, 2)
    listed = {d: set(cs) for d, cs in cubes.items()}
    for d in (2, 1):
        for c in cubes.get(d, []):
            for f, _ in c.faces():
                assert f in listed[d - 1]


def test_cube_determined_by_corners():
    v = base_building_vertex(_places_rational(2, 2))
    _, cubes = ball(v, 2)
    seen = {}
    for d, cs in cubes.items():
        for c in cs:
            key = frozenset(x.sort_key() for x in c.corners())
            assert key not in seen, "two cubes share a corner set"
            seen[key] = c
            # reconstruction: canonical form from any corner labeling
            if d >= 1:
                rebuilt = BuildingCube(c.corners()[-1], c.dirs,
                                       [c.base.parts[i] for i in c.dirs])
                assert rebuilt == c


def test_ball_is_contractible_window():
    v = base_building_vertex(_places_rational(2, 2))
    h = ball_complex(v, 2).homology()
    assert h[0] == FgAbGroup(1)
    assert h[1].is_trivial and h[2].is_trivial


@pytest.mark.parametrize("s", [1, 2, 3, 4, 5])
def test_apartment_sphere_homology(s):
    h = apartment_link(s).homology()
    if s == 1:
        assert h[0] == FgAbGroup(2)  # S^0
        return
    assert h[0] == FgAbGroup(1)
    for k in range(1, s - 1):
        assert h[k].is_trivial
    assert h[s - 1] == FgAbGroup(1)


def test_apartment_square_counts():
    K = apartment_link(2)
    assert K.n_cells(0) == 4 and K.n_cells(1) == 4


def test_antipodal_quotient_s2_circle():
    cx = antipodal_quotient(2)
    h = cx.homology()
    assert h[0] == FgAbGroup(1)
    assert h[1] == FgAbGroup(1)


def test_antipodal_quotient_s3_rp2():
    cx = antipodal_quotient(3)
    assert cx.chain_complex().check_complex()
    h = cx.homology()
    assert h[0] == FgAbGroup(1)
    assert h[1] == FgAbGroup(0, (2,))
    assert h[2].is_trivial
    # cross-check against the standard projective-plane chain complex
    assert (cx.n_cells(0), cx.n_cells(1), cx.n_cells(2)) == (3, 6, 4)


def test_antipodal_quotient_s1_point():
    cx = antipodal_quotient(1)
    assert cx.n_cells(0) == 1 and cx.n_cells(1) == 0


def test_antipodal_quotient_s4_rp3():
    h = antipodal_quotient(4).homology()
    assert h[0] == FgAbGroup(1)
    assert h[1] == FgAbGroup(0, (2,))
    assert h[2].is_trivial
    assert h[3] == FgAbGroup(1)  # orientable top
