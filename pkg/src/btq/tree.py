"""The Bruhat-Tits tree of SL_2 at one place of F_q(t).

Vertices are lattice classes in K^2 (K = F_q(t)); all coordinates are
taken relative to the standard basis of K^2, fixed once and for all.
A class has a unique canonical representative

    [[pi^m, u], [0, 1]],   u reduced modulo pi^m

where u is a finite pi-adic tail (exponents below m, residue lifts of
degree < deg P).  Canonical coordinates make equality, hashing and
orbit bookkeeping O(1); agreement with the matrix-equivalence oracle is
enforced in the test suite rather than assumed.
"""

from .exact import RF, Place, Poly
from .exact.places import padic_expand


class TreeVertex:
    """Canonical lattice-class coordinates (m, tail) at a place."""

    __slots__ = ("place", "m", "tail", "_hash")

    def __init__(self, place: Place, m: int, tail=()):
        self.place = place
        self.m = m
        self.tail = tuple(sorted((e, c) for e, c in tail if c))
        for e, c in self.tail:
            if e >= m:
                raise ValueError("tail exponent not reduced modulo pi^m")
            if c.degree >= place.degree:
                raise ValueError("tail coefficient is not a residue lift")
        self._hash = hash((self.place, self.m, tuple((e, c.coeffs) for e, c in self.tail)))

    @property
    def vertex_type(self) -> int:
        """Type = valuation of the lattice determinant mod 2."""
        return self.m % 2

    def __eq__(self, other):
        return (
            isinstance(other, TreeVertex)
            and self.place == other.place
            and self.m == other.m
            and self.tail == other.tail
        )

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return (self.m, tuple((e, c.coeffs) for e, c in self.tail))

    def __repr__(self):
        if not self.tail:
            return f"({self.m},0)"
        u = "+".join(f"[{c}]pi^{e}" for e, c in self.tail)
        return f"({self.m},{u})"

    def label(self) -> str:
        return repr(self)

    def tail_function(self) -> RF:
        """The tail as an element of K."""
        return self.place.from_expansion(self.tail)

    def matrix(self) -> "LatticeMatrix":
        """Canonical representative [[pi^m, u],[0,1]]."""
        F = self.place.field
        pi = self.place.uniformizer()
        return LatticeMatrix(
            (pi**self.m, self.tail_function(), RF.zero(F), RF.one(F)), self.place
        )


class LatticeMatrix:
    """2x2 invertible matrix over K read as a lattice basis at a place."""

    __slots__ = ("a", "b", "c", "d", "place")

    def __init__(self, entries, place: Place):
        self.a, self.b, self.c, self.d = entries
        self.place = place

    def det(self) -> RF:
        return self.a * self.d - self.b * self.c

    def mul(self, other: "LatticeMatrix") -> "LatticeMatrix":
        return LatticeMatrix(
            (
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            ),
            self.place,
        )

    def inverse(self) -> "LatticeMatrix":
        dt = self.det()
        if dt.is_zero():
            raise ValueError("singular matrix")
        return LatticeMatrix(
            (self.d / dt, -(self.b / dt), -(self.c / dt), self.a / dt), self.place
        )

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


def canonicalize(M: LatticeMatrix) -> TreeVertex:
    """Canonical coordinates of the lattice class spanned by the columns.

    Hermite-style column reduction over O_P followed by K^x scaling.
    """
    P = M.place
    a, b, c, d = M.entries()
    if (a * d - b * c).is_zero():
        raise ValueError("singular matrix does not span a lattice")
    # arrange the bottom-row entry of minimal valuation into position d
    if d.is_zero() or (not c.is_zero() and P.valuation(c) < P.valuation(d)):
        a, b = b, a
        c, d = d, c
    if not c.is_zero():
        f = c / d  # in O_P
        a = a - f * b
        c = RF.zero(P.field)
    # scale to make the bottom-right entry 1
    A = a / d
    B = b / d
    m = P.valuation(A)
    tail = tuple((e, cf) for e, cf in padic_expand(B, P, m)) if not B.is_zero() else ()
    return TreeVertex(P, m, tail)


def matrix_equivalent(M1: LatticeMatrix, M2: LatticeMatrix) -> bool:
    """Oracle for lattice-class equality: M1^{-1} M2 lands in GL_2(O_P)
    after scaling by pi^{-min entry valuation}."""
    P = M1.place
    N = M1.inverse().mul(M2)
    vals = [P.valuation(x) for x in N.entries() if not x.is_zero()]
    if not vals:
        return False
    shift = -min(vals)
    det_val = P.valuation(N.det()) + 2 * shift
    return det_val == 0


def link(v: TreeVertex):
    """The q_P + 1 neighbors, in deterministic order.

    Children first (one per residue lift, lifts ordered by encoding),
    then the neighbor one level down.
    """
    P = v.place
    F = P.field
    q_v = F.q**P.degree
    out = []
    for code in range(q_v):
        lift = _lift_from_code(F, P.degree, code)
        tail = dict(v.tail)
        if not lift.is_zero():
            tail[v.m] = lift
        out.append(TreeVertex(P, v.m + 1, tail.items()))
    down_tail = tuple((e, c) for e, c in v.tail if e < v.m - 1)
    out.append(TreeVertex(P, v.m - 1, down_tail))
    return out


def _lift_from_code(F, degree, code):
    coeffs = []
    for _ in range(degree):
        coeffs.append(code % F.q)
        code //= F.q
    return Poly(F, coeffs)


def residue_lifts(P: Place):
    """All residue lifts at P (polynomials of degree < deg P), in order."""
    F = P.field
    return [_lift_from_code(F, P.degree, code) for code in range(F.q**P.degree)]


def link_direction(v: TreeVertex, w: TreeVertex):
    """Identify the link coordinate of a neighbor w of v.

    Returns the residue lift (a Poly) for the q_v affine directions or
    the string "inf" for the downward direction; raises if not adjacent.
    """
    if w.m == v.m - 1:
        if w == TreeVertex(v.place, v.m - 1, tuple((e, c) for e, c in v.tail if e < v.m - 1)):
            return "inf"
    elif w.m == v.m + 1:
        tail = dict(w.tail)
        lift = tail.pop(v.m, Poly.zero(v.place.field))
        if tuple(sorted(tail.items())) == v.tail:
            return lift
    raise ValueError("vertices are not adjacent")


def neighbor(v: TreeVertex, direction):
    """Neighbor of v in a link direction (lift Poly or "inf")."""
    if direction == "inf":
        return TreeVertex(v.place, v.m - 1, tuple((e, c) for e, c in v.tail if e < v.m - 1))
    tail = dict(v.tail)
    if direction.is_zero():
        tail.pop(v.m, None)
    else:
        tail[v.m] = direction
    return TreeVertex(v.place, v.m + 1, tail.items())


def base_vertex(P: Place) -> TreeVertex:
    """The class of the standard lattice O_P^2."""
    return TreeVertex(P, 0, ())


def distance(v1: TreeVertex, v2: TreeVertex) -> int:
    """Graph distance in closed form.

    Vertices correspond to balls u + pi^m O_P in K_P; the geodesic
    passes through the smallest common ball, at level
    j = min(m1, m2, v(u1 - u2)).  BFS agreement is a test invariant.
    """
    if v1.place != v2.place:
        raise ValueError("vertices live in trees at different places")
    if v1 == v2:
        return 0
    u1, u2 = v1.tail_function(), v2.tail_function()
    diff = u1 - u2
    if diff.is_zero():
        j = min(v1.m, v2.m)
    else:
        j = min(v1.m, v2.m, v1.place.valuation(diff))
    return (v1.m - j) + (v2.m - j)


def distance_bfs(v1: TreeVertex, v2: TreeVertex, cap: int = 64) -> int:
    """Reference implementation by breadth-first search."""
    if v1.place != v2.place:
        raise ValueError("vertices live in trees at different places")
    frontier = {v1}
    seen = {v1}
    d = 0
    while d <= cap:
        if v2 in frontier:
            return d
        frontier = {w for u in frontier for w in link(u)} - seen
        seen |= frontier
        d += 1
    raise RuntimeError("BFS cap exceeded")


def ball(center: TreeVertex, r: int):
    """Vertices within distance r, as {vertex: distance}."""
    out = {center: 0}
    frontier = [center]
    for d in range(1, r + 1):
        nxt = []
        for v in frontier:
            for w in link(v):
                if w not in out:
                    out[w] = d
                    nxt.append(w)
        frontier = nxt
    return out


def tree_ball_edges(vertices):
    """Edges of the tree induced on a vertex set (canonical order)."""
    vs = set(vertices)
    edges = set()
    for v in vs:
        for w in link(v):
            if w in vs:
                edges.add(tuple(sorted((v, w), key=TreeVertex.sort_key)))
    return sorted(edges, key=lambda e: (e[0].sort_key(), e[1].sort_key()))


def scalar_scale(M: LatticeMatrix, lam: RF) -> LatticeMatrix:
    return LatticeMatrix((M.a * lam, M.b * lam, M.c * lam, M.d * lam), M.place)
