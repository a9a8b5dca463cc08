"""Building cells and rank-2 bundles on the projective line.

Every building vertex (L_1, ..., L_s) determines a rank-2 bundle: the
subsheaf of K^2 with the given stalks at the punctures and O_Q^2
elsewhere.  On P^1 such a bundle splits, and its split type relative to
puncture twists is the complete orbit invariant for GL_2(k[C]); adding
the determinant-type data makes it complete for SL_2(k[C]).

The classification here is exact linear algebra, not search: section
spaces of twists are computed over F_q, the first twist level with
sections is located, and the maximal line degree is read off from the
(small) projective space of sections.  The section pair of maximal and
complementary line degree is a splitting frame; frames drive stabilizer
generators, link actions, parabolicity tests and quotient computation.
"""

from dataclasses import dataclass
from itertools import combinations
from math import gcd as _gcd

from .building import (
    BuildingCube,
    BuildingVertex,
    ball as building_ball,
    base_building_vertex,
)
from .curves import CurveConfig, nagata
from .exact import RF, Place, Poly, gf
from .exact.gfsolve import kernel as gf_kernel
from .exact.poly import monic_polys
from .tree import LatticeMatrix, TreeVertex, link_direction, residue_lifts

# --- rational-vector utilities ---------------------------------------------


def _vec_is_zero(w):
    return w[0].is_zero() and w[1].is_zero()


def normalize_vector(w):
    """Scale (f, g) in K^2 to a coprime polynomial pair, monic leader."""
    f, g = w
    F = f.field
    den = f.den * g.den
    a = f.num * g.den
    b = g.num * f.den
    if a.is_zero() and b.is_zero():
        raise ValueError("zero vector")
    gc = a.gcd(b) if (not a.is_zero() and not b.is_zero()) else (b if a.is_zero() else a)
    if not gc.is_constant() and not gc.is_zero():
        a, b = a // gc, b // gc
    lead = (a if not a.is_zero() else b).leading()
    inv = F.inv(lead)
    return (RF(a.scale(inv)), RF(b.scale(inv)))


def mat_vec(M: LatticeMatrix, w):
    return (M.a * w[0] + M.b * w[1], M.c * w[0] + M.d * w[1])


def cap_at_place(M: LatticeMatrix, P: Place, w) -> int:
    """Largest m with pi^{-m} w inside the lattice M O_P^2."""
    u = mat_vec(M.inverse(), w)
    vals = [P.valuation(x) for x in u if not x.is_zero()]
    return min(vals)


def fiber_at_place(M: LatticeMatrix, P: Place, w):
    """Direction of the line through w in the residue plane L/piL,
    in the link coordinates of the canonical basis: a projective pair
    (r0, r1) of residue lifts, normalized."""
    u = mat_vec(M.inverse(), w)
    c = cap_at_place(M, P, w)
    pi = P.uniformizer()
    scaled = tuple(x * pi ** (-c) for x in u)
    r0 = P.residue(scaled[0]) if not scaled[0].is_zero() else Poly.zero(P.field)
    r1 = P.residue(scaled[1]) if not scaled[1].is_zero() else Poly.zero(P.field)
    return _proj_normalize(P, (r0, r1))


def _proj_normalize(P: Place, pair):
    """Canonical representative of a projective residue pair: second
    coordinate 1 when nonzero (affine points), else (1, 0)."""
    r0, r1 = pair
    if not r1.is_zero():
        inv = r1.inverse_mod(P.pi) if P.pi is not None else Poly.const(P.field, P.field.inv(r1.coeffs[0]))
        r0n = (r0 * inv) % P.pi if P.pi is not None else r0.scale(P.field.inv(r1.coeffs[0]))
        return (r0n, Poly.one(P.field))
    if r0.is_zero():
        raise ValueError("zero residue pair")
    return (Poly.one(P.field), Poly.zero(P.field))


def direction_to_fiber(P: Place, direction):
    """Link direction (lift or "inf") as a projective residue pair."""
    if direction == "inf":
        return (Poly.one(P.field), Poly.zero(P.field))
    return (direction, Poly.one(P.field))


# --- divisor-style section spaces on P^1 ------------------------------------


def riemann_roch_basis(F, finite_coeffs: dict, inf_coeff: int):
    """Basis of L(D) on P^1 for D = sum n_P P + n_inf inf.

    finite_coeffs maps monic irreducible Poly -> integer coefficient.
    Elements are rational functions with poles bounded by D.
    """
    den = Poly.one(F)
    forced = Poly.one(F)
    for pi, n in finite_coeffs.items():
        for _ in range(abs(n)):
            if n > 0:
                den = den * pi
            else:
                forced = forced * pi
    max_deg = den.degree + inf_coeff
    out = []
    k = forced.degree
    shift = forced
    while k <= max_deg:
        out.append(RF(shift, den))
        shift = shift * Poly.x(F)
        k += 1
    return out


class VertexBundle:
    """The bundle data of a building vertex: lattice matrices per place."""

    def __init__(self, config: CurveConfig, v: BuildingVertex):
        if config.kind != "p1":
            raise ValueError("the building/bundle dictionary is restricted to P^1")
        self.config = config
        self.v = v
        self.places = list(config.punctures)
        self.mats = [p.matrix() for p in v.parts]
        self.inv_mats = [m.inverse() for m in self.mats]
        self.levels = [p.m for p in v.parts]
        self.degree = -sum(P.degree * m for P, m in zip(self.places, self.levels))
        self._depths = None
        self._row_cache = {}

    def distance_bound(self) -> int:
        """Sum of weighted tree distances to the base vertex: bounds the
        degree gap of the split type."""
        total = 0
        for P, tv in zip(self.places, self.v.parts):
            vals = [e for e, _ in tv.tail]
            j = min([0, tv.m] + vals)
            total += P.degree * ((0 - j) + (tv.m - j))
        return total

    def depths(self):
        if self._depths is None:
            out = []
            for P, M, Minv in zip(self.places, self.mats, self.inv_mats):
                vals = [
                    P.valuation(x)
                    for x in list(M.entries()) + list(Minv.entries())
                    if not x.is_zero()
                ]
                out.append(max(0, -min(vals)))
            self._depths = out
        return self._depths

    def _condition_rows(self, h: RF, slot: int):
        """Cached integrality-condition fragments for the ansatz vector
        with h in the given component: list of (place, exp, digit, value)."""
        key = (h, slot)
        hit = self._row_cache.get(key)
        if hit is not None:
            return hit
        frags = []
        for pidx, (P, Minv) in enumerate(zip(self.places, self.inv_mats)):
            pair = (Minv.a, Minv.c) if slot == 0 else (Minv.b, Minv.d)
            for comp in range(2):
                u = pair[comp] * h
                if u.is_zero():
                    continue
                for e, c in P.expand(u, 0):
                    for j, digit in enumerate(_lift_digits(P, c)):
                        if digit:
                            frags.append(((pidx, comp, e, j), digit))
        self._row_cache[key] = frags
        return frags

    def section_space(self, twists: dict):
        """F_q-basis of {w in K^2 : w in L_i at punctures, v_Q(w) >= -twists
        at the twist places, integral elsewhere}."""
        F = self.config.base_field()
        scalars = self._scalar_space(twists)
        if not scalars:
            return []
        ansatz = [(h, 0) for h in scalars] + [(h, 1) for h in scalars]
        rows = {}
        for k, (h, slot) in enumerate(ansatz):
            for key, digit in self._condition_rows(h, slot):
                rows.setdefault(key, [0] * len(ansatz))[k] = digit
        conditions = list(rows.values())
        coeffs = gf_kernel(F, conditions, ncols=len(ansatz))
        zero = RF.zero(F)
        out = []
        for vec in coeffs:
            w = [zero, zero]
            for c, (h, slot) in zip(vec, ansatz):
                if c:
                    w[slot] = w[slot] + RF.const(F, c) * h
            out.append(tuple(w))
        return out

    def _scalar_space(self, twists: dict):
        F = self.config.base_field()
        finite = {}
        inf_coeff = 0
        for P, depth in zip(self.places, self.depths()):
            if P.is_infinite:
                inf_coeff += depth
            else:
                finite[P.pi] = depth
        for Q, n in twists.items():
            if Q.is_infinite:
                inf_coeff += n
            else:
                finite[Q.pi] = finite.get(Q.pi, 0) + n
        return riemann_roch_basis(F, finite, inf_coeff)

    def line_degree(self, w) -> int:
        """Exact degree of the saturated line bundle through w."""
        f, g = normalize_vector(w)
        total = 0
        infinity_is_puncture = any(P.is_infinite for P in self.places)
        for P, M in zip(self.places, self.mats):
            total += P.degree * cap_at_place(M, P, (f, g))
        if not infinity_is_puncture:
            total -= max(f.num.degree, g.num.degree)
        return total


def _lift_digits(P: Place, c: Poly):
    """Residue lift as a vector over the prime-base field (length deg P)."""
    d = P.degree
    cs = list(c.coeffs) + [0] * (d - len(c.coeffs))
    return cs[:d]


def twist_place(config: CurveConfig) -> Place:
    """Smallest-degree place not among the punctures (infinity preferred)."""
    F = config.base_field()
    punctured = set(config.punctures)
    inf = Place.infinity(F)
    if inf not in punctured:
        return inf
    for d in range(1, 4):
        for f in monic_polys(F, d):
            if f.is_irreducible():
                P = Place.finite(f)
                if P not in punctured:
                    return P
    raise RuntimeError("no twist place of degree <= 3 available")


# --- bundle classes ----------------------------------------------------------


@dataclass(frozen=True)
class BundleClass:
    """Split type rel boundary twists: n = degree gap >= 0 (type
    O(-n) + O after normalization), tau = total degree mod 2*gcd(d_i)."""

    n: int
    tau: int
    twist_gcd: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("degree gap must be nonnegative")

    def kummer_label(self):
        """The index of the component: {a, -a} mod gcd with 2a = tau + n."""
        g = self.twist_gcd
        if g == 1:
            return frozenset({0})
        a = (self.tau + self.n) // 2 % g if (self.tau + self.n) % 2 == 0 else None
        if a is None:
            # tau and n always share parity for vertices; guard anyway
            raise ValueError("incompatible parity in bundle class")
        return frozenset({a % g, (-a) % g})

    def __str__(self):
        return f"O(-{self.n})+O [deg={self.tau} mod {2*self.twist_gcd}]"


@dataclass
class SplittingFrame:
    """Exact splitting E = L_a + L_b with deg L_a >= deg L_b.

    Vectors are coprime polynomial pairs; caps are per-place lattice
    depths; the frame certificate is deg L_a + deg L_b = deg E.
    """

    w_a: tuple
    w_b: tuple
    deg_a: int
    deg_b: int

    def matrix(self, place: Place) -> LatticeMatrix:
        return LatticeMatrix(
            (self.w_a[0], self.w_b[0], self.w_a[1], self.w_b[1]), place
        )


def classify_vertex(v: BuildingVertex, config: CurveConfig,
                    want_frame: bool = False):
    """Split type of the bundle of v (and optionally a splitting frame).

    Scans twist levels at an auxiliary place until sections exist; the
    maximal line degree over the (projectivized) section space is the
    larger slope, certified because the destabilizing line contributes
    sections at the first level.
    """
    vb = VertexBundle(config, v)
    R = twist_place(config)
    delta = R.degree
    deg = vb.degree
    # the degree gap is at most the weighted distance to the base vertex,
    # so the larger slope a lies in [ceil(deg/2), (deg + n_max)/2]
    n_max = vb.distance_bound()
    a_hi = (deg + n_max) // 2
    j = -(a_hi // delta) - 1  # one step before the earliest possible jump
    sections = []
    cap_scan = (n_max // delta) + 2 * delta + 8
    for _ in range(cap_scan):
        sections = vb.section_space({R: j})
        if sections:
            break
        j += 1
    if not sections:
        raise RuntimeError("section scan failed; depth bound too small")
    best_w, best_deg = _max_line_degree(vb, sections, j, delta)
    a = best_deg
    n = 2 * a - deg
    g = _gcd_list([P.degree for P in vb.places])
    cls = BundleClass(n, deg % (2 * g), g)
    if not want_frame:
        return cls
    frame = _complete_frame(vb, R, j, best_w, a)
    return cls, frame


def _max_line_degree(vb: VertexBundle, sections, j0: int, delta: int):
    """Maximal line degree over the first-jump section space.

    Every section here spans a line of degree in [-delta*j0, a], and the
    destabilizing line contributes sections, so the maximum is the larger
    slope.  For a degree-1 twist place the window is a single value and
    any section realizes it.
    """
    if delta == 1:
        w = sections[0]
        return normalize_vector(w), vb.line_degree(w)
    F = vb.config.base_field()
    upper = -delta * j0 + delta - 1
    best = None
    best_deg = None
    for w in _projective_combinations(F, sections):
        d = vb.line_degree(w)
        if best_deg is None or d > best_deg:
            best, best_deg = w, d
            if best_deg == upper:
                break
    return normalize_vector(best), best_deg


def _projective_combinations(F, basis):
    """All nonzero combinations modulo scalars (first nonzero coeff = 1)."""
    q = F.q
    k = len(basis)
    out = []
    for lead in range(k):
        tails = [[]]
        for _ in range(k - lead - 1):
            tails = [t + [c] for t in tails for c in range(q)]
        for t in tails:
            coeffs = [0] * lead + [1] + t
            w0 = RF.zero(F)
            w1 = RF.zero(F)
            for c, w in zip(coeffs, basis):
                if c:
                    cc = RF.const(F, c)
                    w0 = w0 + cc * w[0]
                    w1 = w1 + cc * w[1]
            out.append((w0, w1))
    return out


def _complete_frame(vb: VertexBundle, R: Place, j0: int, w_a, a: int):
    """Find the complementary line: first twist level with a section
    K-independent of w_a; independent sections at that level attain the
    complementary degree (enumeration stops at the first one that does)."""
    deg = vb.degree
    b_target = deg - a
    j = j0
    F = vb.config.base_field()
    for _ in range(4 * (a - b_target + 2) + 8):
        sections = vb.section_space({R: j})
        if any(not _k_dependent(w_a, w) for w in sections):
            best, best_deg = None, None
            for w in sections:
                if _k_dependent(w_a, w):
                    continue
                d = vb.line_degree(w)
                if d == b_target:
                    return SplittingFrame(w_a, normalize_vector(w), a, b_target)
                if best_deg is None or d > best_deg:
                    best, best_deg = w, d
            for w in _projective_combinations(F, sections):
                if _k_dependent(w_a, w):
                    continue
                d = vb.line_degree(w)
                if d == b_target:
                    return SplittingFrame(w_a, normalize_vector(w), a, b_target)
                if best_deg is None or d > best_deg:
                    best, best_deg = w, d
            raise RuntimeError(
                f"frame completion found degree {best_deg}, expected {b_target}"
            )
        j += 1
    raise RuntimeError("no complementary section found in scan window")


def _k_dependent(w1, w2) -> bool:
    return (w1[0] * w2[1] - w1[1] * w2[0]).is_zero()


def _gcd_list(xs):
    g = 0
    for x in xs:
        g = _gcd(g, x)
    return g


# --- stabilizers from frames -------------------------------------------------


class ResidueRing:
    """Arithmetic in the residue field k(P) = F_q[t]/pi (lifts of degree
    < deg P), or constants for the place at infinity."""

    def __init__(self, P: Place):
        self.P = P
        self.F = P.field

    def of_rf(self, f: RF) -> Poly:
        return self.P.residue(f)

    def mul(self, a: Poly, b: Poly) -> Poly:
        c = a * b
        return c % self.P.pi if self.P.pi is not None else c

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def inv(self, a: Poly) -> Poly:
        if a.is_zero():
            raise ZeroDivisionError
        if self.P.pi is None:
            return Poly.const(self.F, self.F.inv(a.coeffs[0]))
        return a.inverse_mod(self.P.pi)

    def elements(self):
        return residue_lifts(self.P)

    def proj_points(self):
        """P^1(k(P)): affine lifts plus infinity, as projective pairs."""
        one = Poly.one(self.F)
        pts = [(x, one) for x in self.elements()]
        pts.append((one, Poly.zero(self.F)))
        return pts

    def proj_eq(self, p1, p2) -> bool:
        return (self.mul(p1[0], p2[1]) - self.mul(p1[1], p2[0])).is_zero()

    def proj_canon(self, p):
        a, b = p
        if not b.is_zero():
            return (self.mul(a, self.inv(b)), Poly.one(self.F))
        return (Poly.one(self.F), Poly.zero(self.F))

    def mat_apply(self, M, p):
        """M a 2x2 tuple of residue lifts acting on a projective pair."""
        a, b, c, d = M
        return self.proj_canon(
            (self.add(self.mul(a, p[0]), self.mul(b, p[1])),
             self.add(self.mul(c, p[0]), self.mul(d, p[1])))
        )

    def mat_mul(self, M, N):
        a, b, c, d = M
        e, f, g, h = N
        return (
            self.add(self.mul(a, e), self.mul(b, g)),
            self.add(self.mul(a, f), self.mul(b, h)),
            self.add(self.mul(c, e), self.mul(d, g)),
            self.add(self.mul(c, f), self.mul(d, h)),
        )

    def mat_inv(self, M):
        a, b, c, d = M
        det = self.sub(self.mul(a, d), self.mul(b, c))
        di = self.inv(det)
        return (
            self.mul(d, di),
            self.mul(self.sub(Poly.zero(self.F), b), di),
            self.mul(self.sub(Poly.zero(self.F), c), di),
            self.mul(a, di),
        )

    def mat_of_lattice(self, M: LatticeMatrix):
        """Reduce an integral unit-determinant matrix."""
        return tuple(self.of_rf(x) for x in M.entries())


class VertexStabilizer:
    """Stabilizer data of a building vertex, derived from a splitting frame.

    The automorphism group of the bundle in the frame basis is
    [[alpha, f],[h, beta]] with f in Hom(L_b, L_a)... transposed per the
    degree gap: for n > 0 only the Hom(L_b -> L_a) side survives,
    realized by the section space of the cap-difference divisor.
    """

    def __init__(self, vb: VertexBundle, frame: SplittingFrame):
        self.vb = vb
        self.frame = frame
        self.n = frame.deg_a - frame.deg_b
        cfg = vb.config
        self.F = cfg.base_field()
        self.places = vb.places
        self.rings = [ResidueRing(P) for P in self.places]
        # caps of frame lines at the punctures
        self.caps_a = [cap_at_place(M, P, frame.w_a) for M, P in zip(vb.mats, self.places)]
        self.caps_b = [cap_at_place(M, P, frame.w_b) for M, P in zip(vb.mats, self.places)]
        # reduced frame-to-canonical change of basis per place
        self._Tbar = []
        for M, P, R, ca, cb in zip(vb.mats, self.places, self.rings, self.caps_a, self.caps_b):
            pi = P.uniformizer()
            Minv = M.inverse()
            col_a = mat_vec(Minv, frame.w_a)
            col_b = mat_vec(Minv, frame.w_b)
            T = (
                col_a[0] * pi ** (-ca), col_b[0] * pi ** (-cb),
                col_a[1] * pi ** (-ca), col_b[1] * pi ** (-cb),
            )
            self._Tbar.append(tuple(R.of_rf(x) for x in T))
        # Hom(L_b, L_a) sections: poles bounded by cap_a - cap_b at the
        # punctures and by the polynomial-degree part elsewhere
        self.hom_basis = self._hom_sections()

    def _hom_sections(self):
        """Basis of Hom(L_b, L_a) = L(D), D_Q = cap_Q(w_a) - cap_Q(w_b)
        over the punctures and infinity (cap at infinity is minus the
        polynomial degree of the normalized vector)."""
        finite = {}
        inf_coeff = None
        wa, wb = self.frame.w_a, self.frame.w_b
        for P, ca, cb in zip(self.places, self.caps_a, self.caps_b):
            if P.is_infinite:
                inf_coeff = ca - cb
            else:
                finite[P.pi] = ca - cb
        if inf_coeff is None:
            dega_inf = -max(wa[0].num.degree, wa[1].num.degree)
            degb_inf = -max(wb[0].num.degree, wb[1].num.degree)
            inf_coeff = dega_inf - degb_inf
        return riemann_roch_basis(self.F, finite, inf_coeff)

    @property
    def unipotent_dim(self) -> int:
        return len(self.hom_basis)

    def descriptor(self):
        if self.n == 0:
            return StabDescriptor("FullGL2k", order_hint=_gl2_order(self.F.q))
        return StabDescriptor("TorusUnipotent", unipotent_dim=self.unipotent_dim)

    # --- witness-fixed directions (parabolicity) ---

    def parabolic_directions(self, i: int):
        """Link directions at place i fixed by some non-central element
        with distinct eigenvalues, as canonical projective pairs."""
        R = self.rings[i]
        P = self.places[i]
        q = self.F.q
        out = []
        if self.n > 0:
            # witnesses [[alpha, h],[0, beta]] in frame coordinates, with
            # h from the Hom(L_b, L_a) sections: fixed set is the a-fiber
            # (1:0) plus the family (c : x), c in the residue image of the
            # Hom space, x in F_q^x
            if q == 2:
                return []
            Tbar = self._Tbar[i]
            pts = {self._canon_pair(R, R.mat_apply(Tbar, (Poly.one(self.F), Poly.zero(self.F))))}
            for c in self._hom_residues(i):
                for x in range(1, q):
                    pt = R.mat_apply(Tbar, (c, Poly.const(self.F, x)))
                    pts.add(self._canon_pair(R, pt))
            return sorted(pts, key=_pair_key)
        # full GL_2(k): a direction is witness-fixed iff its affine
        # coordinate (in frame coordinates) generates an extension of
        # degree 2, or of degree <= 1 when the split torus is nontrivial
        Tbar = self._Tbar[i]
        Tinv = R.mat_inv(Tbar)
        pts = []
        for p in R.proj_points():
            z = R.mat_apply(Tinv, p)
            d = self._point_degree(R, z)
            if d == 2 or (d <= 1 and q >= 3):
                pts.append(self._canon_pair(R, p))
        return sorted(set(pts), key=_pair_key)

    def _hom_residues(self, i: int):
        """Residue image at place i of the Hom sections (F_q-subspace)."""
        P = self.places[i]
        R = self.rings[i]
        pi = P.uniformizer()
        shift = pi ** (self.caps_a[i] - self.caps_b[i])
        reps = set()
        basis = []
        for h in self.hom_basis:
            basis.append(R.of_rf(h * shift))
        # span over F_q
        span = {Poly.zero(self.F)}
        for b in basis:
            new = set(span)
            for c in range(1, self.F.q):
                for s in span:
                    new.add(self._canon_lift(R, s + b.scale(c)))
            span = new
        return sorted(span, key=lambda p: p.coeffs)

    def _canon_lift(self, R: ResidueRing, p: Poly) -> Poly:
        return p % R.P.pi if R.P.pi is not None else p

    @staticmethod
    def _canon_pair(R: ResidueRing, pair):
        a, b = R.proj_canon(pair)
        return (a.coeffs, b.coeffs)

    def _point_degree(self, R: ResidueRing, z) -> int:
        """Degree over F_q of a point of P^1(k(P)) (infinity: degree 1)."""
        a, b = R.proj_canon(z)
        if b.is_zero():
            return 1
        if a.degree <= 0:
            return 1
        # affine coordinate: minimal d with z^(q^d) = z in the residue field
        q = self.F.q
        cur = a
        d = 1
        while True:
            cur = self._canon_lift(R, cur.pow_mod(q, R.P.pi)) if R.P.pi is not None else cur
            if cur == a:
                return d
            d += 1
            if d > R.P.degree:
                raise RuntimeError("degree computation diverged")

    def witness_fixes_cube(self, dirs_and_points, witnesses: str = "any") -> bool:
        """Is some distinct-eigenvalue stabilizer element fixing the given
        link choices (list of (place index, projective pair))?

        witnesses="split" restricts to elements with eigenvalues in F_q
        (stabilized simplices are then the ones conjugate into an
        apartment, which is the structure the local theory describes;
        nonsplit tori only fix extra simplices over finite fields).
        """
        q = self.F.q
        if self.n > 0:
            if q == 2:
                return False
            fibs_a = {
                i: self._canon_pair(self.rings[i], self.rings[i].mat_apply(
                    self._Tbar[i], (Poly.one(self.F), Poly.zero(self.F))))
                for i, _ in dirs_and_points
            }
            active = []
            for i, pt in dirs_and_points:
                key = self._canon_pair(self.rings[i], pt)
                if key != fibs_a[i]:
                    active.append((i, pt))
            if not active:
                return True
            # need h with res_i(h) = x * z_i in frame coordinates, for
            # some common scale x in F_q^x
            return self._solve_hom_conditions(active)
        # n = 0: split pairs and (unless excluded) nonsplit tori
        return self._gl2_cube_witness(dirs_and_points, witnesses)

    def _solve_hom_conditions(self, active) -> bool:
        from .exact.gfsolve import solve as gf_solve

        F = self.F
        targets = []
        for i, pt in active:
            R = self.rings[i]
            Tinv = R.mat_inv(self._Tbar[i])
            a, b = R.mat_apply(Tinv, pt)
            if b.is_zero():
                raise RuntimeError("a-fiber direction was not filtered")
            targets.append((i, R.mul(a, R.inv(b))))
        for x in range(1, F.q):
            rows = []
            rhs = []
            for (i, zc) in targets:
                R = self.rings[i]
                P = self.places[i]
                pi = P.uniformizer()
                shift = pi ** (self.caps_a[i] - self.caps_b[i])
                target = self._canon_lift(R, zc.scale(x))
                basis_res = [R.of_rf(h * shift) for h in self.hom_basis]
                d = P.degree
                for j in range(d):
                    rows.append([_coef(br, j) for br in basis_res])
                    rhs.append(_coef(target, j))
            if gf_solve(F, rows, rhs) is not None:
                return True
        return False

    def _gl2_cube_witness(self, dirs_and_points, witnesses: str = "any") -> bool:
        F = self.F
        q = F.q
        # split torus: rational eigendirection pair (u, u')
        if q >= 3:
            ratpts = _proj_points_fq(F)
            for k1 in range(len(ratpts)):
                for k2 in range(k1 + 1, len(ratpts)):
                    if self._pair_fixes(dirs_and_points, ratpts[k1], ratpts[k2]):
                        return True
        if witnesses == "split":
            return False
        # nonsplit torus: eigendirections conjugate over F_{q^2}; at a
        # place they exist iff the residue field contains F_{q^2}; the
        # fixed pair is the root set of an irreducible quadratic over F_q
        for quad in _irreducible_quadratics(F):
            if self._nonsplit_fixes(dirs_and_points, quad):
                return True
        return False

    def _pair_fixes(self, dirs_and_points, u1, u2) -> bool:
        for i, pt in dirs_and_points:
            R = self.rings[i]
            img1 = R.mat_apply(self._Tbar[i], _embed_pair(self.F, u1))
            img2 = R.mat_apply(self._Tbar[i], _embed_pair(self.F, u2))
            key = self._canon_pair(R, pt)
            if key != self._canon_pair(R, img1) and key != self._canon_pair(R, img2):
                return False
        return True

    def _nonsplit_fixes(self, dirs_and_points, quad: Poly) -> bool:
        for i, pt in dirs_and_points:
            R = self.rings[i]
            Tinv = R.mat_inv(self._Tbar[i])
            z = R.mat_apply(Tinv, pt)
            a, b = z
            if b.is_zero():
                return False
            zc = R.mul(a, R.inv(b))
            val = self._canon_lift(R, _poly_eval_mod(quad, zc, R))
            if not val.is_zero():
                return False
        return True


def _coef(p: Poly, j: int) -> int:
    return p.coeffs[j] if j < len(p.coeffs) else 0


def _pair_key(pair):
    return pair


def _proj_points_fq(F):
    pts = [(c, 1) for c in range(F.q)]
    pts.append((1, 0))
    return pts


def _embed_pair(F, pt):
    return (Poly.const(F, pt[0]), Poly.const(F, pt[1]))


def _irreducible_quadratics(F):
    out = []
    for f in monic_polys(F, 2):
        if f.is_irreducible():
            out.append(f)
    return out


def _poly_eval_mod(f: Poly, z: Poly, R: ResidueRing) -> Poly:
    acc = Poly.zero(R.F)
    for c in reversed(f.coeffs):
        acc = R.mul(acc, z) + Poly.const(R.F, c)
        acc = acc % R.P.pi if R.P.pi is not None else acc
    return acc


def _gl2_order(q: int) -> int:
    return (q * q - 1) * (q * q - q)


@dataclass(frozen=True)
class StabDescriptor:
    """Symbolic stabilizer shape: the automorphism group of the bundle.

    variant FullGL2k when the two line summands agree; TorusUnipotent
    with the dimension of the unipotent part otherwise.  NonSplitTorus
    is constructible for completeness but never arises on P^1.
    """

    variant: str
    unipotent_dim: int = 0
    order_hint: int = 0
    group_flavor: str = "GL2"

    def __str__(self):
        if self.variant == "FullGL2k":
            return f"GL2(k) [|.|={self.order_hint}]"
        if self.variant == "TorusUnipotent":
            return f"T x U(h={self.unipotent_dim})"
        return self.variant


def stabilizer_descriptor(b: BundleClass, config: CurveConfig) -> StabDescriptor:
    """Descriptor from the class alone: on P^1 the unipotent dimension of
    the normalized type O(-n)+O is h^0(O(n)) = n + 1."""
    if b.n == 0:
        return StabDescriptor("FullGL2k", order_hint=_gl2_order(config.base_field().q))
    return StabDescriptor("TorusUnipotent", unipotent_dim=b.n + 1)


# --- diagonal representatives and link actions -------------------------------


def diagonal_vertex(config: CurveConfig, exponents) -> BuildingVertex:
    """The vertex with lattice diag(pi_i^{a_i}, 1) O^2 at each place."""
    return BuildingVertex(
        [TreeVertex(P, a, ()) for P, a in zip(config.punctures, exponents)]
    )


def realize_diagonal(b: BundleClass, config: CurveConfig):
    """Exponent vector a with sum d_i a_i = n and matching tau; the class
    of the resulting diagonal vertex is b.  Raises when the class has no
    diagonal representative over these punctures (n not a multiple of the
    degree gcd)."""
    degs = [P.degree for P in config.punctures]
    g = _gcd_list(degs)
    if b.n % g:
        raise ValueError("class has no diagonal representative over the punctures")
    # greedy integer solution of sum d_i a_i = n
    target = b.n
    a = [0] * len(degs)
    # extended gcd over the degree vector
    coefs = _gcd_combination(degs)
    for i, c in enumerate(coefs):
        a[i] = c * (target // g)
    got = sum(d * x for d, x in zip(degs, a))
    assert got == target
    if (-got) % (2 * g) != b.tau % (2 * g):
        # adjust by a degree-0 twist flip: negate to switch tau sign
        a = [-x for x in a]
        got = -got
    if (-got) % (2 * g) != b.tau % (2 * g):
        raise ValueError("no diagonal representative with the requested degree type")
    return a


def _gcd_combination(degs):
    """Integer coefficients c with sum c_i d_i = gcd(d)."""
    from math import gcd

    g = 0
    coefs = [0] * len(degs)
    for i, d in enumerate(degs):
        if g == 0:
            g = d
            coefs = [0] * len(degs)
            coefs[i] = 1
            continue
        # extended euclid on (g, d)
        old_r, r = g, d
        old_s, s = 1, 0
        while r:
            qq = old_r // r
            old_r, r = r, old_r - qq * r
            old_s, s = s, old_s - qq * s
        t = (old_r - old_s * g) // d
        coefs = [old_s * c for c in coefs]
        coefs[i] = t
        g = old_r
    return coefs


@dataclass
class LinkActionReport:
    """Per-direction orbit decomposition of the stabilizer on the link."""

    direction_reports: list  # one dict per place

    def fixed_counts(self):
        return [d["fixed_count"] for d in self.direction_reports]


def stabilizer_link_action(b: BundleClass, config: CurveConfig,
                           exponents=None) -> LinkActionReport:
    """Orbits and fixed points of the vertex stabilizer on each link
    component P^1(k(P_i)), computed from reduced fractional-linear
    generators at a diagonal representative."""
    a = list(exponents) if exponents is not None else realize_diagonal(b, config)
    v = diagonal_vertex(config, a)
    cls, frame = classify_vertex(v, config, want_frame=True)
    if cls.n != b.n:
        raise RuntimeError("diagonal realization has the wrong degree gap")
    vb = VertexBundle(config, v)
    stab = VertexStabilizer(vb, frame)
    F = config.base_field()
    q = F.q
    reports = []
    for i, P in enumerate(config.punctures):
        R = stab.rings[i]
        gens = _reduced_stab_generators(stab, i)
        pts = [VertexStabilizer._canon_pair(R, p) for p in R.proj_points()]
        index = {p: k for k, p in enumerate(pts)}
        parent = list(range(len(pts)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        fixed = set(range(len(pts)))
        for gmat in gens:
            moved = set()
            for k, p in enumerate(pts):
                img = VertexStabilizer._canon_pair(
                    R, R.mat_apply(gmat, (Poly(F, p[0]), Poly(F, p[1])))
                )
                k2 = index[img]
                if k2 != k:
                    moved.add(k)
                ra, rb = find(k), find(k2)
                if ra != rb:
                    parent[ra] = rb
            fixed -= moved
        orbits: dict[int, list] = {}
        for k in range(len(pts)):
            orbits.setdefault(find(k), []).append(k)
        sizes = sorted(len(o) for o in orbits.values())
        fixed_pts = sorted(pts[k] for k in fixed)
        # torus subgroup fixed set (diagonal part only)
        torus_fixed = _torus_fixed(stab, i) if q >= 3 else sorted(pts)
        reports.append(
            {
                "place": P,
                "orbit_sizes": sizes,
                "orbit_count": len(orbits),
                "fixed_count": len(fixed),
                "fixed_points": fixed_pts,
                "torus_fixed": torus_fixed,
                "tag": _action_tag(len(pts), sizes, len(fixed)),
            }
        )
    return LinkActionReport(reports)


def _action_tag(npts, sizes, nfixed):
    if nfixed == npts:
        return "trivial"
    if sizes == [npts]:
        return "transitive"
    if nfixed == 1:
        return "borel"
    if nfixed == 2:
        return "torus"
    return "mixed"


def _torus_fixed(stab: VertexStabilizer, i: int):
    F = stab.F
    R = stab.rings[i]
    alpha = F.multiplicative_generator() if F.q > 2 else 1
    g1 = (Poly.const(F, alpha), Poly.zero(F), Poly.zero(F), Poly.one(F))
    g2 = (Poly.one(F), Poly.zero(F), Poly.zero(F), Poly.const(F, alpha))
    mats = [R.mat_mul(R.mat_mul(stab._Tbar[i], g), R.mat_inv(stab._Tbar[i]))
            for g in (g1, g2)]
    out = []
    for p in R.proj_points():
        key = VertexStabilizer._canon_pair(R, p)
        if all(
            VertexStabilizer._canon_pair(R, R.mat_apply(m, p)) == key for m in mats
        ):
            out.append(key)
    return sorted(out)


def _reduced_stab_generators(stab: VertexStabilizer, i: int, flavor: str = "GL2"):
    """Reduced matrices of stabilizer generators at place i.

    The SL2 flavor keeps only determinant-square elements (modulo central
    units): the torus generator becomes diag(alpha, 1/alpha).
    """
    F = stab.F
    R = stab.rings[i]
    P = stab.places[i]
    T = stab._Tbar[i]
    Tinv = R.mat_inv(T)
    gens = []

    def push(frame_mat):
        gens.append(R.mat_mul(R.mat_mul(T, frame_mat), Tinv))

    alpha = F.multiplicative_generator() if F.q > 2 else 1
    if alpha != 1:
        if flavor == "GL2":
            push((Poly.const(F, alpha), Poly.zero(F), Poly.zero(F), Poly.one(F)))
            push((Poly.one(F), Poly.zero(F), Poly.zero(F), Poly.const(F, alpha)))
        else:
            inv = F.inv(alpha)
            push((Poly.const(F, alpha), Poly.zero(F), Poly.zero(F), Poly.const(F, inv)))
            sq = F.mul(alpha, alpha)
            push((Poly.const(F, sq), Poly.zero(F), Poly.zero(F), Poly.one(F)))
    pi = P.uniformizer()
    shift = pi ** (stab.caps_a[i] - stab.caps_b[i])
    for h in stab.hom_basis:
        c = R.of_rf(h * shift)
        push((Poly.one(F), c, Poly.zero(F), Poly.one(F)))
    if stab.n == 0:
        # the other unipotent direction exists too (full GL_2(k))
        shift2 = pi ** (stab.caps_b[i] - stab.caps_a[i])
        for h in stab._hom_sections_reverse():
            c = R.of_rf(h * shift2)
            push((Poly.one(F), Poly.zero(F), c, Poly.one(F)))
    return gens


def link_orbits(stab: VertexStabilizer, i: int, flavor: str = "GL2"):
    """Orbit partition of P^1(k(P_i)) under the (reduced) stabilizer."""
    R = stab.rings[i]
    F = stab.F
    gens = _reduced_stab_generators(stab, i, flavor)
    pts = [VertexStabilizer._canon_pair(R, p) for p in R.proj_points()]
    index = {p: k for k, p in enumerate(pts)}
    parent = list(range(len(pts)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for gmat in gens:
        for k, p in enumerate(pts):
            img = VertexStabilizer._canon_pair(
                R, R.mat_apply(gmat, (Poly(F, p[0]), Poly(F, p[1])))
            )
            k2 = index[img]
            ra, rb = find(k), find(k2)
            if ra != rb:
                parent[ra] = rb
    orbits: dict[int, list] = {}
    for k, p in enumerate(pts):
        orbits.setdefault(find(k), []).append(p)
    return sorted(orbits.values(), key=lambda o: (len(o), o[0]))


def _hom_sections_reverse(self):
    finite = {}
    inf_coeff = None
    wa, wb = self.frame.w_a, self.frame.w_b
    for P, ca, cb in zip(self.places, self.caps_a, self.caps_b):
        if P.is_infinite:
            inf_coeff = cb - ca
        else:
            finite[P.pi] = cb - ca
    if inf_coeff is None:
        dega_inf = -max(wa[0].num.degree, wa[1].num.degree)
        degb_inf = -max(wb[0].num.degree, wb[1].num.degree)
        inf_coeff = degb_inf - dega_inf
    return riemann_roch_basis(self.F, finite, inf_coeff)


VertexStabilizer._hom_sections_reverse = _hom_sections_reverse


# --- parabolicity -------------------------------------------------------------


def is_parabolic(cube: BuildingCube, config: CurveConfig, cache=None,
                 witnesses: str = "any") -> bool:
    """Whether the cube lies in the parabolic subcomplex.

    Vertices of the P^1 building are always parabolic (their bundles
    split); positive-dimensional cubes are tested through explicit
    stabilizer witnesses at the base corner.  witnesses="split" keeps
    only split-semisimple witnesses (apartment-conjugate simplices).
    """
    if cube.dim == 0:
        return True
    stab = _stab_of(cube.base, config, cache)
    dirs_pts = []
    for k, i in enumerate(cube.dirs):
        d = link_direction(cube.base.parts[i], cube.choices[k])
        P = config.punctures[i]
        pt = direction_to_fiber(P, d)
        dirs_pts.append((i, pt))
    return stab.witness_fixes_cube(dirs_pts, witnesses)


def _stab_of(v: BuildingVertex, config: CurveConfig, cache=None) -> VertexStabilizer:
    if cache is not None and v in cache:
        return cache[v]
    cls, frame = classify_vertex(v, config, want_frame=True)
    stab = VertexStabilizer(VertexBundle(config, v), frame)
    if cache is not None:
        cache[v] = stab
    return stab


# --- orbit invariants ---------------------------------------------------------


class OrbitInvariants:
    """Complete vertex-orbit invariants for GL_2(k[C]) and SL_2(k[C]).

    GL: (degree gap n, total degree mod 2 gcd).  SL additionally fixes
    the determinant type: the level vector modulo 2Z^s plus the unit
    divisor lattice.
    """

    def __init__(self, config: CurveConfig):
        self.config = config
        self.g = _gcd_list([P.degree for P in config.punctures])
        pic = nagata(config)
        s = config.s
        cols = [[2 if i == j else 0 for i in range(s)] for j in range(s)]
        cols += [list(v) for v in pic.unit_lattice]
        from .exact.intmat import hermite_column_form

        self._hermite = hermite_column_form(cols, s)

    def sl_type(self, v: BuildingVertex):
        from .exact.intmat import coset_reduce

        return coset_reduce([p.m for p in v.parts], self._hermite)

    def vertex_invariant(self, v: BuildingVertex, cls: BundleClass, group: str):
        if group == "GL2":
            return (cls.n, cls.tau)
        return (cls.n, self.sl_type(v))


# --- group elements and orbit refinement --------------------------------------


def standard_generators(config: CurveConfig, group: str = "SL2", max_deg: int = 3):
    """Small generating moves in GL_2(k[C]): monomial elementary
    matrices (positive and puncture-inverted powers), diagonal units,
    and the Weyl flip."""
    F = config.base_field()
    one, zero = RF.one(F), RF.zero(F)
    funcs = []
    for k in range(0, max_deg + 1):
        for c in range(1, F.q):
            funcs.append(RF(Poly(F, [0] * k + [c])))
    for P in config.punctures:
        if P.is_infinite:
            continue
        inv = RF(Poly.one(F), P.pi)
        for c in range(1, F.q):
            funcs.append(RF.const(F, c) * inv)
            funcs.append(RF.const(F, c) * inv * inv)
    mats = []
    for f in funcs:
        mats.append((one, f, zero, one))
        mats.append((one, zero, f, one))
    mats.append((zero, one, -one, zero))  # det 1 flip
    if F.q > 2:
        a = RF.const(F, F.multiplicative_generator())
        mats.append((a, zero, zero, a.inverse()))
        if group == "GL2":
            mats.append((a, zero, zero, one))
    if group == "GL2":
        mats.append((zero, one, one, zero))
    return mats


def apply_matrix_vertex(g, v: BuildingVertex, config: CurveConfig) -> BuildingVertex:
    from .tree import canonicalize

    parts = []
    for P, tv in zip(config.punctures, v.parts):
        gm = LatticeMatrix(g, P)
        parts.append(canonicalize(gm.mul(tv.matrix())))
    return BuildingVertex(parts)


def apply_matrix_cube(g, cube: BuildingCube, config: CurveConfig) -> BuildingCube:
    base = apply_matrix_vertex(g, cube.base, config)
    choices = []
    for k, i in enumerate(cube.dirs):
        moved = apply_matrix_vertex(g, cube.base.replace(i, cube.choices[k]), config)
        choices.append(moved.parts[i])
    return BuildingCube(base, cube.dirs, choices)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


# --- quotient complexes --------------------------------------------------------


@dataclass
class OrbitCell:
    dim: int
    rep: BuildingCube
    invariant: tuple
    parabolic: bool
    stab: StabDescriptor | None
    faces: list
    status: str  # "certified" | "search"


class QuotientComplex:
    """Orbit cells of a ball with stabilizer labels and parabolic flags."""

    def __init__(self, cells, group, config, radius):
        self.cells = cells  # dim -> list[OrbitCell]
        self.group = group
        self.config = config
        self.radius = radius

    def n_cells(self, d):
        return len(self.cells.get(d, []))

    def vertex_invariants(self):
        return [c.invariant for c in self.cells.get(0, [])]


def quotient_ball(config: CurveConfig, r: int, group: str = "SL2",
                  refine: bool = True) -> QuotientComplex:
    """Orbit representatives of the cells of ball(base, r).

    Vertex orbits come from the complete bundle invariants.  Edge orbits
    are computed exactly through stabilizer orbits on links at class
    representatives, matched across endpoint classes (each edge orbit
    meets the link of each endpoint class in exactly one stabilizer
    orbit).  Cubes of dimension >= 2 use invariant buckets refined by a
    bounded generator search; unresolved buckets are marked "search".
    """
    if r > 6:
        raise ValueError("quotient balls are desk-scale: radius <= 6")
    from .tree import neighbor as tree_neighbor

    base = base_building_vertex(config.punctures)
    verts, cubes = building_ball(base, r)
    inv = OrbitInvariants(config)
    states = classify_ball(config, r)
    stab_cache: dict = {}

    def cls_of(v):
        if v in states:
            return states[v].cls
        return classify_vertex(v, config)

    vert_inv = {v: inv.vertex_invariant(v, cls_of(v), group) for v in verts}
    cells: dict[int, list] = {}

    # --- vertices ---
    reps: dict = {}
    for v in sorted(verts, key=BuildingVertex.sort_key):
        lab = vert_inv[v]
        if lab not in reps:
            reps[lab] = v
            cells.setdefault(0, []).append(
                OrbitCell(0, BuildingCube(v), lab, True,
                          stabilizer_descriptor(cls_of(v), config), [], "certified")
            )
    vertex_cell = {c.invariant: c for c in cells.get(0, [])}

    # --- edges via stabilizer link orbits ---
    ball_edge_sigs = {}
    for e in cubes.get(1, []):
        i = e.dirs[0]
        w = e.base.replace(i, e.choices[0])
        sig = (i, tuple(sorted((vert_inv[e.base], vert_inv[w]))))
        ball_edge_sigs.setdefault(sig, []).append(e)

    flag_orbits: dict = {}
    for lab, v in reps.items():
        st = states[v].stabilizer() if v in states else None
        if st is None:
            c2, fr = classify_vertex(v, config, want_frame=True)
            st = VertexStabilizer(VertexBundle(config, v), fr)
        stab_cache[v] = st
        for i, P in enumerate(config.punctures):
            for orbit in link_orbits(st, i, group):
                dir_rep = _pair_to_direction(P, orbit[0])
                w_tree = tree_neighbor(v.parts[i], dir_rep)
                w = v.replace(i, w_tree)
                wlab = inv.vertex_invariant(w, cls_of(w), group)
                sig = (i, tuple(sorted((lab, wlab))))
                flag_orbits.setdefault(sig, []).append(
                    (lab, BuildingCube(v, (i,), (w_tree,)), orbit)
                )

    for sig in sorted(ball_edge_sigs, key=str):
        flags = flag_orbits.get(sig, [])
        i, (A, B) = sig
        if A != B:
            per_side = {A: [], B: []}
            for lab, edge, orbit in flags:
                per_side[lab].append((edge, orbit))
            counts = {k: len(v) for k, v in per_side.items()}
            certified = counts.get(A, 0) == counts.get(B, 0) and counts.get(A, 0) > 0
            side = per_side[A] if per_side[A] else per_side[B]
            for edge, orbit in side:
                cell = OrbitCell(1, edge, sig[1], is_parabolic(edge, config, stab_cache),
                                 None, [], "certified" if certified else "search")
                cells.setdefault(1, []).append(cell)
        else:
            # same-class edges: flip pairing is not determined by
            # invariants; report each flag orbit with a search marker
            # (flag count is an upper bound, half of it a lower bound)
            for lab, edge, orbit in flags:
                cell = OrbitCell(1, edge, sig[1], is_parabolic(edge, config, stab_cache),
                                 None, [], "search")
                cells.setdefault(1, []).append(cell)

    # --- higher cubes: invariant buckets + bounded generator search ---
    if any(d >= 2 for d in cubes):
        uf = _UnionFind()
        buckets: dict = {}
        for d, cs in cubes.items():
            if d < 2:
                continue
            for c in cs:
                key = (d, tuple(sorted(vert_inv[x] for x in c.corners())))
                buckets.setdefault(key, []).append(c)
                uf.add(c)
        if refine:
            gens = standard_generators(config, group)
            for key, cs in buckets.items():
                if len(cs) < 2:
                    continue
                budget = 40 * len(cs)
                frontier = list(cs)
                while frontier and budget > 0:
                    c = frontier.pop()
                    for g in gens:
                        img = apply_matrix_cube(g, c, config)
                        budget -= 1
                        if img in uf.parent:
                            uf.union(c, img)
                        elif budget > 0:
                            uf.add(img)
                            uf.union(c, img)
                            frontier.append(img)
        for key in sorted(buckets, key=str):
            cs = buckets[key]
            comps: dict = {}
            for c in cs:
                comps.setdefault(uf.find(c), []).append(c)
            certified = len(comps) == 1
            for members in comps.values():
                rep = min(members, key=BuildingCube.sort_key)
                cells.setdefault(rep.dim, []).append(
                    OrbitCell(rep.dim, rep, key[1],
                              is_parabolic(rep, config, stab_cache), None, [],
                              "certified" if certified else "search")
                )

    # --- face maps (by invariant signature for edges -> vertices) ---
    for cell in cells.get(1, []):
        e = cell.rep
        i = e.dirs[0]
        w = e.base.replace(i, e.choices[0])
        for corner in (e.base, w):
            lab = inv.vertex_invariant(corner, cls_of(corner), group)
            target = vertex_cell.get(lab)
            if target is not None:
                cell.faces.append((cells[0].index(target), 0))
    return QuotientComplex(cells, group, config, r)


def _pair_to_direction(P: Place, pair):
    r0, r1 = pair
    if not r1:  # second coordinate zero: the downward direction
        return "inf"
    return Poly(P.field, r0)


# --- the parabolic quotient's component count ---------------------------------


def parabolic_pi0(config: CurveConfig, r: int, group: str = "GL2",
                  witnesses: str = "split") -> int:
    """Number of connected components of the quotient of the radius-r
    parabolic subcomplex: vertex orbits joined along parabolic edges.

    The default keeps split witnesses only: this is the finite-field
    analogue of the local structure theory (cells conjugate into
    apartments), under which the component count matches the Kummer set.
    Nonsplit-torus witnesses, which exist only over finite fields, can
    be included with witnesses="any".
    """
    base = base_building_vertex(config.punctures)
    verts, cubes = building_ball(base, r)
    states = classify_ball(config, r)
    inv = OrbitInvariants(config)
    labels = {v: inv.vertex_invariant(v, states[v].cls, group) for v in verts}
    uf = _UnionFind()
    for lab in labels.values():
        uf.add(lab)
    stab_cache: dict = {}
    edge_type_cache: dict = {}
    for e in cubes.get(1, []):
        i = e.dirs[0]
        w = e.base.replace(i, e.choices[0])
        pair = (labels[e.base], labels[w])
        if uf.find(pair[0]) == uf.find(pair[1]):
            continue  # already joined; skip the witness test
        d = link_direction(e.base.parts[i], e.choices[0])
        pt = direction_to_fiber(config.punctures[i], d)
        stab = stab_cache.get(e.base)
        if stab is None:
            stab = states[e.base].stabilizer()
            stab_cache[e.base] = stab
        if stab.witness_fixes_cube([(i, pt)], witnesses):
            uf.union(*pair)
    return len({uf.find(lab) for lab in set(labels.values())})


def kummer_component_label(cls: BundleClass):
    return cls.kummer_label()


# --- incremental classification along balls -----------------------------------


class _FrameState:
    """Per-vertex classification state for ball propagation."""

    __slots__ = ("vb", "cls", "frame", "caps_a", "caps_b", "detvals", "_fibers")

    def __init__(self, vb, cls, frame):
        self.vb = vb
        self.cls = cls
        self.frame = frame
        self.caps_a = [cap_at_place(M, P, frame.w_a) for M, P in zip(vb.mats, vb.places)]
        self.caps_b = [cap_at_place(M, P, frame.w_b) for M, P in zip(vb.mats, vb.places)]
        self.detvals = [
            ca + cb + m for ca, cb, m in zip(self.caps_a, self.caps_b, vb.levels)
        ]
        self._fibers = {}

    def fibers(self, i):
        hit = self._fibers.get(i)
        if hit is None:
            vb = self.vb
            hit = (
                fiber_at_place(vb.mats[i], vb.places[i], self.frame.w_a),
                fiber_at_place(vb.mats[i], vb.places[i], self.frame.w_b),
            )
            self._fibers[i] = hit
        return hit

    def stabilizer(self) -> VertexStabilizer:
        return VertexStabilizer(self.vb, self.frame)


def _state_from_scratch(config, v) -> _FrameState:
    cls, frame = classify_vertex(v, config, want_frame=True)
    return _FrameState(VertexBundle(config, v), cls, frame)


def _fiber_key(P, pair):
    return (pair[0].coeffs, pair[1].coeffs)


def _step_state(config, state: _FrameState, i: int, direction, w_vertex) -> "_FrameState | None":
    """Propagate the frame along one tree edge; None when a fresh
    classification is needed."""
    P = config.punctures[i]
    d_i = P.degree
    down = direction != "inf"
    beta = direction_to_fiber(P, direction)
    fib_a, fib_b = state.fibers(i)
    beta_key = _fiber_key(P, beta)
    match_a = beta_key == _fiber_key(P, fib_a)
    match_b = beta_key == _fiber_key(P, fib_b)
    frame = state.frame
    if match_a or match_b:
        new_vb = VertexBundle(config, w_vertex)
        new = _FrameState.__new__(_FrameState)
        new.vb = new_vb
        # cap bookkeeping: down-step keeps the matching line, drops the
        # other; up-step raises the matching line, keeps the other
        ca = list(state.caps_a)
        cb = list(state.caps_b)
        if down:
            if match_a:
                cb[i] -= 1
            else:
                ca[i] -= 1
        else:
            if match_a:
                ca[i] += 1
            else:
                cb[i] += 1
        da = frame.deg_a + d_i * (ca[i] - state.caps_a[i])
        db = frame.deg_b + d_i * (cb[i] - state.caps_b[i])
        swapped = da < db
        if swapped:
            new.frame = SplittingFrame(frame.w_b, frame.w_a, db, da)
            new.caps_a, new.caps_b = cb, ca
        else:
            new.frame = SplittingFrame(frame.w_a, frame.w_b, da, db)
            new.caps_a, new.caps_b = ca, cb
        new.detvals = [
            x + y + m for x, y, m in zip(new.caps_a, new.caps_b, new_vb.levels)
        ]
        if new.detvals != state.detvals:
            return None  # exactness certificate failed; reclassify
        deg = new_vb.degree
        if new.frame.deg_a + new.frame.deg_b != deg:
            return None
        g = _gcd_list([Q.degree for Q in config.punctures])
        new.cls = BundleClass(new.frame.deg_a - new.frame.deg_b, deg % (2 * g), g)
        new._fibers = {
            j: (f[1], f[0]) if swapped else f
            for j, f in state._fibers.items()
            if j != i
        }
        return new
    # refit: the partner line through beta at the complementary level
    refit = _refit_partner(config, state, i, beta, w_vertex, down)
    if refit is not None:
        return refit
    return None


def _refit_partner(config, state, i, beta, w_vertex, down):
    """Replace the lower line by w_b + h w_a with fiber beta at place i."""
    from .exact.gfsolve import solve as gf_solve

    stab = state.stabilizer()
    F = config.base_field()
    R = stab.rings[i]
    Tinv = R.mat_inv(stab._Tbar[i])
    a_, b_ = R.mat_apply(Tinv, beta)
    if b_.is_zero():
        return None  # beta equals the a-fiber; handled by the cheap path
    zc = R.mul(a_, R.inv(b_))
    P = config.punctures[i]
    pi = P.uniformizer()
    shift = pi ** (stab.caps_a[i] - stab.caps_b[i])
    basis_res = [R.of_rf(h * shift) for h in stab.hom_basis]
    dP = P.degree
    rows = []
    rhs = []
    target = zc % P.pi if P.pi is not None else zc
    for j in range(dP):
        rows.append([_coef(br, j) for br in basis_res])
        rhs.append(_coef(target, j))
    sol = gf_solve(F, rows, rhs)
    if sol is None:
        return None
    h = RF.zero(F)
    for c, hb in zip(sol, stab.hom_basis):
        if c:
            h = h + RF.const(F, c) * hb
    w_new = (
        state.frame.w_b[0] + h * state.frame.w_a[0],
        state.frame.w_b[1] + h * state.frame.w_a[1],
    )
    w_new = normalize_vector(w_new)
    new_vb = VertexBundle(config, w_vertex)
    frame_candidate = _assemble_frame(new_vb, state.frame.w_a, w_new)
    return frame_candidate


def _assemble_frame(vb: VertexBundle, w1, w2) -> "_FrameState | None":
    """Build and certify a frame from two candidate lines at a vertex."""
    if _k_dependent(w1, w2):
        return None
    d1 = vb.line_degree(w1)
    d2 = vb.line_degree(w2)
    if d1 + d2 != vb.degree:
        return None
    if d1 >= d2:
        frame = SplittingFrame(normalize_vector(w1), normalize_vector(w2), d1, d2)
    else:
        frame = SplittingFrame(normalize_vector(w2), normalize_vector(w1), d2, d1)
    g = _gcd_list([P.degree for P in vb.places])
    cls = BundleClass(frame.deg_a - frame.deg_b, vb.degree % (2 * g), g)
    # the degree identity d1 + d2 = deg E certifies exactness everywhere
    # (the cokernel of L1 + L2 -> E is torsion of total length zero)
    return _FrameState(vb, cls, frame)


def classify_ball(config: CurveConfig, r: int):
    """Classification states for every vertex of ball(base, r), computed
    by frame propagation along tree edges with certified refits."""
    base = base_building_vertex(config.punctures)
    states = {base: _state_from_scratch(config, base)}
    frontier = [base]
    for _ in range(r):
        nxt = []
        for v in frontier:
            st = states[v]
            for i, tv in enumerate(v.parts):
                from .tree import link as tree_link

                for w_tree in tree_link(tv):
                    w = v.replace(i, w_tree)
                    if w in states:
                        continue
                    direction = link_direction(tv, w_tree)
                    new = _step_state(config, st, i, direction, w)
                    if new is None:
                        new = _state_from_scratch(config, w)
                    states[w] = new
                    nxt.append(w)
        frontier = nxt
    return states
