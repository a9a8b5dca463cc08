"""Complexes of points on the projective line over a small finite field.

Points are labeled 0..q-1 (field encodings) plus q for the point at
infinity, ordered 0 < 1 < ... < infinity.  The plain complex has
ordered tuples of distinct points as generators; the alternating
complex keeps sorted tuples (it is the simplicial chain complex of the
full simplex on the point set; repeated-entry tuples are 2-torsion and
are dropped, which is the right realization after inverting 2).

The decomposable part is everything in degrees <= 1; the D/E complexes
resolve it after inverting 2, and the refined low-degree groups are the
equivariant homology of the quotient by the decomposable part under the
special linear group.
"""

from dataclasses import dataclass
from itertools import permutations

from .complexes import ChainComplexData, SimplicialComplex
from .equivariant import GComplex, ResourceCapError, e1_page, e2_and_total, sl2_group
from .exact import FgAbGroup, Z, ZHALF, Zmod, gf
from .exact import intmat
from .exact.abgroup import homology_of_pair
from .kernels import rank_mod_p, snf_diagonal

GENERATOR_CAP = 1_000_000


def p1_points(q: int):
    """Labels of P^1(F_q): field encodings plus q for infinity."""
    return list(range(q + 1))


@dataclass
class PointsComplex:
    q: int
    max_degree: int
    variant: str  # "plain" | "alternating"
    generators: dict  # degree -> list of tuples
    boundaries: dict  # degree -> matrix d_n : C_n -> C_{n-1}

    def dims(self):
        return {n: len(g) for n, g in self.generators.items()}

    def chain_data(self, augmented: bool = False) -> ChainComplexData:
        dims = self.dims()
        bnd = dict(self.boundaries)
        if augmented:
            dims[-1] = 1
            bnd[0] = [[1] * dims.get(0, 0)]
        return ChainComplexData(dims, bnd)

    def check_d_squared(self) -> bool:
        return self.chain_data().check_complex()


def build_points_complex(q: int, N: int, variant: str = "alternating") -> PointsComplex:
    """Tuples of distinct points with the alternating-face boundary."""
    if variant not in ("plain", "alternating"):
        raise ValueError("variant must be plain or alternating")
    if N > q:
        raise ValueError("degree exceeds the point count; no distinct tuples")
    pts = p1_points(q)
    gens = {}
    total = 0
    for n in range(N + 1):
        if variant == "plain":
            out = []
            _ordered_tuples(pts, n + 1, (), out)
        else:
            out = _sorted_tuples(pts, n + 1)
        total += len(out)
        if total > GENERATOR_CAP:
            raise ResourceCapError("points complex exceeds the generator cap")
        gens[n] = out
    boundaries = {}
    for n in range(1, N + 1):
        index = {t: i for i, t in enumerate(gens[n - 1])}
        M = intmat.zeros(len(gens[n - 1]), len(gens[n]))
        for j, t in enumerate(gens[n]):
            for i in range(len(t)):
                face = t[:i] + t[i + 1 :]
                M[index[face]][j] += (-1) ** i
        boundaries[n] = M
    return PointsComplex(q, N, variant, gens, boundaries)


def _ordered_tuples(pts, k, acc, out):
    if k == 0:
        out.append(acc)
        return
    for p in pts:
        if p not in acc:
            _ordered_tuples(pts, k - 1, acc + (p,), out)


def _sorted_tuples(pts, k):
    out = []

    def rec(start, acc):
        if len(acc) == k:
            out.append(tuple(acc))
            return
        for i in range(start, len(pts)):
            rec(i + 1, acc + [pts[i]])

    rec(0, [])
    return out


def acyclicity_check(c: PointsComplex, degrees=None) -> dict:
    """Vanishing of augmented homology in the contraction range.

    The contraction needs a point away from the support of a cycle,
    which a finite field guarantees only in degrees <= q - 2; degrees
    beyond that are reported as outside the range, not asserted.
    """
    limit = c.q - 2
    if degrees is None:
        degrees = range(0, min(limit, c.max_degree - 1) + 1)
    data = c.chain_data(augmented=True)
    hom = data.homology()
    report = {"checked": {}, "outside_range": []}
    for n in degrees:
        if n > limit or n >= c.max_degree:
            report["outside_range"].append(n)
            continue
        report["checked"][n] = hom[n]
    report["all_vanish"] = all(g.is_trivial for g in report["checked"].values())
    return report


# --- the decomposable part and its resolution ---------------------------------


@dataclass
class DEData:
    q: int
    f0_dims: dict  # degrees 0,1 of the alternating complex
    d_complex_dims: dict
    e_dims: dict
    map_f0_to_d: dict  # degree -> matrix
    map_d_to_e: dict
    d_boundary: list  # the D-complex differential (degree 1 -> 0)
    f0_boundary: list


def build_de_data(q: int) -> DEData:
    """The decomposable subcomplex, its two-step resolution, and the maps.

    D = sum over points x of (Z[P^1 - x] -> Z), degrees 1, 0 with minus
    the augmentation; E = Z[unordered pairs] in degree 1.  The map from
    the decomposable part sends (x) to 1_x and (x,y) to (y)_x - (x)_y;
    the second map sends (y)_x to the unordered pair 1_{x,y}.
    """
    pts = p1_points(q)
    npts = len(pts)
    alt1 = _sorted_tuples(pts, 2)
    pairs_index = {t: i for i, t in enumerate(alt1)}
    # D-complex bases: degree 1: (y)_x pairs with y != x; degree 0: copies of Z
    d1_basis = [(x, y) for x in pts for y in pts if y != x]
    d1_index = {b: i for i, b in enumerate(d1_basis)}
    # boundary of D: (y)_x -> -1_x
    dD = intmat.zeros(npts, len(d1_basis))
    for j, (x, y) in enumerate(d1_basis):
        dD[x][j] = -1
    # F0 boundary (alternating degrees 1 -> 0): d(x,y) = (y) - (x)
    dF = intmat.zeros(npts, len(alt1))
    for j, (x, y) in enumerate(alt1):
        dF[y][j] += 1
        dF[x][j] -= 1
    # F0 -> D
    m0 = intmat.identity(npts)  # (x) -> 1_x
    m1 = intmat.zeros(len(d1_basis), len(alt1))
    for j, (x, y) in enumerate(alt1):
        m1[d1_index[(x, y)]][j] += 1  # (y)_x
        m1[d1_index[(y, x)]][j] -= 1  # -(x)_y
    # D -> E
    e1 = intmat.zeros(len(alt1), len(d1_basis))
    for j, (x, y) in enumerate(d1_basis):
        key = (min(x, y), max(x, y))
        e1[pairs_index[key]][j] = 1
    return DEData(
        q,
        {0: npts, 1: len(alt1)},
        {0: npts, 1: len(d1_basis)},
        {0: 0, 1: len(alt1)},
        {0: m0, 1: m1},
        {0: intmat.zeros(0, npts), 1: e1},
        dD,
        dF,
    )


def de_exactness(q: int) -> dict:
    """Degreewise exactness of 0 -> F0 -> D -> E -> 0 after inverting 2,
    verified two ways: integrally with 2-power torsion discarded, and
    independently over F_3."""
    if q > 7:
        raise ResourceCapError("decomposable resolution is desk-scale: q <= 7")
    de = build_de_data(q)
    report = {"q": q}
    # chain maps
    lhs = intmat.matmul(de.map_f0_to_d[0], de.f0_boundary)
    rhs = intmat.matmul(de.d_boundary, de.map_f0_to_d[1])
    report["f0_to_d_chain_map"] = lhs == rhs
    comp = intmat.matmul(de.map_d_to_e[1], de.map_f0_to_d[1])
    report["composite_zero"] = not any(v for row in comp for v in row)
    results = {}
    for deg in (0, 1):
        f = de.map_f0_to_d[deg]
        g = de.map_d_to_e[deg]
        dimA = de.f0_dims[deg]
        dimB = de.d_complex_dims[deg]
        dimC = de.e_dims[deg]
        # integral witnesses with 2-power torsion discarded
        ker_f = intmat.kernel_basis(f)
        inj = len(ker_f) == 0
        facs_g = snf_diagonal(g) if dimC else []
        surj_half = len(facs_g) == dimC and all(_odd_part(d) == 1 for d in facs_g)
        mid = _middle_homology_odd(f, g, dimB)
        # mod-3 witness
        r_f3 = rank_mod_p(f, 3)
        r_g3 = rank_mod_p(g, 3) if dimC else 0
        mod3 = r_f3 == dimA and r_f3 + r_g3 == dimB and r_g3 == dimC
        results[deg] = {
            "injective": inj,
            "surjective_after_half": surj_half,
            "middle_exact_after_half": mid,
            "mod3_exact": mod3,
        }
    report["degrees"] = results
    report["exact"] = report["f0_to_d_chain_map"] and report["composite_zero"] and all(
        all(v for v in r.values()) for r in results.values()
    )
    return report


def _odd_part(d):
    while d % 2 == 0:
        d //= 2
    return d


def _middle_homology_odd(f, g, dimB) -> bool:
    """ker(g)/im(f) has only 2-power torsion (so vanishes over Z[1/2])."""
    if dimB == 0:
        return True
    K = intmat.kernel_basis(g) if intmat.shape(g)[0] else [
        [1 if i == j else 0 for i in range(dimB)] for j in range(dimB)
    ]
    Kmat = intmat.from_columns(K, nrows=dimB) if K else intmat.zeros(dimB, 0)
    if not K:
        return intmat.shape(f)[1] == 0 or all(
            not any(f[i][j] for i in range(dimB)) for j in range(intmat.shape(f)[1])
        )
    cols = []
    for j in range(intmat.shape(f)[1]):
        col = [f[i][j] for i in range(dimB)]
        x = intmat.solve(Kmat, col)
        if x is None:
            return False
        cols.append(x)
    rel = intmat.from_columns(cols, nrows=len(K)) if cols else intmat.zeros(len(K), 0)
    facs = snf_diagonal(rel)
    if len(facs) < len(K):
        return False  # free rank survives localization
    return all(_odd_part(d) == 1 for d in facs)


# --- refined low-degree groups -------------------------------------------------


def moebius_action(q: int):
    """SL_2(F_q) acting on the point labels by fractional-linear maps."""
    G = sl2_group(q)
    F = G.field

    def act(gidx, v):
        a, b, c, d = G.names[gidx]
        if v == q:  # infinity
            if c == 0:
                return q
            return F.div(a, c)
        num = F.add(F.mul(a, v), b)
        den = F.add(F.mul(c, v), d)
        if den == 0:
            return q
        return F.div(num, den)

    return G, act


def rp1_low_degree(q: int, coeff=Z, max_n: int = 1) -> dict:
    """Refined low-degree groups: equivariant homology of the quotient of
    the alternating points complex by its decomposable part, in degrees
    <= 1.

    The quotient complex is the simplicial pair (full simplex on
    P^1(F_q), 1-skeleton); the transitivity of the action on distinct
    pairs puts everything in low degrees inside the decomposable part,
    and the computed page must vanish in total degrees <= 1.
    """
    if q not in (2, 3, 5):
        raise ResourceCapError("refined groups are computed for q in {2, 3, 5}")
    pts = p1_points(q)
    full = SimplicialComplex([tuple(pts)])
    skel = SimplicialComplex(
        [s for d in (0, 1) for s in full.simplices.get(d, [])]
    )
    G, act = moebius_action(q)
    X = GComplex(G, full, act, sub=skel)
    max_p = min(3, X.K.dim)
    page = e1_page(X, coeff, max_q=max_n, max_p=max_p)
    if not page.verify_d1_squared():
        raise RuntimeError("d1 failed to square to zero")
    res = e2_and_total(page, localize=(coeff == ZHALF))
    out = {}
    for n in range(max_n + 1):
        pieces = [res.grid.get((p, n - p), FgAbGroup(0)) for p in range(n + 1)]
        total = FgAbGroup(
            sum(g.rank for g in pieces),
            tuple(sorted(t for g in pieces for t in g.torsion)),
        )
        out[n] = total
    return {"groups": out, "grid": res.grid}
