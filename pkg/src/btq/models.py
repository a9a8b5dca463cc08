"""Model complexes: the cubulated Z^s modulo translation lattices and
point inversions.

The four flavors are determined by a translation lattice inside Z^s
(the relation lattice of the punctures in Pic(Cbar), doubled for the
determinant-1 flavors) and an inversion flag:

    torus              translations by the relation lattice
    special_torus      doubled translations
    normalizer         translations plus point inversions at relation points
    special_normalizer doubled translations plus the same inversions

Quotients are materialized on a truncation window: identified along the
compact (torus) directions, truncated in the free ones, which preserves
the homotopy type once the window clears the lattice basis.
"""

from dataclasses import dataclass
from itertools import product

from .complexes import CellComplex
from .curves import PicData
from .exact import FgAbGroup, Z, cokernel
from .exact.intmat import coset_reduce, from_columns, hermite_column_form

FLAVORS = ("torus", "special_torus", "normalizer", "special_normalizer")


@dataclass
class CrystGroup:
    """Affine group acting on the cubulated Z^s."""

    s: int
    translations: list  # basis vectors of the translation lattice
    inversions: bool
    centers: list  # basis of the inversion-center lattice (= T)
    flavor: str

    @property
    def rank(self) -> int:
        return len(self.centers)

    def hermite(self):
        return hermite_column_form([list(v) for v in self.translations], self.s)

    def reduce(self, x):
        return coset_reduce(list(x), self._hermite_cached())

    def _hermite_cached(self):
        if not hasattr(self, "_herm"):
            self._herm = self.hermite()
        return self._herm

    def center_hermite(self):
        if not hasattr(self, "_cherm"):
            self._cherm = hermite_column_form([list(v) for v in self.centers], self.s)
        return self._cherm

    def is_center(self, x) -> bool:
        return all(v == 0 for v in coset_reduce(list(x), self.center_hermite()))


def build_cryst(pic: PicData, flavor: str) -> CrystGroup:
    """Model group from Pic data: the translation lattice is the set of
    puncture-supported divisors that die in Pic(Cbar)."""
    basis = [list(v) for v in pic.unit_lattice]
    return cryst_from_lattice(pic.config.s, basis, flavor)


def cryst_from_lattice(s: int, basis, flavor: str) -> CrystGroup:
    """Synthetic entry point: user-supplied relation lattice."""
    if flavor not in FLAVORS:
        raise ValueError(f"flavor must be one of {FLAVORS}")
    basis = [list(v) for v in basis]
    doubled = [[2 * x for x in v] for v in basis]
    translations = doubled if flavor.startswith("special") else basis
    inversions = flavor.endswith("normalizer")
    return CrystGroup(s, translations, inversions, basis, flavor)


# --- quotient complexes ---------------------------------------------------


def _window_ok(g: CrystGroup, window: int) -> bool:
    m = max((abs(x) for v in g.translations for x in v), default=0)
    return window >= 2 * m + 2


class ModelQuotient:
    """Finite quotient complex of the window under the group action."""

    def __init__(self, g: CrystGroup, window: int):
        if not _window_ok(g, window):
            raise ValueError("window too small: needs >= 2*max basis entry + 2")
        self.group = g
        self.window = window
        s = g.s
        rng = range(-window, window + 1)
        cells: dict[tuple, dict] = {}
        for x in product(rng, repeat=s):
            for mask in range(1 << s):
                dirs = tuple(i for i in range(s) if mask >> i & 1)
                corners_ok = all(
                    x[i] + 1 <= window for i in dirs
                )
                if not corners_ok:
                    continue
                key, stab, sign = self._canonical(x, dirs)
                if key not in cells:
                    cells[key] = {
                        "dim": len(dirs),
                        "rep": (tuple(x), dirs),
                        "stab_order": stab,
                    }
        self.cells = cells

    def _canonical(self, x, dirs):
        g = self.group
        rx = g.reduce(x)
        if not g.inversions:
            return (rx, dirs), 1, 1
        # inversion image of the cube: base -> -x - e_dirs
        ix = [-v for v in x]
        for i in dirs:
            ix[i] -= 1
        rix = g.reduce(ix)
        if rix == rx:
            return (rx, dirs), 2, 1
        if (rix, dirs) < (rx, dirs):
            return (rix, dirs), 1, -1 if len(dirs) % 2 else 1
        return (rx, dirs), 1, 1

    def n_cells(self, d: int) -> int:
        return sum(1 for c in self.cells.values() if c["dim"] == d)

    def stab2_cells(self, d: int):
        return [
            key for key, c in self.cells.items()
            if c["dim"] == d and c["stab_order"] == 2
        ]

    def complex(self) -> CellComplex:
        """Orbit chain complex; requires inversion-fixed cells to occur in
        dimension 0 only (always true for the doubled flavors)."""
        for key, c in self.cells.items():
            if c["dim"] > 0 and c["stab_order"] == 2:
                raise ValueError(
                    "inversion fixes a positive-dimensional cell; subdivide first"
                )
        cx = CellComplex()
        order = sorted(self.cells.items(), key=lambda kv: (kv[1]["dim"], str(kv[0])))
        for key, c in order:
            d = c["dim"]
            if d == 0:
                cx.add_cell(0, key)
                continue
            # the cell basis is the standard orientation of the canonical
            # position, so boundaries are computed from the key itself
            x, dirs = key
            faces: dict = {}
            for k, i in enumerate(dirs):
                rest = dirs[:k] + dirs[k + 1 :]
                sign = (-1) ** k
                bottom = list(x)
                top = list(x)
                top[i] += 1
                for corner, coeff in ((top, sign), (bottom, -sign)):
                    fkey, _, fsign = self._canonical(tuple(corner), rest)
                    faces[fkey] = faces.get(fkey, 0) + coeff * fsign
            cx.add_cell(d, key, [(f, c2) for f, c2 in faces.items() if c2])
        return cx


def quotient_homology(g: CrystGroup, window: int, coeff=Z):
    """Cellular homology of the window quotient (torus directions
    identified, free directions truncated)."""
    mq = ModelQuotient(g, window)
    return mq.complex().homology(coeff)


def special_vertices(g: CrystGroup):
    """For the doubled-normalizer flavor: orbit classes of translates of
    the origin by inversion centers; there are 2^rank of them."""
    if g.flavor != "special_normalizer":
        raise ValueError("special vertices are defined for the special_normalizer flavor")
    reps = []
    seen = set()
    for eps in product((0, 1), repeat=g.rank):
        x = [0] * g.s
        for e, v in zip(eps, g.centers):
            for i in range(g.s):
                x[i] += e * v[i]
        key = g.reduce(x)
        if key not in seen:
            seen.add(key)
            reps.append(key)
    return {"count": len(reps), "representatives": reps}


# --- the monomial-matrix group's first homology ------------------------------


def sn_tilde_h1(unit_rank: int, q: int, coeff=Z) -> FgAbGroup:
    """Abelianization of the determinant-1 monomial matrix group over the
    unit group k[C]^x = F_q^x x Z^rank, tensored with the coefficients.

    Presentation: generators d(u) for units u and the flip w, with
    w d(u) w^{-1} = d(u^{-1}) and w^2 = d(-1).  Abelianized this gives
    2 d(u) = 0 for every unit generator, the unit-group relation, and
    2w = d(-1); everything is 2-torsion, so the Z[1/2] result vanishes.
    """
    # generators: c (torsion unit of order q-1), u_1..u_rank, w
    ngens = 1 + unit_rank + 1
    cols = []
    col = [0] * ngens
    col[0] = q - 1
    cols.append(col[:])
    for j in range(1 + unit_rank):
        col = [0] * ngens
        col[j] = 2
        cols.append(col[:])
    col = [0] * ngens
    col[-1] = 2
    if q % 2 == 1:
        col[0] = -((q - 1) // 2)  # w^2 = d(-1) = ((q-1)/2) c
    cols.append(col[:])
    rel = from_columns(cols, nrows=ngens)
    return cokernel(rel, ngens, coeff)


# --- isotropy page of the monomial-matrix action ------------------------------


def model_isotropy_page(mq: ModelQuotient, q_field: int, coeff=Z, max_q: int = 2):
    """E^1 page for the determinant-1 monomial matrices acting on the
    cubulated Z^s through the special_normalizer model.

    Ordinary cells have the central torus diag(u, 1/u) = C_{q-1} as
    stabilizer; the special vertices have the full monomial normalizer.
    Inclusions are literal (inner twists act trivially on homology), so
    d^1 is the quotient boundary tensored with the induced maps.
    """
    from .equivariant import (
        E1Entry,
        E1Page,
        PresentedAb,
        _Workspace,
        monomial_normalizer_sl2,
    )
    from .exact import intmat

    if mq.group.flavor != "special_normalizer":
        raise ValueError("isotropy pages are built from special_normalizer models")
    N = monomial_normalizer_sl2(q_field)
    torus_els = [i for i, m in enumerate(N.names) if m[1] == 0]
    T = N.subgroup(torus_els)
    modl = coeff[1] if isinstance(coeff, tuple) else None
    ws_T = {qq: _Workspace(T, qq, modl) for qq in range(max_q + 1)}
    ws_N = {qq: _Workspace(N, qq, modl) for qq in range(max_q + 1)}
    incl = {g: torus_els[g] for g in range(T.n)}  # index map T -> N

    cx = mq.complex()
    entries = {}
    d1 = {}
    cell_meta = {}
    for d in sorted(cx.cells):
        for idx, key in enumerate(cx.cells[d]):
            special = mq.cells[key]["stab_order"] == 2
            cell_meta[(d, idx)] = special
    for d in sorted(cx.cells):
        for qq in range(max_q + 1):
            summands = []
            offsets = []
            total = 0
            cols = []
            for idx, key in enumerate(cx.cells[d]):
                w = ws_N[qq] if cell_meta[(d, idx)] else ws_T[qq]
                summands.append((key, None, w))
                offsets.append(total)
                blk = w.pres.relations
                for j in range(intmat.shape(blk)[1]):
                    col = [0] * (total + w.pres.ngens)
                    for i in range(intmat.shape(blk)[0]):
                        col[total + i] = blk[i][j]
                    cols.append(col)
                total += w.pres.ngens
            if total == 0:
                continue
            cols = [c + [0] * (total - len(c)) for c in cols]
            rel = intmat.from_columns(cols, nrows=total) if cols else intmat.zeros(total, 0)
            pres = PresentedAb(total, rel)
            group = pres.group
            entries[(d, qq)] = E1Entry(group, pres, summands, offsets)
    for d in sorted(cx.cells):
        if d == 0:
            continue
        for qq in range(max_q + 1):
            src = entries.get((d, qq))
            tgt = entries.get((d - 1, qq))
            if src is None or tgt is None:
                continue
            M = intmat.zeros(tgt.presented.ngens, src.presented.ngens)
            for j, blist in enumerate(cx.boundary[d]):
                w_src = src.summands[j][2]
                for fidx, coeff_b in blist:
                    w_tgt = tgt.summands[fidx][2]
                    if w_src.G.n == w_tgt.G.n:
                        phi = lambda x: x
                    else:
                        phi = lambda x: incl[x]
                    block = w_src.induced_map(w_tgt, phi)
                    for rr in range(intmat.shape(block)[0]):
                        for cc in range(intmat.shape(block)[1]):
                            M[tgt.offsets[fidx] + rr][src.offsets[j] + cc] += (
                                coeff_b * block[rr][cc]
                            )
            d1[(d, qq)] = M
    return E1Page(entries, d1, coeff)
