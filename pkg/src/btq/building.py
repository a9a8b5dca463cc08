"""The product building: trees at several places, viewed cubically.

A vertex is a tuple of tree vertices, one per puncture place (the place
list is fixed by the configuration and ordered).  Nondegenerate cubes
are products of tree edges in a subset of directions.  Cubes are stored
canonically: base corner = componentwise-minimal corner (which is the
lexicographic minimum), active direction set, and the far endpoint of
the tree edge per active direction.
"""

from itertools import combinations

from .complexes import CellComplex, SimplicialComplex
from .exact import abgroup
from .tree import TreeVertex, ball as tree_ball, base_vertex, link


class BuildingVertex:
    __slots__ = ("parts", "_hash")

    def __init__(self, parts):
        self.parts = tuple(parts)
        self._hash = hash(tuple(p.sort_key() for p in self.parts) + (len(self.parts),))

    @property
    def s(self) -> int:
        return len(self.parts)

    def __eq__(self, other):
        return isinstance(other, BuildingVertex) and self.parts == other.parts

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return tuple(p.sort_key() for p in self.parts)

    def replace(self, i: int, w: TreeVertex) -> "BuildingVertex":
        ps = list(self.parts)
        ps[i] = w
        return BuildingVertex(ps)

    def __repr__(self):
        return "(" + ",".join(map(repr, self.parts)) + ")"

    def label(self) -> str:
        return repr(self)


class BuildingCube:
    """Canonical cube: base corner, active directions, far endpoints."""

    __slots__ = ("base", "dirs", "choices", "_hash")

    def __init__(self, base: BuildingVertex, dirs=(), choices=()):
        dirs = tuple(dirs)
        choices = tuple(choices)
        # canonicalize: per direction put the smaller endpoint into the base
        parts = list(base.parts)
        far = list(choices)
        for k, i in enumerate(dirs):
            if far[k].sort_key() < parts[i].sort_key():
                parts[i], far[k] = far[k], parts[i]
        order = sorted(range(len(dirs)), key=lambda k: dirs[k])
        self.base = BuildingVertex(parts)
        self.dirs = tuple(dirs[k] for k in order)
        self.choices = tuple(far[k] for k in order)
        self._hash = hash((self.base, self.dirs) + tuple(c.sort_key() for c in self.choices))

    @property
    def dim(self) -> int:
        return len(self.dirs)

    def __eq__(self, other):
        return (
            isinstance(other, BuildingCube)
            and self.base == other.base
            and self.dirs == other.dirs
            and self.choices == other.choices
        )

    def __hash__(self):
        return self._hash

    def corners(self):
        """All 2^dim corner vertices."""
        out = [self.base]
        for k, i in enumerate(self.dirs):
            out = [v for v in out] + [v.replace(i, self.choices[k]) for v in out]
        return out

    def faces(self):
        """Codimension-1 faces with cubical boundary signs.

        d(e_1 x...x e_k) = sum_j (-1)^(j-1) (top_j - bottom_j); the edge in
        each direction is oriented from the stored base endpoint (bottom)
        to the far endpoint (top).
        """
        out = []
        for k, i in enumerate(self.dirs):
            rest_dirs = self.dirs[:k] + self.dirs[k + 1 :]
            rest_choices = self.choices[:k] + self.choices[k + 1 :]
            sign = (-1) ** k
            bottom = BuildingCube(self.base, rest_dirs, rest_choices)
            top = BuildingCube(self.base.replace(i, self.choices[k]), rest_dirs, rest_choices)
            out.append((top, sign))
            out.append((bottom, -sign))
        return out

    def sort_key(self):
        return (
            self.base.sort_key(),
            self.dirs,
            tuple(c.sort_key() for c in self.choices),
        )

    def __repr__(self):
        if not self.dirs:
            return repr(self.base)
        return f"Cube(base={self.base}, dirs={self.dirs}, far={self.choices})"


def base_building_vertex(places) -> BuildingVertex:
    return BuildingVertex([base_vertex(P) for P in places])


class LinkComplex:
    """Link of a building vertex: one vertex group per direction, one
    n-simplex for each choice of n+1 distinct directions and a link
    element in each."""

    def __init__(self, groups):
        self.groups = [list(g) for g in groups]

    @property
    def s(self) -> int:
        return len(self.groups)

    def simplex_count(self, k: int) -> int:
        """Number of k-simplices (k+1 distinct directions)."""
        total = 0
        for dirs in combinations(range(self.s), k + 1):
            prod = 1
            for i in dirs:
                prod *= len(self.groups[i])
            total += prod
        return total

    def vertices(self):
        return [(i, v) for i, g in enumerate(self.groups) for v in g]

    def simplices(self, k: int):
        """Explicit k-simplices as tuples of (direction, element)."""
        out = []
        for dirs in combinations(range(self.s), k + 1):
            def rec(pos, acc):
                if pos == len(dirs):
                    out.append(tuple(acc))
                    return
                i = dirs[pos]
                for v in self.groups[i]:
                    rec(pos + 1, acc + [(i, v)])

            rec(0, [])
        return out


def vertex_link(v: BuildingVertex) -> LinkComplex:
    return LinkComplex([link(p) for p in v.parts])


def ball(center: BuildingVertex, r: int):
    """All cubes whose corners lie within L^1 product distance r.

    Returns (vertices, cubes_by_dim): vertices sorted canonically, cubes
    as BuildingCube objects.  Closed under faces by construction.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    s = center.s
    per_dir = []
    for i, p in enumerate(center.parts):
        dist = tree_ball(p, r)
        verts = [(d, v) for v, d in dist.items()]
        edges = []
        for v, d in dist.items():
            for w in link(v):
                if w in dist and v.sort_key() < w.sort_key():
                    edges.append((max(d, dist[w]), v, w))
        per_dir.append((verts, edges))

    cubes_by_dim: dict[int, list] = {}

    def rec(i, budget, parts, dirs, choices):
        if i == s:
            cube = BuildingCube(BuildingVertex(parts), dirs, choices)
            cubes_by_dim.setdefault(cube.dim, []).append(cube)
            return
        verts, edges = per_dir[i]
        for d, v in verts:
            if d <= budget:
                rec(i + 1, budget - d, parts + [v], dirs, choices)
        for cost, v, w in edges:
            if cost <= budget:
                rec(i + 1, budget - cost, parts + [v], dirs + [i], choices + [w])

    rec(0, r, [], [], [])
    for d in cubes_by_dim:
        cubes_by_dim[d].sort(key=BuildingCube.sort_key)
    vertices = [c.base for c in cubes_by_dim.get(0, [])]
    return vertices, cubes_by_dim


def ball_complex(center: BuildingVertex, r: int) -> CellComplex:
    """The ball as a cell complex with cubical boundary maps."""
    _, cubes = ball(center, r)
    cx = CellComplex()
    for d in sorted(cubes):
        for c in cubes[d]:
            faces = {}
            if d > 0:
                for f, sign in c.faces():
                    faces[f] = faces.get(f, 0) + sign
            cx.add_cell(d, c, [(f, s) for f, s in faces.items() if s])
    return cx


def apartment_link(s: int) -> SimplicialComplex:
    """Full subcomplex of the link on two antipodal directions per tree:
    the boundary of the s-dimensional hyperoctahedron."""
    if s < 1:
        raise ValueError("need at least one direction")
    simplices = []
    for k in range(1, s + 1):
        for dirs in combinations(range(s), k):
            for mask in range(1 << k):
                simplices.append(tuple((i, mask >> j & 1) for j, i in enumerate(dirs)))
    return SimplicialComplex(simplices)


def antipodal_map(vertex_label):
    i, e = vertex_label
    return (i, 1 - e)


def quotient_by_free_involution(K: SimplicialComplex, vmap) -> CellComplex:
    """Quotient cell complex of a simplicial complex by a simplicial
    involution; subdivides barycentrically until no cell is fixed setwise."""
    def lift(m):
        def inner(label):
            # after subdivision, labels are chains of original simplices
            if isinstance(label, tuple) and label and isinstance(label[0], tuple):
                return tuple(tuple(sorted(m(v) for v in s)) for s in label)
            return m(label)

        return inner

    current, cur_map = K, vmap
    for _ in range(3):
        fixed = False
        for d, ss in current.simplices.items():
            for sx in ss:
                if tuple(sorted(cur_map(v) for v in sx)) == sx and d >= 0:
                    if all(cur_map(v) == v for v in sx):
                        raise ValueError("involution has fixed vertices; not free")
                    fixed = True
                    break
            if fixed:
                break
        if not fixed:
            break
        current, cur_map = current.barycentric_subdivision(), lift(cur_map)
    else:
        raise RuntimeError("subdivision did not free the action")

    def image(sx):
        mapped = [cur_map(v) for v in sx]
        order = sorted(range(len(mapped)), key=lambda i: mapped[i])
        sign = _perm_sign(order)
        return tuple(mapped[i] for i in order), sign

    reps = {}
    for d, ss in current.simplices.items():
        for sx in ss:
            img, _ = image(sx)
            rep = min(sx, img)
            reps[sx] = rep

    cx = CellComplex()
    for d in sorted(current.simplices):
        for sx in current.simplices[d]:
            if reps[sx] != sx:
                continue
            faces = {}
            if d > 0:
                for i in range(len(sx)):
                    face = sx[:i] + sx[i + 1 :]
                    coeff = (-1) ** i
                    rep = reps[face]
                    if rep == face:
                        sgn = 1
                    else:
                        _, sgn = image(face)
                    faces[rep] = faces.get(rep, 0) + coeff * sgn
            cx.add_cell(d, sx, [(f, c) for f, c in faces.items() if c])
    return cx


def antipodal_quotient(s: int) -> CellComplex:
    """Quotient of the apartment sphere by the antipodal involution.

    For s = 1 this is a single point; for s >= 2 the homology is that of
    real projective (s-1)-space.
    """
    K = apartment_link(s)
    if s == 1:
        cx = CellComplex()
        cx.add_cell(0, ((0, 0),))
        return cx
    return quotient_by_free_involution(K, antipodal_map)


def _perm_sign(order) -> int:
    sign = 1
    seen = [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def sphere_homology(s: int, coeff=abgroup.Z):
    """Homology of apartment_link(s) via the chain-complex engine."""
    return apartment_link(s).homology(coeff)
