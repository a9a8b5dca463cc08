"""Cell-complex containers and their chain complexes.

Two flavors cover every complex in the package:

* :class:`SimplicialComplex` - simplices as sorted vertex tuples, with
  the standard alternating boundary; supports barycentric subdivision.
* :class:`CellComplex` - cells with explicit integer boundary lists,
  used for cubical complexes and quotient complexes where cells are
  not determined by vertex sets alone.
"""

from .exact import abgroup, intmat


class ChainComplexData:
    """Graded integer boundary matrices d_n : C_n -> C_{n-1}."""

    def __init__(self, dims: dict, boundaries: dict):
        self.dims = dict(dims)
        self.boundaries = dict(boundaries)

    def check_complex(self) -> bool:
        for n, dn in self.boundaries.items():
            dn1 = self.boundaries.get(n + 1)
            if dn1 and dn and intmat.shape(dn)[1] and intmat.shape(dn1)[1]:
                prod = intmat.matmul(dn, dn1)
                if any(v for row in prod for v in row):
                    return False
        return True

    def homology(self, coeff=abgroup.Z) -> dict:
        return abgroup.chain_homology(self.dims, self.boundaries, coeff)

    def top_degree(self) -> int:
        return max((n for n, d in self.dims.items() if d), default=-1)


class SimplicialComplex:
    """Finite simplicial complex on sortable, hashable vertex labels."""

    def __init__(self, simplices):
        """simplices: iterable of vertex tuples; closed under faces
        automatically."""
        by_dim: dict[int, set] = {}
        for s in simplices:
            s = tuple(sorted(set(s)))
            if not s:
                continue
            for sub in _all_faces(s):
                by_dim.setdefault(len(sub) - 1, set()).add(sub)
        self.simplices = {d: sorted(ss) for d, ss in sorted(by_dim.items())}
        self.index = {
            d: {s: i for i, s in enumerate(ss)} for d, ss in self.simplices.items()
        }

    @property
    def dim(self) -> int:
        return max(self.simplices, default=-1)

    def n_cells(self, d: int) -> int:
        return len(self.simplices.get(d, []))

    def boundary_matrix(self, n: int):
        """d_n : C_n -> C_{n-1} with the alternating-face convention."""
        rows = self.n_cells(n - 1)
        cols = self.n_cells(n)
        M = intmat.zeros(rows, cols)
        if n <= 0 or not cols:
            return M
        idx = self.index[n - 1]
        for j, s in enumerate(self.simplices[n]):
            for i in range(len(s)):
                face = s[:i] + s[i + 1 :]
                M[idx[face]][j] += (-1) ** i
        return M

    def chain_complex(self, augmented: bool = False) -> ChainComplexData:
        dims = {d: self.n_cells(d) for d in self.simplices}
        boundaries = {d: self.boundary_matrix(d) for d in dims if d >= 1}
        if augmented:
            dims[-1] = 1
            boundaries[0] = [[1] * self.n_cells(0)]
        return ChainComplexData(dims, boundaries)

    def homology(self, coeff=abgroup.Z, augmented: bool = False):
        return self.chain_complex(augmented).homology(coeff)

    def barycentric_subdivision(self):
        """Barycentric subdivision: new vertices are the old simplices,
        new simplices are chains of old simplices under strict inclusion."""
        chains = []

        def dfs(chain):
            chains.append(tuple(chain))
            last = set(chain[-1])
            for d in range(len(chain[-1]), self.dim + 1):
                for s in self.simplices.get(d, []):
                    if last < set(s):
                        dfs(chain + [s])

        for ss in self.simplices.values():
            for s in ss:
                dfs([s])
        return SimplicialComplex(chains)

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * self.n_cells(d) for d in self.simplices)


def _all_faces(s):
    out = []
    n = len(s)
    for mask in range(1, 1 << n):
        out.append(tuple(s[i] for i in range(n) if mask >> i & 1))
    return out


class CellComplex:
    """Regular-CW-style complex: cells carry explicit boundaries.

    cells[d] is a list of labels; boundary lists give (face_index,
    coefficient) pairs into dimension d-1.
    """

    def __init__(self):
        self.cells: dict[int, list] = {}
        self.boundary: dict[int, list] = {}
        self._index: dict[int, dict] = {}

    def add_cell(self, d: int, label, faces=()) -> int:
        """faces: iterable of (face_label, coeff) with faces already added."""
        self.cells.setdefault(d, [])
        self.boundary.setdefault(d, [])
        self._index.setdefault(d, {})
        if label in self._index[d]:
            raise ValueError(f"duplicate cell {label!r} in dimension {d}")
        idx = len(self.cells[d])
        self.cells[d].append(label)
        self._index[d][label] = idx
        blist = []
        for flabel, coeff in faces:
            blist.append((self._index[d - 1][flabel], coeff))
        self.boundary[d].append(blist)
        return idx

    def has_cell(self, d: int, label) -> bool:
        return label in self._index.get(d, {})

    def cell_index(self, d: int, label) -> int:
        return self._index[d][label]

    def n_cells(self, d: int) -> int:
        return len(self.cells.get(d, []))

    @property
    def dim(self) -> int:
        return max((d for d, cs in self.cells.items() if cs), default=-1)

    def boundary_matrix(self, n: int):
        rows = self.n_cells(n - 1)
        cols = self.n_cells(n)
        M = intmat.zeros(rows, cols)
        for j, blist in enumerate(self.boundary.get(n, [])):
            for i, coeff in blist:
                M[i][j] += coeff
        return M

    def chain_complex(self) -> ChainComplexData:
        dims = {d: self.n_cells(d) for d in self.cells}
        boundaries = {d: self.boundary_matrix(d) for d in dims if d >= 1}
        return ChainComplexData(dims, boundaries)

    def homology(self, coeff=abgroup.Z):
        return self.chain_complex().homology(coeff)

    def component_count(self) -> int:
        """Connected components through 1-cells."""
        n0 = self.n_cells(0)
        parent = list(range(n0))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for blist in self.boundary.get(1, []):
            ends = [i for i, _ in blist]
            for other in ends[1:]:
                ra, rb = find(ends[0]), find(other)
                if ra != rb:
                    parent[ra] = rb
        return len({find(i) for i in range(n0)})
