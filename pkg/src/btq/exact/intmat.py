"""Integer matrices, Smith normal form, kernels and integer solving.

Matrices are plain lists of rows of Python ints.  The heavy elimination
is delegated to :mod:`btq.kernels` (compiled when available); the
transform-producing path is always arbitrary precision.
"""

from dataclasses import dataclass

from .. import kernels


def shape(M):
    return (len(M), len(M[0]) if M else 0)


def zeros(m, n):
    return [[0] * n for _ in range(m)]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(A, B):
    ma, na = shape(A)
    mb, nb = shape(B)
    if na != mb:
        raise ValueError(f"shape mismatch {shape(A)} x {shape(B)}")
    out = zeros(ma, nb)
    for i in range(ma):
        Ai = A[i]
        Oi = out[i]
        for k in range(na):
            a = Ai[k]
            if a:
                Bk = B[k]
                for j in range(nb):
                    if Bk[j]:
                        Oi[j] += a * Bk[j]
    return out


def transpose(M):
    m, n = shape(M)
    return [[M[i][j] for i in range(m)] for j in range(n)]


def det(M):
    """Determinant by Bareiss elimination (exact)."""
    m, n = shape(M)
    if m != n:
        raise ValueError("determinant of non-square matrix")
    if m == 0:
        return 1
    A = [row[:] for row in M]
    sign = 1
    prev = 1
    for k in range(m - 1):
        if A[k][k] == 0:
            piv = next((i for i in range(k + 1, m) if A[i][k]), None)
            if piv is None:
                return 0
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * A[m - 1][m - 1]


@dataclass(frozen=True)
class SNFResult:
    """Invariant factors d_1 | d_2 | ... (nonzero) with optional transforms."""

    factors: tuple
    shape: tuple
    U: list | None = None
    V: list | None = None

    @property
    def rank(self) -> int:
        return len(self.factors)

    def verify(self) -> bool:
        """U*M*V equals the padded diagonal (requires transforms and M)."""
        raise NotImplementedError("use verify_snf(M, result)")


def snf(M, transforms: bool = False) -> SNFResult:
    sh = shape(M)
    if not transforms:
        facs = kernels.snf_diagonal(M)
        return SNFResult(tuple(facs), sh)
    facs, U, V = kernels.snf_transform(M)
    return SNFResult(tuple(facs), sh, U, V)


def verify_snf(M, res: SNFResult) -> bool:
    if res.U is None or res.V is None:
        raise ValueError("SNF verification needs transforms")
    m, n = res.shape
    if abs(det(res.U)) != 1 or abs(det(res.V)) != 1:
        return False
    D = matmul(matmul(res.U, M), res.V)
    for i in range(m):
        for j in range(n):
            want = res.factors[i] if i == j and i < len(res.factors) else 0
            if D[i][j] != want:
                return False
    return True


def rank(M) -> int:
    return snf(M).rank


def kernel_basis(M):
    """Basis (list of column vectors) of the integer kernel of M.

    The basis spans the saturated kernel lattice: columns of V past the
    rank, where U*M*V is diagonal.
    """
    m, n = shape(M)
    if n == 0:
        return []
    if m == 0:
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    res = snf(M, transforms=True)
    r = res.rank
    return [[res.V[i][j] for i in range(n)] for j in range(r, n)]


def solve(M, b):
    """One integer solution x of M x = b, or None."""
    m, n = shape(M)
    if len(b) != m:
        raise ValueError("rhs length mismatch")
    if n == 0:
        return [] if all(v == 0 for v in b) else None
    if m == 0:
        return [0] * n
    res = snf(M, transforms=True)
    ub = [sum(res.U[i][k] * b[k] for k in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        if i < res.rank:
            d = res.factors[i]
            if ub[i] % d:
                return None
            y[i] = ub[i] // d
        elif ub[i]:
            return None
    return [sum(res.V[i][k] * y[k] for k in range(min(n, len(y)))) for i in range(n)]


def column_stack(*mats):
    """Concatenate matrices with equal row counts side by side."""
    ms = [m for m in mats if shape(m)[1] > 0 or shape(m)[0] > 0]
    rows = {shape(m)[0] for m in ms}
    if len(rows) > 1:
        raise ValueError("row count mismatch")
    m = rows.pop() if rows else 0
    out = []
    for i in range(m):
        row = []
        for mat in mats:
            row.extend(mat[i])
        out.append(row)
    return out


def from_columns(cols, nrows=None):
    """Matrix whose columns are the given vectors."""
    if not cols:
        return [[] for _ in range(nrows or 0)]
    m = len(cols[0])
    return [[c[i] for c in cols] for i in range(m)]


def hermite_column_form(cols, dim):
    """Column-style Hermite form of the lattice spanned by the columns.

    Returns a list of pivot columns, lower-triangular-ish: pivot rows
    strictly increasing, pivot entries positive, entries above reduced.
    """
    work = [list(c) for c in cols if any(c)]
    out = []
    row = 0
    while row < dim and work:
        cand = [c for c in work if c[row] != 0]
        rest = [c for c in work if c[row] == 0]
        if not cand:
            work = rest
            row += 1
            continue
        while len(cand) > 1:
            cand.sort(key=lambda c: abs(c[row]))
            base = cand[0]
            newc = []
            for c in cand[1:]:
                qq = c[row] // base[row]
                c2 = [x - qq * y for x, y in zip(c, base)]
                if any(c2):
                    newc.append(c2)
            cand = [base] + [c for c in newc if c[row] != 0]
            rest.extend(c for c in newc if c[row] == 0 and any(c))
        piv = cand[0]
        if piv[row] < 0:
            piv = [-x for x in piv]
        out.append((row, piv))
        work = rest
        row += 1
    return out


def coset_reduce(x, hermite_pivots):
    """Canonical representative of x modulo the lattice in Hermite form."""
    v = list(x)
    for row, piv in hermite_pivots:
        qq = v[row] // piv[row]
        if qq:
            v = [a - qq * b for a, b in zip(v, piv)]
    return tuple(v)
