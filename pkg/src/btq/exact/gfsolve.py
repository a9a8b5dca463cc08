"""Dense linear algebra over a finite field (int-encoded entries)."""

from .gf import GF


def rref(F: GF, rows):
    """Reduced row echelon form; returns (matrix, pivot column list)."""
    A = [list(r) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = F.inv(A[r][c])
        A[r] = [F.mul(inv, x) for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def kernel(F: GF, rows, ncols=None):
    """Basis of the right kernel (list of coordinate vectors)."""
    m = len(rows)
    n = ncols if ncols is not None else (len(rows[0]) if m else 0)
    if m == 0:
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    A, pivots = rref(F, rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = F.neg(A[r][fc])
        basis.append(v)
    return basis


def rank(F: GF, rows) -> int:
    return len(rref(F, rows)[1])


def solve(F: GF, rows, rhs):
    """One solution of A x = b over F, or None."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    A, pivots = rref(F, aug)
    for row in A:
        if not any(row[:n]) and row[n]:
            return None
    x = [0] * n
    for r, pc in enumerate(pivots):
        if pc == n:
            return None
        x[pc] = A[r][n]
    return x
