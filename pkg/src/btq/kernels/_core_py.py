"""Pure-Python integer elimination kernels (arbitrary precision).

This is the fallback backend: always available, always exact.  The
compiled backend in ``_core.pyx`` mirrors ``snf_diagonal`` and
``rank_mod_p`` on int64 and is selected at import when present; it
raises ``OverflowError`` when entries outgrow int64, in which case the
caller retries here.
"""

from math import gcd

BACKEND = "python"


def _balanced_div(a, b):
    """Quotient q minimizing |a - q*b| (ties toward floor)."""
    q, r = divmod(a, b)
    if 2 * r > abs(b):
        q += 1 if b > 0 else -1
    return q


def _snf_inplace(A, m, n, U, V):
    """Diagonalize A by unimodular row/col ops; returns diagonal length.

    U, V are updated alongside when not None.  After corner t is
    finished A[t][t] divides every entry of the remaining block, so the
    diagonal is the invariant-factor chain up to sign.
    """
    t = 0
    while t < m and t < n:
        # pivot: nonzero entry of minimal absolute value (ties: row-major)
        pi = pj = -1
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                v = Ai[j]
                if v and (best is None or abs(v) < best):
                    best = abs(v)
                    pi, pj = i, j
        if best is None:
            break
        if pi != t:
            A[t], A[pi] = A[pi], A[t]
            if U is not None:
                U[t], U[pi] = U[pi], U[t]
        if pj != t:
            for row in A:
                row[t], row[pj] = row[pj], row[t]
            if V is not None:
                for row in V:
                    row[t], row[pj] = row[pj], row[t]

        while True:
            # clear column t
            restart = False
            for i in range(t + 1, m):
                a = A[i][t]
                if a == 0:
                    continue
                q = _balanced_div(a, A[t][t])
                if q:
                    Ai, At = A[i], A[t]
                    for j in range(t, n):
                        Ai[j] -= q * At[j]
                    if U is not None:
                        Ui, Ut = U[i], U[t]
                        for j in range(m):
                            Ui[j] -= q * Ut[j]
                if A[i][t]:
                    # smaller remainder becomes the pivot
                    A[t], A[i] = A[i], A[t]
                    if U is not None:
                        U[t], U[i] = U[i], U[t]
                    restart = True
                    break
            if restart:
                continue
            # clear row t
            for j in range(t + 1, n):
                a = A[t][j]
                if a == 0:
                    continue
                q = _balanced_div(a, A[t][t])
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                    if V is not None:
                        for row in V:
                            row[j] -= q * row[t]
                if A[t][j]:
                    for row in A:
                        row[t], row[j] = row[j], row[t]
                    if V is not None:
                        for row in V:
                            row[t], row[j] = row[j], row[t]
                    restart = True
                    break
            if restart:
                continue
            # divisibility: A[t][t] must divide the remaining block
            d = A[t][t]
            bad = None
            for i in range(t + 1, m):
                Ai = A[i]
                for j in range(t + 1, n):
                    if Ai[j] % d:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            At, Ab = A[t], A[bad]
            for j in range(t, n):
                At[j] += Ab[j]
            if U is not None:
                Ut, Ub = U[t], U[bad]
                for j in range(m):
                    Ut[j] += Ub[j]
        if A[t][t] < 0:
            for row in A:
                row[t] = -row[t]
            if V is not None:
                for row in V:
                    row[t] = -row[t]
        t += 1
    return t


def snf_diagonal(rows):
    """Invariant factors of an integer matrix (list of positive ints, d_i | d_{i+1})."""
    A = [[int(v) for v in r] for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0 or n == 0:
        return []
    k = _snf_inplace(A, m, n, None, None)
    return [A[i][i] for i in range(k)]


def snf_transform(rows):
    """Invariant factors plus unimodular U, V with U*M*V = diag(factors)."""
    A = [[int(v) for v in r] for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    if m and n:
        k = _snf_inplace(A, m, n, U, V)
        factors = [A[i][i] for i in range(k)]
    else:
        factors = []
    return factors, U, V


def rank_mod_p(rows, p):
    """Rank of an integer matrix over the prime field F_p."""
    A = [[int(v) % p for v in r] for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    rank = 0
    col = 0
    while rank < m and col < n:
        piv = -1
        for i in range(rank, m):
            if A[i][col]:
                piv = i
                break
        if piv < 0:
            col += 1
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][col], p - 2, p)
        Ar = A[rank]
        for j in range(col, n):
            Ar[j] = Ar[j] * inv % p
        for i in range(m):
            if i != rank and A[i][col]:
                f = A[i][col]
                Ai = A[i]
                for j in range(col, n):
                    Ai[j] = (Ai[j] - f * Ar[j]) % p
        rank += 1
        col += 1
    return rank
