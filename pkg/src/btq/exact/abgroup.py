"""Finitely generated abelian groups and the homology backend.

Coefficient rings are Z, Z/l for an odd prime l, and Z[1/2].  The
Z[1/2] computation is a post-processing rule on the integral result:
discard all 2-power torsion.  This is valid because Z[1/2] is flat over
Z, so localizing the chain complex commutes with taking homology.
"""

from dataclasses import dataclass
from math import gcd

from .. import kernels
from . import intmat

# --- coefficient rings -------------------------------------------------

Z = "Z"
ZHALF = "Z[1/2]"


def Zmod(l: int) -> tuple:
    if l == 2 or l < 2 or not _is_prime(l):
        raise ValueError("coefficient field must be Z/l for an odd prime l")
    return ("Z/", l)


def _is_prime(n):
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def coeff_name(coeff) -> str:
    if coeff == Z:
        return "Z"
    if coeff == ZHALF:
        return "Z[1/2]"
    return f"Z/{coeff[1]}"


# --- groups ------------------------------------------------------------


@dataclass(frozen=True)
class FgAbGroup:
    """Free rank plus torsion invariant factors (each > 1, d_i | d_{i+1})."""

    rank: int
    torsion: tuple = ()

    def __post_init__(self):
        for i, d in enumerate(self.torsion):
            if d <= 1:
                raise ValueError("torsion factors must exceed 1")
            if i and self.torsion[i] % self.torsion[i - 1]:
                raise ValueError("torsion factors must form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    def order(self):
        if self.rank:
            raise ValueError("infinite group")
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def localize_away_2(self) -> "FgAbGroup":
        tors = []
        for d in self.torsion:
            while d % 2 == 0:
                d //= 2
            if d > 1:
                tors.append(d)
        return FgAbGroup(self.rank, tuple(sorted(tors)))

    def tensor_coeff(self, coeff) -> "FgAbGroup":
        if coeff == Z:
            return self
        if coeff == ZHALF:
            return self.localize_away_2()
        l = coeff[1]
        dim = self.rank + sum(1 for d in self.torsion if d % l == 0)
        return FgAbGroup(0, (l,) * dim)

    def __str__(self):
        if self.is_trivial:
            return "0"
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts)


TRIVIAL = FgAbGroup(0, ())


def from_invariant_factors(rank: int, factors) -> FgAbGroup:
    return FgAbGroup(rank, tuple(d for d in factors if d > 1))


def cokernel(relations, ngens: int, coeff=Z) -> FgAbGroup:
    """Z^ngens modulo the column span of the relation matrix."""
    m, n = intmat.shape(relations)
    if m not in (0, ngens):
        raise ValueError("relation matrix has wrong number of rows")
    if coeff == Z or coeff == ZHALF:
        facs = kernels.snf_diagonal(relations) if m else []
        g = from_invariant_factors(ngens - len(facs), facs)
        return g if coeff == Z else g.localize_away_2()
    l = coeff[1]
    r = kernels.rank_mod_p(relations, l) if m else 0
    return FgAbGroup(0, (l,) * (ngens - r))


def homology_of_pair(d_n, d_n1, coeff=Z) -> FgAbGroup:
    """ker(d_n)/im(d_n1) for consecutive boundary maps.

    d_n maps C_n -> C_{n-1} (shape dim_{n-1} x dim_n) and d_n1 maps
    C_{n+1} -> C_n (shape dim_n x dim_{n+1}); requires d_n . d_n1 = 0.

    The free rank is dim_n - rank(d_n) - rank(d_n1); the torsion equals
    the invariant factors of d_{n+1} exceeding 1 (the quotient of Z^n by
    the image splits off the homology, since Z^n/ker is free).
    """
    mn, dim_n = intmat.shape(d_n)
    dim_n2, k = intmat.shape(d_n1)
    if mn and k and dim_n != dim_n2:
        raise ValueError(f"boundary shapes incompatible: {intmat.shape(d_n)} vs {intmat.shape(d_n1)}")
    dim = dim_n if mn else dim_n2
    if mn and k:
        comp = intmat.matmul(d_n, d_n1)
        if any(v for row in comp for v in row):
            raise ValueError("not a complex: d_n . d_{n+1} != 0")
    if coeff == Z or coeff == ZHALF:
        rank_a = len(kernels.snf_diagonal(d_n)) if mn else 0
        facs_b = kernels.snf_diagonal(d_n1) if k else []
        g = from_invariant_factors(dim - rank_a - len(facs_b), facs_b)
        return g if coeff == Z else g.localize_away_2()
    l = coeff[1]
    ra = kernels.rank_mod_p(d_n, l) if mn else 0
    rb = kernels.rank_mod_p(d_n1, l) if k else 0
    return FgAbGroup(0, (l,) * (dim - ra - rb))


def chain_homology(dims, boundaries, coeff=Z):
    """Homology of a finite chain complex.

    dims: dict degree -> dimension; boundaries: dict degree n ->
    matrix of d_n : C_n -> C_{n-1}.  Returns dict degree -> FgAbGroup.
    """
    out = {}
    degrees = sorted(dims)
    for n in degrees:
        dn = boundaries.get(n)
        if dn is None or not dims.get(n - 1, 0):
            dn = intmat.zeros(dims.get(n - 1, 0), dims[n])
        dn1 = boundaries.get(n + 1)
        if dn1 is None or not dims.get(n + 1, 0):
            dn1 = intmat.zeros(dims[n], dims.get(n + 1, 0))
        out[n] = homology_of_pair(dn, dn1, coeff)
    return out
