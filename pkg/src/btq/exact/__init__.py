"""Exact arithmetic foundation: finite fields, F_q(t), places, integer
matrices, Smith normal form and finitely generated abelian groups."""

from .abgroup import (
    TRIVIAL,
    Z,
    ZHALF,
    FgAbGroup,
    Zmod,
    chain_homology,
    coeff_name,
    cokernel,
    from_invariant_factors,
    homology_of_pair,
)
from .gf import GF, gf
from .intmat import SNFResult, kernel_basis, rank, snf, solve, verify_snf
from .places import Place, padic_expand, places_of_degree, valuation
from .poly import Poly, monic_irreducibles, monic_polys, parse_poly
from .ratfunc import RF

__all__ = [
    "GF",
    "gf",
    "Poly",
    "monic_irreducibles",
    "monic_polys",
    "parse_poly",
    "RF",
    "Place",
    "valuation",
    "padic_expand",
    "places_of_degree",
    "snf",
    "verify_snf",
    "rank",
    "kernel_basis",
    "solve",
    "SNFResult",
    "FgAbGroup",
    "TRIVIAL",
    "Z",
    "ZHALF",
    "Zmod",
    "coeff_name",
    "cokernel",
    "from_invariant_factors",
    "homology_of_pair",
    "chain_homology",
]
