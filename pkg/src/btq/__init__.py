"""btq: Bruhat-Tits trees and buildings for rank-2 groups over F_q(t).

Exact, desk-scale computation of: trees of lattice classes and their
products, the dictionary between building vertices and rank-2 vector
bundles on P^1, parabolic subcomplexes and their quotients, Picard
groups of punctured curves, model complexes for quotient components,
isotropy spectral sequences, and complexes of points on P^1.
"""

__version__ = "0.1.0"
