"""Places of P^1 over F_q: discrete valuations, residues, pi-adic expansions.

A place is either a monic irreducible polynomial pi(t) or the
distinguished place at infinity with uniformizer 1/t.  Residue-field
elements are always represented by their canonical polynomial lift of
degree < deg(P); this lift convention is what makes canonical tree
coordinates (and everything built on them) deterministic.
"""

from .gf import GF
from .poly import Poly
from .ratfunc import RF


class Place:
    __slots__ = ("field", "pi", "_hash")

    def __init__(self, field: GF, pi: Poly | None):
        """pi = monic irreducible polynomial, or None for infinity."""
        if pi is not None:
            if pi.leading() != 1:
                raise ValueError("finite place needs a monic polynomial")
            if not pi.is_irreducible():
                raise ValueError(f"{pi!r} is not irreducible")
        self.field = field
        self.pi = pi
        self._hash = hash((field.p, field.e, None if pi is None else pi.coeffs))

    @staticmethod
    def finite(pi: Poly) -> "Place":
        return Place(pi.field, pi)

    @staticmethod
    def infinity(field: GF) -> "Place":
        return Place(field, None)

    @property
    def is_infinite(self) -> bool:
        return self.pi is None

    @property
    def degree(self) -> int:
        return 1 if self.pi is None else self.pi.degree

    def __eq__(self, other):
        return (
            isinstance(other, Place)
            and self.field == other.field
            and self.pi == other.pi
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "inf" if self.pi is None else repr(self.pi)

    def sort_key(self):
        return (1, ()) if self.pi is None else (0, self.pi.coeffs)

    def uniformizer(self) -> RF:
        if self.pi is None:
            return RF(Poly.one(self.field), Poly.x(self.field))
        return RF(self.pi)

    # --- valuation theory ---

    def valuation(self, f: RF) -> int:
        if f.is_zero():
            raise ValueError("valuation of zero undefined")
        if self.pi is None:
            return f.den.degree - f.num.degree
        return f.num.multiplicity_of(self.pi) - f.den.multiplicity_of(self.pi)

    def residue(self, f: RF) -> Poly:
        """Residue of f (valuation >= 0) as a lift of degree < deg P.

        At infinity the residue is the constant obtained in the 1/t chart.
        """
        if f.is_zero():
            return Poly.zero(self.field)
        if self.pi is None:
            g = f.chart_swap()
            return Place.finite(Poly.x(self.field)).residue(g)
        pi = self.pi
        kn = f.num.multiplicity_of(pi)
        kd = f.den.multiplicity_of(pi)
        if kn < kd:
            raise ValueError("negative valuation has no residue")
        num, den = f.num, f.den
        for _ in range(kd):
            num, den = num // pi, den // pi
        num, den = num % pi if kn == kd else Poly.zero(self.field), den % pi
        if kn > kd:
            return Poly.zero(self.field)
        return (num * den.inverse_mod(pi)) % pi

    def expand(self, f: RF, upper: int):
        """pi-adic expansion: list of (exponent, lift) pairs, exponents
        from v_P(f) to upper-1, lifts nonzero polys of degree < deg P."""
        if f.is_zero():
            return []
        out = []
        g = f
        if self.pi is None:
            g = f.chart_swap()
            place = Place.finite(Poly.x(self.field))
            return place.expand(g, upper)
        pi_rf = RF(self.pi)
        while not g.is_zero():
            v = self.valuation(g)
            if v >= upper:
                break
            c = self.residue(g * pi_rf ** (-v))
            out.append((v, c))
            g = g - RF(c) * pi_rf**v
        return out

    def from_expansion(self, terms) -> RF:
        """Reassemble sum of lift * pi^exponent (lifts are constants at infinity)."""
        acc = RF.zero(self.field)
        pi_rf = self.uniformizer()
        for v, c in terms:
            acc = acc + RF(c) * pi_rf**v
        return acc


def valuation(f: RF, place: Place) -> int:
    """v_P(f); additive on products, sums to zero against degrees."""
    return place.valuation(f)


def padic_expand(f: RF, place: Place, upper: int):
    """Expansion coefficients of f below pi^upper (deterministic lifts)."""
    return place.expand(f, upper)


def places_of_degree(field: GF, d: int, include_infinity: bool = True):
    """All places of P^1/F_q of the exact degree d."""
    from .poly import monic_polys

    out = []
    if d == 1 and include_infinity:
        out.append(Place.infinity(field))
    for f in monic_polys(field, d):
        if f.is_irreducible():
            out.append(Place.finite(f))
    return out
