"""The rational function field F_q(t), stored in reduced form.

Every element is numerator/denominator with gcd 1 and monic
denominator, so equality is structural and hashing is safe.
"""

from .gf import GF
from .poly import Poly


class RF:
    __slots__ = ("field", "num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        F = num.field
        if den is None or den.coeffs == (1,):
            self.field = F
            self.num = num
            self.den = Poly.one(F)
            return
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = Poly.one(F)
        else:
            g = num.gcd(den)
            if not g.is_one():
                num, den = num // g, den // g
            lc = den.leading()
            if lc != 1:
                inv = F.inv(lc)
                num, den = num.scale(inv), den.scale(inv)
        self.field = F
        self.num = num
        self.den = den

    # --- constructors ---

    @staticmethod
    def zero(field: GF):
        return RF(Poly.zero(field))

    @staticmethod
    def one(field: GF):
        return RF(Poly.one(field))

    @staticmethod
    def const(field: GF, c: int):
        return RF(Poly.const(field, c))

    @staticmethod
    def t(field: GF):
        return RF(Poly.x(field))

    @staticmethod
    def from_poly(p: Poly):
        return RF(p)

    # --- queries ---

    def is_zero(self):
        return self.num.is_zero()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_one()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        return (
            isinstance(other, RF)
            and self.field == other.field
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    # --- arithmetic ---

    def __add__(self, other):
        return RF(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RF(-self.num, self.den)

    def __sub__(self, other):
        return RF(self.num * other.den - other.num * self.den, self.den * other.den)

    def __mul__(self, other):
        return RF(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RF(self.num * other.den, self.den * other.num)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RF(self.den, self.num)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        r = RF.one(self.field)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def scale(self, c: int):
        return RF(self.num.scale(c), self.den)

    def chart_swap(self):
        """The involution t -> 1/t: returns f(1/u) as an element of F_q(u)."""
        dn, dd = self.num.degree, self.den.degree
        if self.is_zero():
            return self
        rn = self.num.reverse()
        rd = self.den.reverse()
        if dd >= dn:
            return RF(rn.shift(dd - dn), rd)
        return RF(rn, rd.shift(dn - dd))

    def __repr__(self):
        if self.den.is_one():
            return f"({self.num})"
        return f"({self.num})/({self.den})"
