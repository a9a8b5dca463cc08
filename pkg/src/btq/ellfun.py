"""Function-field arithmetic on a Weierstrass curve.

Elements regular away from the origin are written u0(x) + u1(x)*y with
y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6.  This module provides:

* exact valuations of such functions at geometric points (norm trick at
  finite points, parity of pole orders at the origin),
* construction of a function with a prescribed principal divisor by
  accumulating chord/tangent/vertical line functions.

Coefficients may live in an extension of the base field; functions with
Galois-stable divisors are normalized (leading coefficient 1 at the
origin) so their coefficients descend to the base field.
"""

from .exact.gf import GF
from .exact.poly import Poly


class EllPoint:
    """A geometric point: the origin, or affine (x, y) encodings over F."""

    __slots__ = ("x", "y", "infinite")

    def __init__(self, x=None, y=None, infinite=False):
        self.infinite = infinite
        self.x = x
        self.y = y

    @staticmethod
    def origin():
        return EllPoint(infinite=True)

    def __eq__(self, other):
        if not isinstance(other, EllPoint):
            return NotImplemented
        if self.infinite or other.infinite:
            return self.infinite and other.infinite
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash(("O",)) if self.infinite else hash((self.x, self.y))

    def __repr__(self):
        return "O" if self.infinite else f"({self.x},{self.y})"

    def sort_key(self):
        return (1, 0, 0) if self.infinite else (0, self.x, self.y)


class WeierstrassArith:
    """Point arithmetic and function arithmetic over a field F (possibly
    an extension of the curve's field of definition)."""

    def __init__(self, F: GF, a1, a2, a3, a4, a6):
        self.F = F
        self.a = (a1, a2, a3, a4, a6)
        a1_, a2_, a3_, a4_, a6_ = a1, a2, a3, a4, a6
        m = F.mul
        ad = F.add
        b2 = ad(m(a1_, a1_), m(4 % F.p, a2_))
        b4 = ad(m(2 % F.p, a4_), m(a1_, a3_))
        b6 = ad(m(a3_, a3_), m(4 % F.p, a6_))
        b8 = ad(
            ad(m(m(a1_, a1_), a6_), m(4 % F.p, m(a2_, a6_))),
            ad(
                F.neg(m(a1_, m(a3_, a4_))),
                ad(m(a2_, m(a3_, a3_)), F.neg(m(a4_, a4_))),
            ),
        )
        disc = ad(
            ad(F.neg(m(m(b2, b2), b8)), F.neg(m(8 % F.p, m(b4, m(b4, b4))))),
            ad(F.neg(m(27 % F.p, m(b6, b6))), m(9 % F.p, m(b2, m(b4, b6)))),
        )
        self.discriminant = disc
        # x-polynomial of the curve: x^3 + a2 x^2 + a4 x + a6
        self.rhs = Poly(F, [a6_, a4_, a2_, 0]) + Poly(F, [0, 0, 0, 1])
        # y-coefficient a1 x + a3
        self.ycoef = Poly(F, [a3_, a1_])

    def on_curve(self, pt: EllPoint) -> bool:
        if pt.infinite:
            return True
        F = self.F
        lhs = F.add(F.mul(pt.y, pt.y), F.mul(pt.y, self.ycoef(pt.x, F)))
        return lhs == self.rhs(pt.x, F)

    def points(self):
        """All F-points, origin included."""
        F = self.F
        out = [EllPoint.origin()]
        for x in F.elements():
            # y^2 + c(x) y - rhs(x) = 0
            c = self.ycoef(x, F)
            r = self.rhs(x, F)
            for y in F.elements():
                if F.add(F.mul(y, y), F.mul(c, y)) == r:
                    out.append(EllPoint(x, y))
        return out

    def neg(self, pt: EllPoint) -> EllPoint:
        if pt.infinite:
            return pt
        F = self.F
        return EllPoint(pt.x, F.sub(F.neg(pt.y), self.ycoef(pt.x, F)))

    def add(self, p: EllPoint, q: EllPoint) -> EllPoint:
        F = self.F
        if p.infinite:
            return q
        if q.infinite:
            return p
        if q == self.neg(p):
            return EllPoint.origin()
        a1, a2, a3, a4, a6 = self.a
        if p.x == q.x and p.y == q.y:
            num = F.add(
                F.add(F.mul(3 % F.p, F.mul(p.x, p.x)), F.mul(2 % F.p, F.mul(a2, p.x))),
                F.sub(a4, F.mul(a1, p.y)),
            )
            den = F.add(F.add(F.mul(2 % F.p, p.y), F.mul(a1, p.x)), a3)
            lam = F.div(num, den)
            nu = F.div(
                F.add(
                    F.add(F.neg(F.mul(p.x, F.mul(p.x, p.x))), F.mul(a4, p.x)),
                    F.add(F.mul(2 % F.p, a6), F.neg(F.mul(a3, p.y))),
                ),
                den,
            )
        else:
            lam = F.div(F.sub(q.y, p.y), F.sub(q.x, p.x))
            nu = F.div(F.sub(F.mul(p.y, q.x), F.mul(q.y, p.x)), F.sub(q.x, p.x))
        x3 = F.sub(F.sub(F.add(F.mul(lam, lam), F.mul(a1, lam)), a2), F.add(p.x, q.x))
        y3 = F.sub(F.neg(F.mul(F.add(lam, a1), x3)), F.add(nu, a3))
        return EllPoint(x3, y3)

    def mul_point(self, n: int, pt: EllPoint) -> EllPoint:
        if n < 0:
            return self.mul_point(-n, self.neg(pt))
        acc = EllPoint.origin()
        add = pt
        while n:
            if n & 1:
                acc = self.add(acc, add)
            add = self.add(add, add)
            n >>= 1
        return acc

    def order_of(self, pt: EllPoint) -> int:
        n = 1
        cur = pt
        while not cur.infinite:
            cur = self.add(cur, pt)
            n += 1
        return n

    def is_ramified(self, pt: EllPoint) -> bool:
        """Fixed by the hyperelliptic involution (x - x0 has valuation 2)."""
        if pt.infinite:
            return True
        F = self.F
        return F.add(F.mul(2 % F.p, pt.y), self.ycoef(pt.x, F)) == 0

    # --- functions u0 + u1*y ---

    def fmul(self, a, b):
        """(u0,u1)*(v0,v1) with y^2 reduced via the curve equation."""
        u0, u1 = a
        v0, v1 = b
        cross = u1 * v1
        return (
            u0 * v0 + cross * self.rhs,
            u0 * v1 + u1 * v0 - cross * self.ycoef,
        )

    def fconj(self, a):
        u0, u1 = a
        return (u0 - u1 * self.ycoef, -u1)

    def fnorm(self, a) -> Poly:
        n0, n1 = self.fmul(a, self.fconj(a))
        if not n1.is_zero():
            raise RuntimeError("norm has a y-part; curve reduction broken")
        return n0

    def feval(self, a, pt: EllPoint):
        u0, u1 = a
        F = self.F
        return F.add(u0(pt.x, F), F.mul(u1(pt.x, F), pt.y))

    def val_origin(self, a) -> int:
        """Valuation at the origin: v(x) = -2, v(y) = -3 (parities differ,
        so the minimum is always strict)."""
        u0, u1 = a
        vals = []
        if not u0.is_zero():
            vals.append(-2 * u0.degree)
        if not u1.is_zero():
            vals.append(-2 * u1.degree - 3)
        if not vals:
            raise ValueError("valuation of zero function")
        return min(vals)

    def val_finite(self, a, pt: EllPoint) -> int:
        """Valuation of u0 + u1*y at an affine point."""
        u0, u1 = a
        if u0.is_zero() and u1.is_zero():
            raise ValueError("valuation of zero function")
        F = self.F
        xfac = Poly(F, [F.neg(pt.x), 1])
        e = 2 if self.is_ramified(pt) else 1
        k = 0
        while True:
            d0, r0 = divmod(u0, xfac) if not u0.is_zero() else (u0, u0)
            d1, r1 = divmod(u1, xfac) if not u1.is_zero() else (u1, u1)
            if (u0.is_zero() or r0.is_zero()) and (u1.is_zero() or r1.is_zero()):
                u0 = d0 if not u0.is_zero() else u0
                u1 = d1 if not u1.is_zero() else u1
                k += 1
                continue
            break
        base = k * e
        if u1.is_zero():
            return base + u0.multiplicity_of(xfac) * e
        if self.feval((u0, u1), pt) != 0:
            return base
        norm = self.fnorm((u0, u1))
        mult = norm.multiplicity_of(xfac)
        if e == 2:
            return base + mult
        # unramified and vanishing at pt: conjugate does not vanish there
        conj_val = self.feval(self.fconj((u0, u1)), pt)
        if conj_val == 0:
            raise RuntimeError("strip loop left common vanishing pair")
        return base + mult

    # --- line functions ---

    def line_through(self, p: EllPoint, q: EllPoint):
        """Chord/tangent through p, q (p = q allowed; neither infinite,
        q != -p).  Returns (u0, u1) with divisor (p)+(q)+(-(p+q))-3(O)."""
        F = self.F
        a1, a2, a3, a4, a6 = self.a
        if p == q:
            den = F.add(F.add(F.mul(2 % F.p, p.y), F.mul(a1, p.x)), a3)
            num = F.add(
                F.add(F.mul(3 % F.p, F.mul(p.x, p.x)), F.mul(2 % F.p, F.mul(a2, p.x))),
                F.sub(a4, F.mul(a1, p.y)),
            )
            lam = F.div(num, den)
        else:
            lam = F.div(F.sub(q.y, p.y), F.sub(q.x, p.x))
        nu = F.sub(p.y, F.mul(lam, p.x))
        return (Poly(F, [F.neg(nu), F.neg(lam)]), Poly.one(F))

    def vertical(self, p: EllPoint):
        """x - x(p): divisor (p) + (-p) - 2(O)."""
        return (Poly(self.F, [self.F.neg(p.x), 1]), Poly.zero(self.F))


class PrincipalFunction:
    """A function with prescribed divisor, as num/den of (u0,u1)-pairs."""

    def __init__(self, arith: WeierstrassArith):
        self.E = arith
        one = (Poly.one(arith.F), Poly.zero(arith.F))
        self.num = one
        self.den = one

    def mul_factor(self, f):
        self.num = self.E.fmul(self.num, f)

    def div_factor(self, f):
        self.den = self.E.fmul(self.den, f)

    def valuation(self, pt: EllPoint, arith: WeierstrassArith | None = None) -> int:
        """Valuation at a geometric point; pass an extension arithmetic to
        evaluate at points over a larger field (prime-subfield coefficient
        encodings embed identically)."""
        E = arith or self.E
        if E is self.E:
            num, den = self.num, self.den
        else:
            num = tuple(Poly(E.F, p.coeffs) for p in self.num)
            den = tuple(Poly(E.F, p.coeffs) for p in self.den)
        if pt.infinite:
            return E.val_origin(num) - E.val_origin(den)
        return E.val_finite(num, pt) - E.val_finite(den, pt)

    def as_single_fraction(self):
        """(U0, U1, D): the function (U0 + U1 y)/D with polynomial D."""
        E = self.E
        dbar = E.fconj(self.den)
        n0, n1 = E.fmul(self.num, dbar)
        D = E.fnorm(self.den)
        return n0, n1, D

    def leading_at_origin(self):
        """Leading coefficient of the expansion at the origin."""
        c_num = _lead(self.E, self.num)
        c_den = _lead(self.E, self.den)
        return self.E.F.div(c_num, c_den)

    def scale(self, c):
        F = self.E.F
        u0, u1 = self.num
        self.num = (u0.scale(c), u1.scale(c))


def _lead(E: WeierstrassArith, a):
    u0, u1 = a
    v0 = -2 * u0.degree if not u0.is_zero() else None
    v1 = -2 * u1.degree - 3 if not u1.is_zero() else None
    if v1 is None or (v0 is not None and v0 < v1):
        return u0.leading()
    return u1.leading()


def principal_function(arith: WeierstrassArith, divisor: dict):
    """Build f with div(f) = divisor (a dict EllPoint -> int, including
    the origin's coefficient; must be principal).

    Chord/tangent accumulation: h(A,B) = line(A,B)/vertical(A+B) has
    divisor (A)+(B)-(A+B)-(O); folding the positive and negative parts
    reduces everything to a difference that must cancel exactly.
    """
    E = arith
    pf = PrincipalFunction(E)
    pos = []
    neg = []
    for pt, c in divisor.items():
        if pt.infinite:
            continue
        (pos if c > 0 else neg).extend([pt] * abs(c))
    s_pos = _fold(pf, pos, invert=False)
    s_neg = _fold(pf, neg, invert=True)
    if s_pos != s_neg:
        raise ValueError("divisor is not principal (nonzero image on the curve)")
    if not s_pos.infinite:
        # remaining (T) - (T) cancels; nothing to multiply
        pass
    deg = sum(c for c in divisor.values())
    if deg != 0:
        raise ValueError("divisor is not principal (nonzero degree)")
    # normalize: leading coefficient 1 at the origin, so that functions
    # with Galois-stable divisors have base-field coefficients
    c = pf.leading_at_origin()
    pf.scale(E.F.inv(c))
    return pf


def _fold(pf: PrincipalFunction, pts, invert: bool):
    E = pf.E
    acc = EllPoint.origin()
    for pt in pts:
        factor, acc = _combine(E, acc, pt)
        apply_factor(pf, factor, invert)
    return acc


def _combine(E: WeierstrassArith, s: EllPoint, a: EllPoint):
    """Factor with divisor (s)+(a)-(s+a)-(O) and the new accumulator."""
    if s.infinite:
        return None, a
    if a.infinite:
        return None, s
    if a == E.neg(s):
        return E.vertical(s), EllPoint.origin()
    line = E.line_through(s, a)
    t = E.add(s, a)
    if t.infinite:
        raise RuntimeError("unreachable: s+a = O was handled")
    vert = E.vertical(t)
    # line / vertical: multiply numerator by line, denominator by vertical
    return ("frac", line, vert), t


def apply_factor(pf: PrincipalFunction, factor, invert: bool):
    if isinstance(factor, tuple) and factor and factor[0] == "frac":
        _, line, vert = factor
        if invert:
            pf.div_factor(line)
            pf.mul_factor(vert)
        else:
            pf.mul_factor(line)
            pf.div_factor(vert)
    elif factor is not None:
        if invert:
            pf.div_factor(factor)
        else:
            pf.mul_factor(factor)
