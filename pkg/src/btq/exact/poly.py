"""Dense univariate polynomials over a finite field.

Coefficients are stored little-endian as a normalized tuple of field
encodings (no trailing zeros; the zero polynomial is the empty tuple).
Equality and hashing are structural.
"""

from .gf import GF


class Poly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: GF, coeffs):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    # --- constructors ---

    @staticmethod
    def zero(field):
        return Poly(field, ())

    @staticmethod
    def one(field):
        return Poly(field, (1,))

    @staticmethod
    def const(field, c):
        return Poly(field, (c,))

    @staticmethod
    def x(field):
        return Poly(field, (0, 1))

    @staticmethod
    def from_ints(field, ints):
        """Coefficients given as plain integers (reduced mod p; prime fields only)."""
        if field.e != 1:
            raise ValueError("from_ints is for prime fields")
        return Poly(field, [c % field.p for c in ints])

    # --- basic queries ---

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def leading(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.field.e, self.coeffs))

    # --- arithmetic ---

    def __add__(self, other):
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly(F, out)

    def __neg__(self):
        F = self.field
        return Poly(F, [F.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        F = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(F)
        out = [0] * (len(a) + len(b) - 1)
        if F.e == 1:
            # prime field: plain integer accumulation, one reduction at the end
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        out[i + j] += x * y
            p = F.p
            return Poly(F, [v % p for v in out])
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = F.add(out[i + j], F.mul(x, y))
        return Poly(F, out)

    def scale(self, c: int):
        F = self.field
        return Poly(F, [F.mul(c, x) for x in self.coeffs])

    def shift(self, k: int):
        """Multiply by x^k (k >= 0)."""
        if not self.coeffs:
            return self
        return Poly(self.field, (0,) * k + self.coeffs)

    def __divmod__(self, other):
        F = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        d = other.coeffs
        dn = len(d) - 1
        lcinv = F.inv(d[-1])
        q = [0] * max(0, len(r) - dn)
        if F.e == 1:
            p = F.p
            for i in range(len(r) - 1, dn - 1, -1):
                c = r[i]
                if c:
                    c = c * lcinv % p
                    q[i - dn] = c
                    for j in range(dn):
                        r[i - dn + j] = (r[i - dn + j] - c * d[j]) % p
                    r[i] = 0
            return Poly(F, q), Poly(F, r[:dn])
        for i in range(len(r) - 1, dn - 1, -1):
            c = r[i]
            if c:
                c = F.mul(c, lcinv)
                q[i - dn] = c
                for j in range(dn + 1):
                    r[i - dn + j] = F.sub(r[i - dn + j], F.mul(c, d[j]))
        return Poly(F, q), Poly(F, r[:dn])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.field.inv(self.leading()))

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def xgcd(self, other):
        """Extended gcd: returns (g, s, t) monic g with s*self + t*other = g."""
        F = self.field
        a, b = self, other
        sa, ta = Poly.one(F), Poly.zero(F)
        sb, tb = Poly.zero(F), Poly.one(F)
        while not b.is_zero():
            q, r = divmod(a, b)
            a, b = b, r
            sa, sb = sb, sa - q * sb
            ta, tb = tb, ta - q * tb
        if a.is_zero():
            return a, sa, ta
        c = F.inv(a.leading())
        return a.scale(c), sa.scale(c), ta.scale(c)

    def inverse_mod(self, modulus):
        g, s, _ = self.xgcd(modulus)
        if not g.is_one():
            raise ZeroDivisionError("element not invertible modulo the given polynomial")
        return s % modulus

    def pow_mod(self, n: int, modulus):
        r = Poly.one(self.field) % modulus
        base = self % modulus
        while n:
            if n & 1:
                r = (r * base) % modulus
            base = (base * base) % modulus
            n >>= 1
        return r

    def __call__(self, x: int, field: GF | None = None) -> int:
        """Evaluate at a field element (optionally in an extension of the
        prime field; prime-subfield coefficients embed identically)."""
        F = field or self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def reverse(self, degree: int | None = None):
        """Coefficient reversal x^d * p(1/x) relative to the given degree."""
        d = self.degree if degree is None else degree
        if d < self.degree:
            raise ValueError("reversal degree below actual degree")
        cs = [0] * (d + 1)
        for i, c in enumerate(self.coeffs):
            cs[d - i] = c
        return Poly(self.field, cs)

    def multiplicity_of(self, factor) -> int:
        """Largest k with factor^k dividing self (self nonzero)."""
        if self.is_zero():
            raise ValueError("multiplicity in the zero polynomial")
        k = 0
        cur = self
        while True:
            q, r = divmod(cur, factor)
            if not r.is_zero():
                return k
            cur = q
            k += 1

    def derivative(self):
        F = self.field
        out = []
        for i in range(1, len(self.coeffs)):
            c = self.coeffs[i]
            s = 0
            for _ in range(i % F.p):  # i*c in characteristic p
                s = F.add(s, c)
            out.append(s)
        return Poly(F, out)

    def is_irreducible(self) -> bool:
        """Rabin irreducibility test over F_q."""
        n = self.degree
        if n <= 0:
            return False
        if n == 1:
            return True
        F = self.field
        f = self.monic()
        x = Poly.x(F)
        q = F.q
        # x^(q^n) == x mod f
        t = x
        for _ in range(n):
            t = t.pow_mod(q, f)
        if t != x % f:
            return False
        for r in _prime_divisors(n):
            t = x
            for _ in range(n // r):
                t = t.pow_mod(q, f)
            if not (t - x).is_zero() and not f.gcd(t - x).is_one():
                return False
            if (t - x).is_zero():
                return False
        return True

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*t" if c != 1 else "t")
            else:
                parts.append(f"{c}*t^{i}" if c != 1 else f"t^{i}")
        return " + ".join(parts)


def _prime_divisors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def monic_polys(field: GF, degree: int):
    """All monic polynomials of the exact degree."""
    q = field.q
    for code in range(q**degree):
        cs = []
        c = code
        for _ in range(degree):
            cs.append(c % q)
            c //= q
        cs.append(1)
        yield Poly(field, cs)


def monic_irreducibles(field: GF, max_degree: int):
    """Monic irreducible polynomials of degree 1..max_degree, by degree."""
    for d in range(1, max_degree + 1):
        for f in monic_polys(field, d):
            if f.is_irreducible():
                yield f


def parse_poly(field: GF, text: str) -> Poly:
    """Parse expressions like 't^2+t+1', 't+2', '1', 't'."""
    text = text.replace(" ", "").replace("-", "+-")
    if text.startswith("+"):
        text = text[1:]
    coeffs: dict[int, int] = {}
    for term in text.split("+"):
        if not term:
            continue
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        if "t" in term:
            head, _, tail = term.partition("t")
            c = int(head.rstrip("*")) if head else 1
            if tail.startswith("^"):
                exp = int(tail[1:])
            elif tail == "":
                exp = 1
            else:
                raise ValueError(f"cannot parse term {term!r}")
        else:
            c, exp = int(term), 0
        c %= field.p if field.e == 1 else field.q
        if neg:
            c = field.neg(c)
        coeffs[exp] = field.add(coeffs.get(exp, 0), c)
    out = [0] * (max(coeffs, default=0) + 1)
    for e, c in coeffs.items():
        out[e] = c
    return Poly(field, out)
