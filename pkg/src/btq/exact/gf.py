"""Finite fields F_{p^e} with int-encoded elements.

An element is an integer in ``range(q)`` encoding its coordinate vector
over the prime field in base p (little-endian digits).  For prime
fields this is plain arithmetic mod p.  Extension fields (p^e <= 64)
use a fixed table of Conway-style defining polynomials, so every run
of the library sees the same field presentation, and multiplication is
table-driven.

Prime subfield elements encode as the same integers in every extension,
so embedding F_p into F_{p^e} is the identity on encodings.
"""

from functools import lru_cache

# defining polynomials, little-endian coefficient tuples (constant term first)
_DEFINING = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class GF:
    """Finite field F_{p^e}; obtain instances through :func:`gf`."""

    def __init__(self, p: int, e: int = 1):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        self.p = p
        self.e = e
        self.q = p**e
        if e == 1:
            self.modulus = None
        else:
            if (p, e) not in _DEFINING:
                raise ValueError(f"no defining polynomial on file for GF({p}^{e})")
            self.modulus = _DEFINING[(p, e)]
            self._build_tables()

    def _digits(self, a: int):
        p, e = self.p, self.e
        out = []
        for _ in range(e):
            out.append(a % p)
            a //= p
        return out

    def _undigits(self, ds):
        v = 0
        for d in reversed(ds):
            v = v * self.p + d
        return v

    def _build_tables(self):
        p, e, q = self.p, self.e, self.q
        mod = self.modulus
        mul = [0] * (q * q)
        for a in range(q):
            da = self._digits(a)
            for b in range(a, q):
                db = self._digits(b)
                prod = [0] * (2 * e - 1)
                for i, x in enumerate(da):
                    if x:
                        for j, y in enumerate(db):
                            prod[i + j] = (prod[i + j] + x * y) % p
                for k in range(2 * e - 2, e - 1, -1):
                    c = prod[k]
                    if c:
                        prod[k] = 0
                        for j in range(e):
                            prod[k - e + j] = (prod[k - e + j] - c * mod[j]) % p
                v = self._undigits(prod[:e])
                mul[a * q + b] = v
                mul[b * q + a] = v
        self._mul = mul
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a * q + b] == 1:
                    inv[a] = b
                    break
        self._inv = inv

    # --- arithmetic on encodings ---

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        p = self.p
        return self._undigits([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])

    def sub(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a - b) % self.p
        p = self.p
        return self._undigits([(x - y) % p for x, y in zip(self._digits(a), self._digits(b))])

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        p = self.p
        return self._undigits([(-x) % p for x in self._digits(a)])

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        return self._mul[a * self.q + b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        r = 1
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    # --- structure ---

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    def coords(self, a: int):
        """Coordinate vector over the prime field (length e)."""
        return tuple(self._digits(a))

    def from_coords(self, ds) -> int:
        return self._undigits(list(ds))

    def multiplicative_generator(self) -> int:
        order = self.q - 1
        for g in range(1, self.q):
            seen = 1
            x = g
            while x != 1:
                x = self.mul(x, g)
                seen += 1
            if seen == order:
                return g
        raise RuntimeError("no generator found")  # unreachable for a field

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.e) == (other.p, other.e)

    def __hash__(self):
        return hash((self.p, self.e))

    def __repr__(self):
        return f"GF({self.p})" if self.e == 1 else f"GF({self.p}^{self.e})"


@lru_cache(maxsize=None)
def gf(p: int, e: int = 1) -> GF:
    return GF(p, e)
