"""Arithmetic in GF(q) for prime powers q = p^s.

Construction is deterministic: the modulus is the lexicographically smallest
monic irreducible polynomial of degree s over GF(p), with coefficient vectors
compared low-degree-first.  Field elements are encoded as integers in [0, q)
whose base-p digits are the polynomial coefficients, constant term first, so
element 0 is the additive and 1 the multiplicative identity for every q.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import NotPrimePowerError

# Full add/mul tables are built below this order; larger fields fall back to
# per-operation polynomial arithmetic.
_TABLE_LIMIT = 1024


def _smallest_prime_factor(n):
    f = 2
    while f * f <= n:
        if n % f == 0:
            return f
        f += 1
    return n


def _prime_power_split(q):
    """Return (p, s) with q = p**s, or raise NotPrimePowerError."""
    if q < 2:
        raise NotPrimePowerError(f"field order must be at least 2, got {q}")
    p = _smallest_prime_factor(q)
    s = 0
    n = q
    while n % p == 0:
        n //= p
        s += 1
    if n != 1:
        raise NotPrimePowerError(f"{q} is not a prime power")
    return p, s


def _poly_rem(num, den, p):
    """Remainder of num mod den over GF(p); den monic, coefficients low-first."""
    num = list(num)
    d = len(den) - 1
    while len(num) > d:
        lead = num[-1]
        if lead:
            shift = len(num) - 1 - d
            for i, c in enumerate(den):
                num[shift + i] = (num[shift + i] - lead * c) % p
        num.pop()
    while num and num[-1] == 0:
        num.pop()
    return num


def _is_irreducible(poly, p):
    """Trial division by every monic polynomial of degree <= deg(poly)/2."""
    s = len(poly) - 1
    for d in range(1, s // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if not _poly_rem(poly, tail + (1,), p):
                return False
    return True


def _smallest_irreducible(p, s):
    if s == 1:
        return (0, 1)
    for tail in itertools.product(range(p), repeat=s):
        poly = tail + (1,)
        if _is_irreducible(poly, p):
            return poly
    raise AssertionError(f"no irreducible polynomial of degree {s} over GF({p})")


@dataclass(frozen=True)
class FieldSpec:
    """A concrete finite field GF(p^s) with fixed modulus.

    Immutable; all operations are pure functions of the element encodings.
    """

    p: int
    s: int
    q: int
    modulus: tuple

    def coeffs(self, a):
        """Base-p digits of element a, constant term first, length s."""
        out = []
        for _ in range(self.s):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def element(self, coeffs):
        """Encode a coefficient vector (low degree first) as an element."""
        a = 0
        for c in reversed(coeffs):
            a = a * self.p + c % self.p
        return a

    def _add_raw(self, a, b):
        out, shift = 0, 1
        for _ in range(self.s):
            out += ((a + b) % self.p) * shift
            a //= self.p
            b //= self.p
            shift *= self.p
        return out

    def _neg_raw(self, a):
        out, shift = 0, 1
        for _ in range(self.s):
            out += (-a % self.p) * shift
            a //= self.p
            shift *= self.p
        return out

    def _mul_raw(self, a, b):
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * self.s - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        rem = _poly_rem(prod, self.modulus, self.p)
        return self.element(tuple(rem) + (0,) * (self.s - len(rem)))

    @cached_property
    def _add_table(self):
        return tuple(
            tuple(self._add_raw(a, b) for b in range(self.q)) for a in range(self.q)
        )

    @cached_property
    def _mul_table(self):
        return tuple(
            tuple(self._mul_raw(a, b) for b in range(self.q)) for a in range(self.q)
        )

    @cached_property
    def _inv_table(self):
        inv = [0] * self.q
        for a in range(1, self.q):
            inv[a] = self._pow(a, self.q - 2)
        return tuple(inv)

    def _pow(self, a, e):
        out, base = 1, a
        while e:
            if e & 1:
                out = self._mul_raw(out, base)
            base = self._mul_raw(base, base)
            e >>= 1
        return out

    def add(self, a, b):
        if self.q <= _TABLE_LIMIT:
            return self._add_table[a][b]
        return self._add_raw(a, b)

    def neg(self, a):
        return self._neg_raw(a)

    def sub(self, a, b):
        return self.add(a, self._neg_raw(b))

    def mul(self, a, b):
        if self.q <= _TABLE_LIMIT:
            return self._mul_table[a][b]
        return self._mul_raw(a, b)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(q)")
        if self.q <= _TABLE_LIMIT:
            return self._inv_table[a]
        return self._pow(a, self.q - 2)


@lru_cache(maxsize=None)
def make_field(q):
    """Build GF(q) deterministically; raises NotPrimePowerError otherwise."""
    p, s = _prime_power_split(q)
    return FieldSpec(p=p, s=s, q=q, modulus=_smallest_irreducible(p, s))
