"""Exact coefficient rings: Z, Q, F_p, Z[1/2], Z[1/2,i] and F_9.

Ring objects operate on plain values (int, Fraction, GaussQ, residue
pairs); there is no wrapper around scalars.  All arithmetic is exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, NamedTuple


class GaussQ(NamedTuple):
    """Gaussian rational a + b*sqrt(-1) with exact Fraction parts."""

    re: Fraction
    im: Fraction

    def __add__(self, other):
        other = _as_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussQ(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, other):
        other = _as_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussQ(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        other = _as_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussQ(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussQ(other.re / n, -other.im / n)

    def conjugate(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def __str__(self) -> str:
        return f"{self.re}+{self.im}i"


def _as_gauss(x) -> Any:
    if isinstance(x, GaussQ):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussQ(Fraction(x), Fraction(0))
    return NotImplemented


GAUSS_I = GaussQ(Fraction(0), Fraction(1))
GAUSS_ONE = GaussQ(Fraction(1), Fraction(0))


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class Ring:
    """Base class; concrete rings implement arithmetic on raw values."""

    kind: str = ""
    characteristic: int = 0
    has_conjugation: bool = False
    is_field: bool = False

    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)

    def from_int(self, n: int):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return self.is_zero(self.sub(a, b))

    def conj(self, a):
        if not self.has_conjugation:
            return a
        raise NotImplementedError

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def contains(self, a) -> bool:
        """Membership test for raw values (used by closure assertions)."""
        raise NotImplementedError

    def sample(self, rng):
        """Deterministic random value for property tests."""
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.kind


class IntegerRing(Ring):
    kind = "INT"

    def from_int(self, n):
        return int(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a in (1, -1)

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{a} is not a unit in Z")
        return a

    def contains(self, a):
        return isinstance(a, int) or (isinstance(a, Fraction) and a.denominator == 1)

    def sample(self, rng):
        return rng.randint(-20, 20)


class RationalField(Ring):
    kind = "RAT"
    is_field = True

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return Fraction(a) + b

    def neg(self, a):
        return -Fraction(a)

    def mul(self, a, b):
        return Fraction(a) * b

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in Q")
        return 1 / Fraction(a)

    def contains(self, a):
        return isinstance(a, (int, Fraction))

    def sample(self, rng):
        return Fraction(rng.randint(-12, 12), rng.randint(1, 9))


class PrimeField(Ring):
    is_field = True

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.kind = f"PRIME_FIELD({p})"
        self.characteristic = p

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def is_zero(self, a):
        return a % self.p == 0

    def is_unit(self, a):
        return a % self.p != 0

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of 0 in F_{self.p}")
        return pow(a, self.p - 2, self.p)

    def contains(self, a):
        return isinstance(a, int)

    def sample(self, rng):
        return rng.randrange(self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PRIME_FIELD", self.p))


class HalfIntegerRing(Ring):
    """Z[1/2]: fractions with power-of-two denominator."""

    kind = "INT_HALF"

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return Fraction(a) + b

    def neg(self, a):
        return -Fraction(a)

    def mul(self, a, b):
        return Fraction(a) * b

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        a = Fraction(a)
        return a != 0 and _is_power_of_two(abs(a.numerator)) and _is_power_of_two(a.denominator)

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{a} is not a unit in Z[1/2]")
        return 1 / Fraction(a)

    def contains(self, a):
        if not isinstance(a, (int, Fraction)):
            return False
        return _is_power_of_two(Fraction(a).denominator)

    def sample(self, rng):
        return Fraction(rng.randint(-16, 16), 2 ** rng.randint(0, 3))


class GaussHalfRing(Ring):
    """Z[1/2, sqrt(-1)] with complex conjugation."""

    kind = "GAUSS_HALF"
    has_conjugation = True

    def from_int(self, n):
        return GaussQ(Fraction(n), Fraction(0))

    def add(self, a, b):
        return _as_gauss(a) + b

    def neg(self, a):
        return -_as_gauss(a)

    def mul(self, a, b):
        return _as_gauss(a) * b

    def is_zero(self, a):
        return not _as_gauss(a)

    def conj(self, a):
        return _as_gauss(a).conjugate()

    def is_unit(self, a):
        a = _as_gauss(a)
        n = a.re * a.re + a.im * a.im
        if n == 0:
            return False
        return _is_power_of_two(abs(n.numerator)) and _is_power_of_two(n.denominator)

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{a} is not a unit in Z[1/2,i]")
        return GAUSS_ONE / _as_gauss(a)

    def contains(self, a):
        a = _as_gauss(a)
        if a is NotImplemented:
            return False
        return _is_power_of_two(a.re.denominator) and _is_power_of_two(a.im.denominator)

    def sample(self, rng):
        d = 2 ** rng.randint(0, 2)
        return GaussQ(Fraction(rng.randint(-8, 8), d), Fraction(rng.randint(-8, 8), d))


class F9Field(Ring):
    """F_9 = F_3[sqrt(-1)]; values are residue pairs (a, b) = a + b*sqrt(-1)."""

    kind = "F9"
    characteristic = 3
    has_conjugation = True
    is_field = True

    def from_int(self, n):
        return (n % 3, 0)

    def add(self, a, b):
        return ((a[0] + b[0]) % 3, (a[1] + b[1]) % 3)

    def neg(self, a):
        return ((-a[0]) % 3, (-a[1]) % 3)

    def mul(self, a, b):
        return (
            (a[0] * b[0] - a[1] * b[1]) % 3,
            (a[0] * b[1] + a[1] * b[0]) % 3,
        )

    def is_zero(self, a):
        return a[0] % 3 == 0 and a[1] % 3 == 0

    def conj(self, a):
        return (a[0] % 3, (-a[1]) % 3)

    def is_unit(self, a):
        return not self.is_zero(a)

    def inv(self, a):
        n = (a[0] * a[0] + a[1] * a[1]) % 3
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in F_9")
        ninv = pow(n, -1, 3)
        return ((a[0] * ninv) % 3, (-a[1] * ninv) % 3)

    def contains(self, a):
        return isinstance(a, tuple) and len(a) == 2

    def sample(self, rng):
        return (rng.randrange(3), rng.randrange(3))

    def elements(self):
        return [(a, b) for a in range(3) for b in range(3)]


ZZ = IntegerRing()
QQ = RationalField()
F2 = PrimeField(2)
F3 = PrimeField(3)
Z_HALF = HalfIntegerRing()
GAUSS_HALF = GaussHalfRing()
F9 = F9Field()

RING_NAMES = {
    "Z": ZZ,
    "Q": QQ,
    "F2": F2,
    "F3": F3,
    "F9": F9,
    "Z12": Z_HALF,
    "GZ12": GAUSS_HALF,
}


def ring_by_name(name: str) -> Ring:
    try:
        return RING_NAMES[name]
    except KeyError:
        raise ValueError(f"unknown ring {name!r}; choose from {sorted(RING_NAMES)}") from None


def ring_reduce(value, src: Ring, p: int):
    """Reduce a value of src modulo an odd prime p.

    Z, Q and Z[1/2] reduce into F_p (denominators must be invertible mod p);
    Z[1/2,i] reduces into F_9 for p = 3.  Returns (value, target ring).
    Conjugation commutes with the reduction, and on F_9 it equals cubing.
    """
    if src in (Z_HALF, GAUSS_HALF) and p == 2:
        raise ValueError("reduction mod 2 is not defined: 2 is a unit in the source ring")
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if isinstance(src, IntegerRing):
        return int(value) % p, PrimeField(p)
    if isinstance(src, (RationalField, HalfIntegerRing)):
        f = Fraction(value)
        if f.denominator % p == 0:
            raise ValueError(f"denominator {f.denominator} not invertible mod {p}")
        fp = PrimeField(p)
        return fp.mul(f.numerator % p, fp.inv(f.denominator % p)), fp
    if isinstance(src, GaussHalfRing):
        if p != 3:
            raise ValueError("Z[1/2,i] only reduces into F_9 (p = 3)")
        g = _as_gauss(value)
        re, _ = ring_reduce(g.re, Z_HALF, 3)
        im, _ = ring_reduce(g.im, Z_HALF, 3)
        return (re, im), F9
    raise ValueError(f"cannot reduce values of {src.kind}")


def reduce_fraction_mod(f: Fraction, p: int) -> int:
    """Image of an exact rational in F_p; denominator must be prime to p."""
    f = Fraction(f)
    if f.denominator % p == 0:
        raise ValueError(f"denominator {f.denominator} not invertible mod {p}")
    return (f.numerator * pow(f.denominator, -1, p)) % p
