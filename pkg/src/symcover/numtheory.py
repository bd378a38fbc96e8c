"""Exact number theory kernel: primality, Legendre and Hilbert symbols.

Everything here is deterministic and works on arbitrary-precision
integers.  Hilbert symbols are evaluated from p-factorisations via the
classical Legendre-symbol formulas, at finite primes and at the
infinite (real) place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PFactorization",
    "Place",
    "INFINITY",
    "is_prime",
    "primes_up_to",
    "legendre",
    "p_factorize",
    "is_perfect_square",
    "hilbert",
    "square_class",
    "class_mul",
    "class_neg",
    "hilbert_class",
]

# Strong-pseudoprime bases proven sufficient for n < 3.3 * 10^24
# (Sorenson & Webster).  Inputs beyond that fall back to trial division.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_LIMIT = 3317044064679887385961981


def is_prime(n: int) -> bool:
    """Deterministic primality test for n >= 1."""
    if n < 1:
        raise ValueError("is_prime expects n >= 1")
    if n < 4:
        return n > 1
    if n % 2 == 0:
        return False
    if n < _MR_LIMIT:
        return _miller_rabin(n)
    return _trial_division(n)


def _miller_rabin(n: int) -> bool:
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _trial_division(n: int) -> bool:
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_up_to(bound: int) -> list[int]:
    """All primes strictly below ``bound``, ascending."""
    if bound < 2:
        raise ValueError("primes_up_to expects bound >= 2")
    n = bound - 1
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            start = p * p
            sieve[start : n + 1 : p] = bytes(len(range(start, n + 1, p)))
    return [i for i in range(2, n + 1) if sieve[i]]


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) in {+1, -1} for an odd prime p, gcd(a, p) = 1.

    Euler's criterion: a^((p-1)/2) mod p, with p - 1 read as -1.
    """
    if p == 2:
        raise ValueError("Legendre symbol needs an odd prime")
    if a % p == 0:
        raise ValueError("Legendre symbol needs a coprime to p")
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


@dataclass(frozen=True)
class PFactorization:
    """n written as unit * prime**valuation with the unit coprime to prime."""

    prime: int
    valuation: int
    unit: int

    def __post_init__(self) -> None:
        if self.valuation < 0:
            raise ValueError("valuation must be non-negative")
        if self.unit == 0 or self.unit % self.prime == 0:
            raise ValueError("unit must be nonzero and coprime to prime")

    @property
    def value(self) -> int:
        return self.unit * self.prime**self.valuation


def p_factorize(n: int, p: int) -> PFactorization:
    """Split nonzero n as unit * p**valuation with p not dividing unit."""
    if n == 0:
        raise ValueError("cannot p-factorize 0")
    val = 0
    while n % p == 0:
        n //= p
        val += 1
    return PFactorization(prime=p, valuation=val, unit=n)


def is_perfect_square(n: int) -> bool:
    """Exact integer square test; negative inputs are never squares."""
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


@dataclass(frozen=True)
class Place:
    """A finite prime of Q or the infinite (real) place.

    ``prime`` is None at the infinite place.  Use ``Place.finite`` to get
    primality checking; the module constant ``INFINITY`` is the infinite
    place.
    """

    prime: int | None

    @classmethod
    def finite(cls, p: int) -> "Place":
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        return cls(p)

    @property
    def is_finite(self) -> bool:
        return self.prime is not None

    def __str__(self) -> str:
        return "infinity" if self.prime is None else str(self.prime)


INFINITY = Place(None)


def _place_prime(place: Place | int | None) -> int | None:
    """Accept a Place, a bare prime, or None meaning the infinite place."""
    if place is None:
        return None
    if isinstance(place, Place):
        return place.prime
    return place


def hilbert(a: int, b: int, place: Place | int | None) -> int:
    """Hilbert symbol (a, b) at a finite prime or the infinite place.

    With p-factorisations a = abar * p**alpha and b = bbar * p**beta:

      odd p:  (-1/p)^(alpha*beta) * (abar/p)^beta * (bbar/p)^alpha
      p = 2:  (-1)^((abar-1)(bbar-1)/4 + alpha(bbar^2-1)/8 + beta(abar^2-1)/8)
      real :  -1 iff both a and b are negative
    """
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    p = _place_prime(place)
    if p is None:
        return -1 if a < 0 and b < 0 else 1
    fa = p_factorize(a, p)
    fb = p_factorize(b, p)
    if p == 2:
        ua, ub = fa.unit % 8, fb.unit % 8
        exp = (ua % 4 == 3) & (ub % 4 == 3)
        exp ^= (fa.valuation & 1) & (ub in (3, 5))
        exp ^= (fb.valuation & 1) & (ua in (3, 5))
        return -1 if exp else 1
    sign = 1
    if fa.valuation & fb.valuation & 1 and p % 4 == 3:
        sign = -sign
    if fb.valuation & 1:
        sign *= legendre(fa.unit, p)
    if fa.valuation & 1:
        sign *= legendre(fb.unit, p)
    return sign


# ---------------------------------------------------------------------------
# Local square classes.
#
# At an odd prime the Hilbert symbol only sees (valuation mod 2,
# Legendre symbol of the unit); at p = 2 it sees (valuation mod 2,
# unit mod 8).  Representing numbers by these small "square classes"
# lets long symbol products run without touching huge integers.
# ---------------------------------------------------------------------------

SquareClass = tuple[int, int]


def square_class(n: int, p: int) -> SquareClass:
    """Square class of nonzero n at the finite prime p."""
    f = p_factorize(n, p)
    if p == 2:
        return (f.valuation & 1, f.unit % 8)
    return (f.valuation & 1, legendre(f.unit, p))


def class_mul(c1: SquareClass, c2: SquareClass, p: int) -> SquareClass:
    if p == 2:
        return ((c1[0] + c2[0]) & 1, c1[1] * c2[1] % 8)
    return ((c1[0] + c2[0]) & 1, c1[1] * c2[1])


def class_neg(c: SquareClass, p: int) -> SquareClass:
    if p == 2:
        return (c[0], (-c[1]) % 8)
    return (c[0], -c[1] if p % 4 == 3 else c[1])


def hilbert_class(ca: SquareClass, cb: SquareClass, p: int) -> int:
    """Hilbert symbol at p given the square classes of both arguments."""
    if p == 2:
        ua, ub = ca[1], cb[1]
        exp = (ua % 4 == 3) & (ub % 4 == 3)
        exp ^= ca[0] & (ub in (3, 5))
        exp ^= cb[0] & (ua in (3, 5))
        return -1 if exp else 1
    sign = 1
    if ca[0] & cb[0] and p % 4 == 3:
        sign = -sign
    if cb[0]:
        sign *= ca[1]
    if ca[0]:
        sign *= cb[1]
    return sign
