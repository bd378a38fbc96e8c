"""The Lucas sequence U_n(a, 1) and the block determinants it controls.

The sequence u_1 = 1, u_2 = a, u_n = a*u_{n-1} - u_{n-2} drives every
determinant and local invariant of the cycle and path blocks:

  det path_block(a, n)  = (a - 2) * u_n
  det cycle_block(a, n) = (a^2 - 4) * u_{n/2}^2            (n even)
                        = (a + 2) * (u_{(n+1)/2} - u_{(n-1)/2})^2   (n odd)

Values grow like a^n, so scans use a modular fast path: residues mod
p**cap recover the p-adic valuation and unit class of each term, falling
back to the exact value in the (never observed) case the valuation
reaches the cap.
"""

from __future__ import annotations

from dataclasses import dataclass

from .matrices import cycle_block, det_bareiss
from .numtheory import PFactorization, SquareClass, legendre, p_factorize

__all__ = [
    "GSequence",
    "lucas_u",
    "lucas_u_value",
    "lucas_u_pfact",
    "lucas_u_classes",
    "cycle_block_det",
    "cycle_block_det_closed",
    "path_block_det",
]

_cache: dict[int, list[int]] = {}


def _values(a: int, n_max: int) -> list[int]:
    if a <= 2:
        raise ValueError("sequence parameter must be at least 3")
    if n_max < 1:
        raise ValueError("n_max must be positive")
    vals = _cache.setdefault(a, [1, a])
    while len(vals) < n_max:
        vals.append(a * vals[-1] - vals[-2])
    return vals


@dataclass(frozen=True)
class GSequence:
    """Exact prefix u_1..u_N of the sequence for one parameter a."""

    a: int
    values: tuple[int, ...]

    def g(self, n: int) -> int:
        """The n-th term, 1-indexed."""
        return self.values[n - 1]


def lucas_u(a: int, n_max: int) -> GSequence:
    """Exact values u_1..u_n_max; linear time, cached per a."""
    return GSequence(a=a, values=tuple(_values(a, n_max)[:n_max]))


def lucas_u_value(a: int, n: int) -> int:
    """Single exact term u_n(a)."""
    return _values(a, n)[n - 1]


def lucas_u_pfact(a: int, n: int, p: int) -> PFactorization:
    """p-factorization of u_n(a), computed from the exact value."""
    return p_factorize(lucas_u_value(a, n), p)


def lucas_u_classes(a: int, n_max: int, p: int, cap: int = 64) -> list[SquareClass]:
    """Square classes at p of u_1..u_n_max, via residues mod p**cap.

    A residue of zero, or a 2-adic valuation within 3 of the cap, does
    not determine the class, so those indices are recomputed exactly.
    """
    modulus = p**cap
    classes: list[SquareClass] = []
    r_prev, r = 1 % modulus, a % modulus
    residues = [r_prev, r]
    for _ in range(2, n_max):
        r_prev, r = r, (a * r - r_prev) % modulus
        residues.append(r)
    lost = cap - 3 if p == 2 else cap - 1
    for idx, r in enumerate(residues[:n_max]):
        if r == 0:
            classes.append(_exact_class(a, idx + 1, p))
            continue
        val = 0
        while r % p == 0:
            r //= p
            val += 1
        if val > lost:
            classes.append(_exact_class(a, idx + 1, p))
        elif p == 2:
            classes.append((val & 1, r % 8))
        else:
            classes.append((val & 1, legendre(r, p)))
    return classes


def _exact_class(a: int, n: int, p: int) -> SquareClass:
    f = lucas_u_pfact(a, n, p)
    if p == 2:
        return (f.valuation & 1, f.unit % 8)
    return (f.valuation & 1, legendre(f.unit, p))


def cycle_block_det(a: int, n: int) -> int:
    """Exact determinant of cycle_block(a, n) by fraction-free elimination."""
    if a <= 2:
        raise ValueError("block parameter must be at least 3")
    return det_bareiss(cycle_block(a, n))


def cycle_block_det_closed(a: int, n: int) -> int:
    """det cycle_block(a, n) from the sequence, without building the matrix."""
    if n % 2 == 0:
        h = lucas_u_value(a, n // 2)
        return (a * a - 4) * h * h
    seq = _values(a, (n + 1) // 2)
    h = seq[(n + 1) // 2 - 1] - (seq[(n - 1) // 2 - 1] if n > 1 else 0)
    return (a + 2) * h * h


def path_block_det(a: int, n: int) -> int:
    """det path_block(a, n) = (a - 2) * u_n(a)."""
    if a <= 2:
        raise ValueError("block parameter must be at least 3")
    if n < 2:
        raise ValueError("path_block needs n >= 2")
    return (a - 2) * lucas_u_value(a, n)
