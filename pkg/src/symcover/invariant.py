"""Hasse-Minkowski invariants of covering Gram matrices.

A symmetric covering on v points whose excess is a disjoint union of
cycles of lengths c_1 <= ... <= c_t has Gram matrix

    X = diag(cycle_block(a, c_1), ..., cycle_block(a, c_t)) + lambda * J_v

with a = k - lambda.  The invariant C_p(X) built from leading principal
minors decides rational congruence to the identity, which is what the
nonexistence rules test.  Two evaluation routes are provided: the
definition itself (exact minor determinants, slow, the oracle) and a
product formula over the Lucas sequence that needs O(v) small Hilbert
symbols per prime.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .cycletypes import CycleType
from .lucas import cycle_block_det_closed, lucas_u_classes
from .matrices import (
    DegenerateMatrix,
    IntMatrix,
    cycle_block,
    det_bareiss,
    leading_minor_dets,
    path_block,
)
from .numtheory import (
    Place,
    class_mul,
    class_neg,
    hilbert,
    hilbert_class,
    is_perfect_square,
    square_class,
    _place_prime,
)

__all__ = [
    "ParameterSet",
    "NonSquareDeterminant",
    "cycle_block",
    "path_block",
    "covering_gram",
    "det_exact",
    "principal_minor_dets",
    "hasse_minkowski",
    "join_factor",
    "cycle_block_invariant",
    "cycle_block_invariant_row",
    "cycle_block3_invariant",
    "covering_gram_invariant",
    "det_covering_gram",
    "has_square_det",
    "DegenerateMatrix",
]


class NonSquareDeterminant(ValueError):
    """The Gram determinant is not a perfect square, so the product
    formula for its invariant does not apply (and no covering exists)."""


@dataclass(frozen=True)
class ParameterSet:
    """(v, k, lambda) satisfying the symmetric-covering pair count.

    Counting pairs forces lambda * (v - 1) = k * (k - 1) - 2, and the
    degenerate families need lambda + 2 < k < v.
    """

    v: int
    k: int
    lambda_: int

    def __post_init__(self) -> None:
        if self.lambda_ < 1:
            raise ValueError("lambda must be positive")
        if not self.lambda_ + 2 < self.k < self.v:
            raise ValueError("need lambda + 2 < k < v")
        if self.lambda_ * (self.v - 1) != self.k * (self.k - 1) - 2:
            raise ValueError("lambda * (v - 1) must equal k * (k - 1) - 2")

    @property
    def a(self) -> int:
        """Block parameter k - lambda."""
        return self.k - self.lambda_


def covering_gram(params: ParameterSet, ct: CycleType) -> IntMatrix:
    """The v x v Gram matrix for the given excess cycle type."""
    if ct.v != params.v:
        raise ValueError(f"cycle type sums to {ct.v}, expected v={params.v}")
    v = params.v
    lam = params.lambda_
    m = [[lam] * v for _ in range(v)]
    offset = 0
    for c in ct.parts:
        block = cycle_block(params.a, c)
        for i in range(c):
            row = m[offset + i]
            brow = block[i]
            for j in range(c):
                row[offset + j] += brow[j]
        offset += c
    return m


det_exact = det_bareiss
principal_minor_dets = leading_minor_dets


def hasse_minkowski(m: IntMatrix, place: Place | int | None) -> int:
    """C_p of a nondegenerate symmetric matrix, straight from the minors.

    C_p(X) = (-1, -d_n)_p * prod_{i<n} (d_i, -d_{i+1})_p over the leading
    principal minor determinants d_i.  This is the brute-force oracle.
    """
    dets = leading_minor_dets(m)
    sign = hilbert(-1, -dets[-1], place)
    for i in range(len(dets) - 1):
        sign *= hilbert(dets[i], -dets[i + 1], place)
    return sign


def _parity(n: int) -> int:
    return n & 1


def join_factor(
    a: int, lambda_: int, t: int, e: int, place: Place | int | None
) -> int:
    """Correction factor tying C_p(X) to the product of block invariants.

    For t cycles of which e are even, assuming the Gram determinant is a
    perfect square:

      (-1,-1)^(t-1) (a+2,-1)^C(t-e,2) (a^2-4,-1)^C(e,2)
      (a+2,a^2-4)^(e(t-e)) (-lambda, (a+2)^t (a-2)^e)
    """
    if t < 1 or e < 0 or e > t:
        raise ValueError("need t >= 1 and 0 <= e <= t")
    o = t - e
    sign = 1
    if _parity(t - 1):
        sign *= hilbert(-1, -1, place)
    if _parity(o * (o - 1) // 2):
        sign *= hilbert(a + 2, -1, place)
    if _parity(e * (e - 1) // 2):
        sign *= hilbert(a * a - 4, -1, place)
    if _parity(e * o):
        sign *= hilbert(a + 2, a * a - 4, place)
    tail = (a + 2) ** _parity(t) * (a - 2) ** _parity(e)
    sign *= hilbert(-lambda_, tail, place)
    return sign


@lru_cache(maxsize=64)
def _invariant_row(a: int, p: int, n_max: int, cap: int = 64) -> tuple[int, ...]:
    """Signs C_p(cycle_block(a, n)) for n = 0..n_max (entries 0, 1 unused).

    Uses the product formula: with u_i the Lucas terms,

      C_p(B_n) = (-(a+2)(a-2)^(n+1), -u_n)_p * prod_{i=2}^n (-u_i, u_{i-1})_p

    evaluated on local square classes, so each n costs O(1) on top of the
    shared class stream.
    """
    classes = lucas_u_classes(a, n_max, p, cap)
    head_odd_n = class_neg(square_class(a + 2, p), p)
    head_even_n = class_mul(head_odd_n, square_class(a - 2, p), p)
    row = [1] * (n_max + 1)
    running = 1
    for n in range(2, n_max + 1):
        running *= hilbert_class(class_neg(classes[n - 1], p), classes[n - 2], p)
        head_cls = head_even_n if n % 2 == 0 else head_odd_n
        head = hilbert_class(head_cls, class_neg(classes[n - 1], p), p)
        row[n] = head * running
    return tuple(row)


def cycle_block_invariant_row(
    a: int, p: int, n_max: int, cap: int = 64
) -> tuple[int, ...]:
    """Batch C_p(cycle_block(a, n)) for all n up to n_max at one prime."""
    return _invariant_row(a, p, n_max, cap)


def cycle_block_invariant(a: int, n: int, place: Place | int | None) -> int:
    """C_p(cycle_block(a, n)) at any place."""
    if a <= 2 or n < 2:
        raise ValueError("need a >= 3 and n >= 2")
    p = _place_prime(place)
    if p is None:
        # All Lucas terms are positive, so every product term is +1 and
        # the leading symbol has two negative arguments.
        return -1
    return _invariant_row(a, p, n)[n]


def cycle_block3_invariant(a: int, place: Place | int | None) -> int:
    """Closed form C_p(cycle_block(a, 3)) = (-1,-1)_p (-a-2, a-1)_p."""
    if a < 2:
        raise ValueError("need a >= 2")
    return hilbert(-1, -1, place) * hilbert(-a - 2, a - 1, place)


def det_covering_gram(params: ParameterSet, ct: CycleType) -> int:
    """Exact Gram determinant without elimination.

    All blocks share row sum a + 2, so the rank-one update gives
    det X = (a + 2 + lambda * v) / (a + 2) * prod_i det B_{c_i}.
    """
    if ct.v != params.v:
        raise ValueError(f"cycle type sums to {ct.v}, expected v={params.v}")
    a = params.a
    prod = 1
    for c in ct.parts:
        prod *= cycle_block_det_closed(a, c)
    num = prod * (a + 2 + params.lambda_ * params.v)
    q, rem = divmod(num, a + 2)
    if rem:
        raise ArithmeticError("block determinant product not divisible by a + 2")
    return q


def has_square_det(params: ParameterSet, ct: CycleType) -> bool:
    """Whether det X is a perfect square, via its square class.

    det X = (a+2+lambda*v) * (a+2)^(t-e-1) * (a^2-4)^e * (integer)^2, so
    only the square class of the cofactor matters and no big product is
    ever formed.
    """
    a = params.a
    s = a + 2 + params.lambda_ * params.v
    if ct.t % 2 == 0:
        s *= a + 2
    if ct.num_even % 2 == 1:
        s *= a - 2
    return is_perfect_square(s)


def covering_gram_invariant(
    params: ParameterSet,
    ct: CycleType,
    place: Place | int | None,
    check_square: bool = True,
) -> int:
    """C_p(X) by the product formula: join factor times block invariants.

    Valid only when det X is a perfect square; ``check_square=False``
    skips the guard for callers that already know.
    """
    if ct.v != params.v:
        raise ValueError(f"cycle type sums to {ct.v}, expected v={params.v}")
    if check_square and not has_square_det(params, ct):
        raise NonSquareDeterminant(f"det X is not a perfect square for {ct}")
    a = params.a
    sign = join_factor(a, params.lambda_, ct.t, ct.num_even, place)
    p = _place_prime(place)
    if p is None:
        return sign * (-1) ** ct.t
    row = _invariant_row(a, p, max(ct.parts))
    for c in ct.parts:
        sign *= row[c]
    return sign
