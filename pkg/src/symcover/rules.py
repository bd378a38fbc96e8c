"""Nonexistence rules for symmetric coverings with 2-regular excess.

Each rule inspects one (parameter set, cycle type) pair and either
returns None (no conclusion) or a Verdict carrying machine-checkable
certificates.  A certificate names the rule, the witnessing place and
the invariant value it forces; ``recheck_certificate`` re-derives any of
them independently.

The ruling logic: no covering exists when the Gram determinant is not a
perfect square, when C_p(X) = -1 at an odd prime, or when C_p(X) = +1
at p = 2 (the identity matrix has the opposite values, so X cannot be
rationally congruent to it).  The scan over primes is restricted to
p = 2 and the odd primes dividing lambda * (a^2 - 4) or some Lucas term
u_i(a), i <= v; every other prime provably gives the trivial value.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache

from .cycletypes import CycleType
from .invariant import (
    NonSquareDeterminant,
    ParameterSet,
    covering_gram_invariant,
    cycle_block_invariant_row,
    has_square_det,
    join_factor,
)
from .numtheory import is_perfect_square, legendre, p_factorize, primes_up_to

__all__ = [
    "Certificate",
    "Verdict",
    "RuleConsistencyError",
    "MAY_EXIST",
    "RULED_OUT",
    "RULE_SQUARE",
    "RULE_BRC",
    "RULE_HASSE",
    "RULE_MOD4",
    "RULE_HAMILTON",
    "RULE_UNIFORM_COPRIME",
    "RULE_UNIFORM_DIVISIBLE",
    "RULE_SMALL_CYCLES_5",
    "RULE_SMALL_CYCLES_2",
    "HasseScanner",
    "get_scanner",
    "square_test",
    "brc_filter",
    "hasse_rule",
    "mod4_cycle_rule",
    "hamilton_rule",
    "uniform_rule_coprime",
    "uniform_rule_divisible",
    "small_cycles_rule5",
    "small_cycles_rule2",
    "run_all",
    "recheck_certificate",
]

MAY_EXIST = "may-exist"
RULED_OUT = "ruled-out"

RULE_SQUARE = "square"
RULE_BRC = "brc"
RULE_HASSE = "hasse"
RULE_MOD4 = "mod4-cycles"
RULE_HAMILTON = "hamilton"
RULE_UNIFORM_COPRIME = "uniform-coprime"
RULE_UNIFORM_DIVISIBLE = "uniform-divisible"
RULE_SMALL_CYCLES_5 = "small-cycles-5"
RULE_SMALL_CYCLES_2 = "small-cycles-2"


class RuleConsistencyError(AssertionError):
    """A closed-form rule fired at a prime the general scan does not confirm."""


@dataclass(frozen=True)
class Certificate:
    """One independently re-checkable reason a pair is ruled out."""

    rule: str
    place: int | None = None
    sign: int | None = None

    def to_json(self) -> dict:
        return {"rule": self.rule, "place": self.place, "sign": self.sign}


@dataclass(frozen=True)
class Verdict:
    params: ParameterSet
    ct: CycleType
    status: str
    certificates: tuple[Certificate, ...] = ()
    elapsed_ms: float | None = None

    @property
    def ruled_out(self) -> bool:
        return self.status == RULED_OUT

    def to_json(self) -> dict:
        out = {
            "params": {"v": self.params.v, "k": self.params.k, "lambda": self.params.lambda_},
            "cycle_type": str(self.ct),
            "status": self.status,
            "certificates": [c.to_json() for c in self.certificates],
        }
        if self.elapsed_ms is not None:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out


def _odd_prime_divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    while n % 2 == 0:
        n //= 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 2
    if n > 1:
        out.append(n)
    return out


def _relevant_odd_primes(a: int, lambda_: int, v: int, bound: int) -> list[int]:
    """Odd primes below bound dividing lambda*(a^2-4) or some u_i, i <= v."""
    fixed = lambda_ * (a * a - 4)
    rel = []
    for p in primes_up_to(bound):
        if p == 2:
            continue
        if fixed % p == 0:
            rel.append(p)
            continue
        prev, cur = 1 % p, a % p
        if cur == 0:
            rel.append(p)
            continue
        for _ in range(2, v):
            prev, cur = cur, (a * cur - prev) % p
            if cur == 0:
                rel.append(p)
                break
    return rel


class HasseScanner:
    """Batch evaluator of C_p(X) over all cycle types of one parameter set.

    Per relevant prime p the block invariants C_p(B_n) for n <= v are
    packed as one bit each into per-length masks; the invariant of a
    cycle type is then an XOR over its parts plus a join-factor mask
    depending only on (t - e, e) mod 4.  Bit j of ``witness_mask`` is set
    exactly when prime j rules the type out.
    """

    def __init__(self, params: ParameterSet, prime_bound: int, cap: int = 64):
        self.params = params
        self.prime_bound = prime_bound
        a, v = params.a, params.v
        self.primes = [2] + _relevant_odd_primes(a, params.lambda_, v, prime_bound)
        self.block_mask = [0] * (v + 1)
        for j, p in enumerate(self.primes):
            row = cycle_block_invariant_row(a, p, v, cap)
            bit = 1 << j
            for n in range(2, v + 1):
                if row[n] == -1:
                    self.block_mask[n] |= bit
        self._join: dict[tuple[int, int], int] = {}

    def _join_mask(self, t: int, e: int) -> int:
        # join_factor depends on (t, e) only through (t-e) mod 4 and e mod 4
        key = ((t - e) & 3, e & 3)
        mask = self._join.get(key)
        if mask is None:
            mask = 0
            a, lam = self.params.a, self.params.lambda_
            for j, p in enumerate(self.primes):
                if join_factor(a, lam, t, e, p) == -1:
                    mask |= 1 << j
            self._join[key] = mask
        return mask

    def witness_mask(self, parts: tuple[int, ...]) -> int:
        x = 0
        e = 0
        bm = self.block_mask
        for c in parts:
            x ^= bm[c]
            e += 1 - (c & 1)
        x ^= self._join_mask(len(parts), e)
        # bit j set now means C_p = -1; ruling out needs -1 at odd p but
        # +1 at p = 2, so flip the p = 2 bit
        return x ^ 1

    def witnesses(self, parts: tuple[int, ...]) -> list[int]:
        mask = self.witness_mask(parts)
        return [p for j, p in enumerate(self.primes) if (mask >> j) & 1]


@lru_cache(maxsize=8)
def get_scanner(params: ParameterSet, prime_bound: int) -> HasseScanner:
    return HasseScanner(params, prime_bound)


def _verdict(params: ParameterSet, ct: CycleType, certs: list[Certificate]) -> Verdict | None:
    if not certs:
        return None
    return Verdict(params, ct, RULED_OUT, tuple(certs))


def square_test(params: ParameterSet, ct: CycleType) -> Verdict | None:
    """Rule out when the Gram determinant is not a perfect square."""
    if has_square_det(params, ct):
        return None
    return _verdict(params, ct, [Certificate(RULE_SQUARE)])


def brc_filter(params: ParameterSet, ct: CycleType) -> Verdict | None:
    """Parity and square-part casework on (v, cycle count).

    For odd v the excess must have an odd number of cycles; for even v
    it needs k - lambda - 2 square (odd count) or k - lambda + 2 square
    (even count).  Parameter sets with k <= lambda + 2 never reach here.
    """
    t = ct.t
    a = params.a
    if params.v % 2 == 1:
        allowed = t % 2 == 1
    else:
        allowed = (is_perfect_square(a - 2) and t % 2 == 1) or (
            is_perfect_square(a + 2) and t % 2 == 0
        )
    if allowed:
        return None
    return _verdict(params, ct, [Certificate(RULE_BRC)])


def hasse_rule(
    params: ParameterSet, ct: CycleType, prime_bound: int = 1000
) -> Verdict | None:
    """Scan C_p(X) over all relevant primes below the bound.

    Requires a square Gram determinant; run square_test first.
    """
    if ct.v != params.v:
        raise ValueError(f"cycle type sums to {ct.v}, expected v={params.v}")
    if not has_square_det(params, ct):
        raise NonSquareDeterminant("square_test already rules this pair out")
    sc = get_scanner(params, prime_bound)
    certs = [
        Certificate(RULE_HASSE, p, 1 if p == 2 else -1) for p in sc.witnesses(ct.parts)
    ]
    return _verdict(params, ct, certs)


def mod4_cycle_rule(params: ParameterSet, ct: CycleType) -> Verdict | None:
    """Primes p = 3 mod 4 with odd multiplicity in k - lambda.

    Such a prime (not dividing lambda) rules out any excess with an odd
    number of cycle lengths divisible by 4 and none divisible by 2p.
    """
    if sum(1 for c in ct.parts if c % 4 == 0) % 2 == 0:
        return None
    a = params.a
    certs = []
    for p in _odd_prime_divisors(a):
        if p % 4 != 3 or params.lambda_ % p == 0:
            continue
        if p_factorize(a, p).valuation % 2 == 0:
            continue
        if all(c % (2 * p) for c in ct.parts):
            certs.append(Certificate(RULE_MOD4, p, -1))
    return _verdict(params, ct, certs)


def hamilton_rule(params: ParameterSet) -> Verdict | None:
    """Hamilton-cycle excess on odd v, via primes dividing k - lambda + 2.

    Fires for p = 3 mod 4 dividing both v and m = k - lambda + 2 with
    p-factorisations m = s * p^alpha, v = vbar * p^delta,
    lambda - 2 = ell * p^gamma (lambda > 2), when either

      (i)  alpha odd, (p, alpha) != (3, 1), and lambda = 2 or alpha < 2*gamma;
      (ii) lambda > 2, alpha = 2*gamma, delta odd.
    """
    if params.v % 2 == 0:
        return None
    lam = params.lambda_
    m = params.a + 2
    certs = []
    for p in _odd_prime_divisors(m):
        if p % 4 != 3 or params.v % p:
            continue
        alpha = p_factorize(m, p).valuation
        gamma = p_factorize(lam - 2, p).valuation if lam > 2 else None
        fire = False
        if alpha % 2 == 1 and (p, alpha) != (3, 1):
            if lam == 2 or (lam > 2 and alpha < 2 * gamma):
                fire = True
        if not fire and lam > 2 and alpha == 2 * gamma:
            if p_factorize(params.v, p).valuation % 2 == 1:
                fire = True
        if fire:
            certs.append(Certificate(RULE_HAMILTON, p, -1))
    ct = CycleType((params.v,))
    return _verdict(params, ct, certs)


def uniform_rule_coprime(params: ParameterSet, n: int, t: int) -> Verdict | None:
    """Excess of t cycles of length n (v = nt odd), primes not dividing n.

    For odd p dividing m = k - lambda + 2 with p-factorisations
    m = s * p^alpha and lambda = lbar * p^gamma, the type is ruled out when

      alpha even, gamma odd, (s/p) = -1; or
      alpha odd, gamma even, ((-1)^((t-1)/2) * n * lbar / p) = -1; or
      alpha odd, gamma odd,  ((-1)^((t+1)/2) * n * s * lbar / p) = -1;

    and otherwise C_p(X) = +1, so p can never help.
    """
    if n * t != params.v:
        raise ValueError("need n * t = v")
    if params.v % 2 == 0:
        return None
    certs = []
    m = params.a + 2
    for p in _odd_prime_divisors(m):
        if n % p == 0:
            continue
        fm = p_factorize(m, p)
        fl = p_factorize(params.lambda_, p)
        s, alpha = fm.unit, fm.valuation
        lbar, gamma = fl.unit, fl.valuation
        if alpha % 2 == 0:
            fire = gamma % 2 == 1 and legendre(s, p) == -1
        elif gamma % 2 == 0:
            fire = legendre((-1) ** ((t - 1) // 2) * n * lbar, p) == -1
        else:
            fire = legendre((-1) ** ((t + 1) // 2) * n * s * lbar, p) == -1
        if fire:
            certs.append(Certificate(RULE_UNIFORM_COPRIME, p, -1))
    return _verdict(params, CycleType((n,) * t), certs)


def uniform_rule_divisible(params: ParameterSet, n: int, t: int) -> Verdict | None:
    """Excess of t cycles of length n (v = nt odd), primes dividing n.

    For odd p dividing both n and m = k - lambda + 2 (with 9 | m required
    when p = 3), writing m = s * p^alpha and n = nbar * p^delta:

      alpha even, delta odd, (-s/p) = -1; or
      alpha odd, delta even, ((-1)^((t-1)/2) * 2 * nbar / p) = -1; or
      alpha odd, delta odd,  ((-1)^((t-1)/2) * 2 * s * nbar / p) = -1;

    and otherwise C_p(X) = +1.
    """
    if n * t != params.v:
        raise ValueError("need n * t = v")
    if params.v % 2 == 0:
        return None
    certs = []
    m = params.a + 2
    for p in _odd_prime_divisors(m):
        if n % p:
            continue
        if p == 3 and m % 9:
            continue
        fm = p_factorize(m, p)
        fn = p_factorize(n, p)
        s, alpha = fm.unit, fm.valuation
        nbar, delta = fn.unit, fn.valuation
        half = (-1) ** ((t - 1) // 2)
        if alpha % 2 == 0:
            fire = delta % 2 == 1 and legendre(-s, p) == -1
        elif delta % 2 == 0:
            fire = legendre(half * 2 * nbar, p) == -1
        else:
            fire = legendre(half * 2 * s * nbar, p) == -1
        if fire:
            certs.append(Certificate(RULE_UNIFORM_DIVISIBLE, p, -1))
    return _verdict(params, CycleType((n,) * t), certs)


def small_cycles_rule5(params: ParameterSet, t2: int, t3: int) -> Verdict | None:
    """Excess of t2 2-cycles and t3 3-cycles (both >= 1), tested at p = 5.

    With a = k - lambda and lambda coprime to 5, C_5(X) = -1 when

      (i)   a - 1 = 5^alpha * s, alpha odd, and t3 odd; or
      (ii)  a - 2 = 5^alpha * s, alpha odd, t2 odd, lambda = 1, 4 mod 5; or
      (iii) a + 2 = 5^alpha * s, alpha odd, t2 + t3 odd, lambda = 1, 4 mod 5.
    """
    if t2 < 1 or t3 < 1:
        return None
    if 2 * t2 + 3 * t3 != params.v:
        raise ValueError("need 2*t2 + 3*t3 = v")
    lam = params.lambda_
    if lam % 5 == 0:
        return None
    a = params.a

    def odd_val5(x: int) -> bool:
        return x % 5 == 0 and p_factorize(x, 5).valuation % 2 == 1

    fire = odd_val5(a - 1) and t3 % 2 == 1
    if not fire and lam % 5 in (1, 4):
        fire = (odd_val5(a - 2) and t2 % 2 == 1) or (
            odd_val5(a + 2) and (t2 + t3) % 2 == 1
        )
    ct = CycleType((2,) * t2 + (3,) * t3)
    return _verdict(params, ct, [Certificate(RULE_SMALL_CYCLES_5, 5, -1)] if fire else [])


def small_cycles_rule2(params: ParameterSet, t2: int, t3: int) -> Verdict | None:
    """Excess of t2 2-cycles and t3 3-cycles for lambda = 1, tested at p = 2.

    C_2(X) = +1 (which rules the pair out) when

      (i)  k = 0 mod 4 and t3 = 1 mod 4; or
      (ii) k = 1 mod 4 and t3 = 5 mod 8.
    """
    if t2 < 1 or t3 < 1 or params.lambda_ != 1:
        return None
    if 2 * t2 + 3 * t3 != params.v:
        raise ValueError("need 2*t2 + 3*t3 = v")
    k = params.k
    fire = (k % 4 == 0 and t3 % 4 == 1) or (k % 4 == 1 and t3 % 8 == 5)
    ct = CycleType((2,) * t2 + (3,) * t3)
    return _verdict(params, ct, [Certificate(RULE_SMALL_CYCLES_2, 2, 1)] if fire else [])


def _closed_form_certs(params: ParameterSet, ct: CycleType) -> list[Certificate]:
    certs: list[Certificate] = []
    if v := mod4_cycle_rule(params, ct):
        certs.extend(v.certificates)
    parts = ct.parts
    if parts == (params.v,):
        if v := hamilton_rule(params):
            certs.extend(v.certificates)
    if len(set(parts)) == 1:
        n, t = parts[0], len(parts)
        if v := uniform_rule_coprime(params, n, t):
            certs.extend(v.certificates)
        if v := uniform_rule_divisible(params, n, t):
            certs.extend(v.certificates)
    if set(parts) <= {2, 3}:
        t2 = sum(1 for c in parts if c == 2)
        t3 = len(parts) - t2
        if v := small_cycles_rule5(params, t2, t3):
            certs.extend(v.certificates)
        if v := small_cycles_rule2(params, t2, t3):
            certs.extend(v.certificates)
    return certs


def run_all(
    params: ParameterSet, ct: CycleType, prime_bound: int = 1000
) -> Verdict:
    """Apply every rule, aggregate certificates, verify cross-consistency.

    Closed-form rules firing below the prime bound must be confirmed by
    the general scan; a mismatch raises RuleConsistencyError since it
    would mean one of the two paths is wrong.
    """
    start = time.perf_counter()
    certs: list[Certificate] = []
    square_ok = True
    if v := square_test(params, ct):
        certs.extend(v.certificates)
        square_ok = False
    if v := brc_filter(params, ct):
        certs.extend(v.certificates)
    closed = _closed_form_certs(params, ct)
    certs.extend(closed)
    if square_ok:
        hv = hasse_rule(params, ct, prime_bound)
        hasse_primes = set()
        if hv:
            certs.extend(hv.certificates)
            hasse_primes = {c.place for c in hv.certificates}
        for cert in closed:
            if cert.place is not None and cert.place < prime_bound:
                if cert.place not in hasse_primes:
                    raise RuleConsistencyError(
                        f"{cert.rule} fired at p={cert.place} on {params} {ct} "
                        "but the invariant scan does not confirm it"
                    )
    status = RULED_OUT if certs else MAY_EXIST
    elapsed = (time.perf_counter() - start) * 1000.0
    return Verdict(params, ct, status, tuple(certs), elapsed_ms=elapsed)


def recheck_certificate(
    params: ParameterSet, ct: CycleType, cert: Certificate
) -> bool:
    """Recompute a certificate from scratch; True when it still holds."""
    if cert.rule == RULE_SQUARE:
        return not has_square_det(params, ct)
    if cert.rule == RULE_BRC:
        return brc_filter(params, ct) is not None
    if cert.rule == RULE_HASSE:
        sign = covering_gram_invariant(params, ct, cert.place)
        needed = 1 if cert.place == 2 else -1
        return sign == needed == cert.sign
    verdict: Verdict | None
    if cert.rule == RULE_MOD4:
        verdict = mod4_cycle_rule(params, ct)
    elif cert.rule == RULE_HAMILTON:
        verdict = hamilton_rule(params) if ct.parts == (params.v,) else None
    elif cert.rule in (RULE_UNIFORM_COPRIME, RULE_UNIFORM_DIVISIBLE):
        if len(set(ct.parts)) != 1:
            return False
        n, t = ct.parts[0], ct.t
        fn = uniform_rule_coprime if cert.rule == RULE_UNIFORM_COPRIME else uniform_rule_divisible
        verdict = fn(params, n, t)
    elif cert.rule in (RULE_SMALL_CYCLES_5, RULE_SMALL_CYCLES_2):
        if not set(ct.parts) <= {2, 3}:
            return False
        t2 = sum(1 for c in ct.parts if c == 2)
        fn = small_cycles_rule5 if cert.rule == RULE_SMALL_CYCLES_5 else small_cycles_rule2
        verdict = fn(params, t2, ct.t - t2)
    else:
        raise ValueError(f"unknown rule {cert.rule!r}")
    return verdict is not None and cert in verdict.certificates
