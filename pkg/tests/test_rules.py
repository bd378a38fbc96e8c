import random

import pytest

from symcover.analysis import params_for
from symcover.cycletypes import CycleType, enumerate_feasible
from symcover.invariant import (
    NonSquareDeterminant,
    ParameterSet,
    covering_gram_invariant,
)
from symcover.rules import (
    MAY_EXIST,
    RULED_OUT,
    RULE_HASSE,
    brc_filter,
    hamilton_rule,
    hasse_rule,
    mod4_cycle_rule,
    recheck_certificate,
    run_all,
    small_cycles_rule2,
    small_cycles_rule5,
    square_test,
    uniform_rule_coprime,
    uniform_rule_divisible,
)

PS11 = ParameterSet(11, 4, 1)


def hasse_witnesses(verdict):
    if verdict is None:
        return set()
    return {c.place for c in verdict.certificates if c.rule == RULE_HASSE}


class TestSquareAndBrc:
    def test_known_examples(self):
        assert square_test(PS11, CycleType((2, 3, 6))) is None
        assert square_test(PS11, CycleType((11,))) is None
        assert square_test(PS11, CycleType((2, 9))) is not None

    def test_equivalence_with_brc(self):
        # the parity/square casework is exactly the determinant square test
        for ps in (PS11, ParameterSet(10, 5, 2), ParameterSet(28, 8, 2),
                   ParameterSet(15, 6, 2), ParameterSet(36, 9, 2)):
            for ct in enumerate_feasible(ps.v):
                assert (square_test(ps, ct) is None) == (brc_filter(ps, ct) is None), (ps, ct)

    def test_counts(self):
        ruled = sum(1 for ct in enumerate_feasible(11) if brc_filter(PS11, ct))
        assert ruled == 7
        ps19 = ParameterSet(19, 5, 1)
        ruled = sum(1 for ct in enumerate_feasible(19) if brc_filter(ps19, ct))
        assert ruled == 52


class TestHasseRule:
    def test_example_witnesses(self):
        assert hasse_witnesses(hasse_rule(PS11, CycleType((2, 4, 5)))) == {3, 5}
        assert hasse_rule(PS11, CycleType((3, 3, 5))) is None
        assert hasse_rule(PS11, CycleType((11,))) is None

    def test_requires_square_determinant(self):
        with pytest.raises(NonSquareDeterminant):
            hasse_rule(PS11, CycleType((2, 9)))

    def test_certificates_recheck(self):
        vd = hasse_rule(PS11, CycleType((2, 2, 7)))
        assert hasse_witnesses(vd) == {5, 13}
        for cert in vd.certificates:
            assert recheck_certificate(PS11, CycleType((2, 2, 7)), cert)


class TestMod4CycleRule:
    def test_examples(self):
        ps41 = params_for(7, 1)
        vd = mod4_cycle_rule(ps41, CycleType((2, 3) + (4,) * 9))
        assert vd and {c.place for c in vd.certificates} == {3}
        vd = mod4_cycle_rule(PS11, CycleType((2, 4, 5)))
        assert vd and {c.place for c in vd.certificates} == {3}
        assert mod4_cycle_rule(PS11, CycleType((11,))) is None

    def test_blocked_by_2p_divisible_cycle(self):
        # a cycle of length 2p removes the conclusion
        ps41 = params_for(7, 1)
        ct = CycleType.of([4, 6] + [31])
        assert mod4_cycle_rule(ps41, ct) is None

    def test_infinite_family(self):
        # k = 7, 31, 34, 58 mod 72 with lambda = 1: [2, 3, 4^((v-5)/4)] dies at p = 3
        for k in (7, 31, 34, 58, 79, 103):
            ps = params_for(k, 1)
            assert (ps.v - 5) % 4 == 0
            ct = CycleType((2, 3) + (4,) * ((ps.v - 5) // 4))
            vd = mod4_cycle_rule(ps, ct)
            assert vd and 3 in {c.place for c in vd.certificates}, k


class TestHamiltonRule:
    def test_examples(self):
        vd = hamilton_rule(ParameterSet(21, 7, 2))
        assert vd and {c.place for c in vd.certificates} == {7}
        assert hamilton_rule(params_for(8, 1)) is None

    def test_prime_power_family(self):
        # (p^a(p^a - 1)/2, p^a, 2) with p = 3 mod 4, a odd, (p, a) != (3, 1)
        for q in (7, 11, 19, 23, 27):
            ps = params_for(q, 2)
            vd = hamilton_rule(ps)
            assert vd is not None, q
            p = [c.place for c in vd.certificates]
            assert any(q % w == 0 for w in p), (q, p)

    def test_even_v_silent(self):
        assert hamilton_rule(ParameterSet(28, 8, 2)) is None


class TestUniformRules:
    def test_coprime_example(self):
        ps = params_for(10, 2)
        vd = uniform_rule_coprime(ps, 9, 5)
        assert vd and {c.place for c in vd.certificates} == {5}

    def test_coprime_family(self):
        # (2p^2 - p, 2p, 2) with p = 3, 5 mod 8: p cycles of length 2p-1
        for p in (3, 5, 11, 13, 19, 29):
            ps = params_for(2 * p, 2)
            assert ps.v == 2 * p * p - p
            vd = uniform_rule_coprime(ps, 2 * p - 1, p)
            assert vd and p in {c.place for c in vd.certificates}, p

    def test_never_rules_full_cycle(self):
        for k, lam in ((8, 1), (7, 2), (11, 2), (12, 5), (10, 4)):
            ps = params_for(k, lam)
            if ps is None or ps.v % 2 == 0:
                continue
            assert uniform_rule_coprime(ps, ps.v, 1) is None, (k, lam)

    def test_divisible_example(self):
        ps = params_for(11, 2)
        vd = uniform_rule_divisible(ps, 11, 5)
        assert vd and {c.place for c in vd.certificates} == {11}

    def test_divisible_family(self):
        # (p(p-1)/2, p, 2) with p > 3, p = 3, 7 mod 8: (p-1)/2 cycles of length p
        for p in (7, 11, 19, 23):
            ps = params_for(p, 2)
            vd = uniform_rule_divisible(ps, p, (p - 1) // 2)
            assert vd and p in {c.place for c in vd.certificates}, p

    def test_divisible_t1_matches_hamilton(self):
        for lam in range(1, 6):
            for k in range(lam + 3, 30):
                ps = params_for(k, lam)
                if ps is None or ps.v % 2 == 0:
                    continue
                ham = hamilton_rule(ps)
                uni = uniform_rule_divisible(ps, ps.v, 1)
                got_h = {c.place for c in ham.certificates} if ham else set()
                got_u = {c.place for c in uni.certificates} if uni else set()
                assert got_h == got_u, (k, lam, got_h, got_u)


class TestSmallCycleRules:
    def test_p5_rules_everything_for_41(self):
        ps = params_for(7, 1)
        for t3 in range(1, 14, 2):
            t2 = (41 - 3 * t3) // 2
            if t2 < 1 or 2 * t2 + 3 * t3 != 41:
                continue
            vd = small_cycles_rule5(ps, t2, t3)
            assert vd is not None, (t2, t3)

    def test_p5_example(self):
        assert small_cycles_rule5(PS11, 4, 1) is not None

    def test_p5_needs_odd_two_count_in_branch_two(self):
        ps = params_for(8, 1)
        assert small_cycles_rule5(ps, 2, 17) is None
        assert small_cycles_rule5(ps, 5, 15) is not None

    def test_p2_examples(self):
        ps55 = params_for(8, 1)
        vd = small_cycles_rule2(ps55, 2, 17)
        assert vd and vd.certificates[0].place == 2 and vd.certificates[0].sign == 1
        ps71 = params_for(9, 1)
        assert small_cycles_rule2(ps71, 4, 21) is not None
        # k = 1 mod 4 with t3 = 1 mod 8 stays open at p = 2
        assert small_cycles_rule2(ps71, 10, 17) is None

    def test_p2_negative_invariant_when_silent(self):
        ps71 = params_for(9, 1)
        ct = CycleType((2,) * 10 + (3,) * 17)
        assert covering_gram_invariant(ps71, ct, 2) == -1

    def test_k_mod_25_family(self):
        # k = 7, 12, 17, 22 mod 25 with lambda = 1: every 2/3-cycle type dies at p = 5
        for k in (7, 12, 17, 22, 32, 37):
            ps = params_for(k, 1)
            v = ps.v
            for t3 in range(1, v // 3 + 1, 2):
                t2 = (v - 3 * t3) // 2
                if t2 < 1 or 2 * t2 + 3 * t3 != v:
                    continue
                assert small_cycles_rule5(ps, t2, t3) is not None, (k, t2, t3)


class TestRunAll:
    def test_example_aggregation(self):
        vd = run_all(PS11, CycleType((3, 4, 4)), 1000)
        assert vd.ruled_out
        assert hasse_witnesses(vd) == {2, 5}
        vd = run_all(PS11, CycleType((2, 3, 6)), 1000)
        assert vd.status == MAY_EXIST and not vd.certificates

    def test_open_uniform_types(self):
        ps = params_for(9, 2)
        for parts in ((9, 9, 9, 9), (3,) * 12):
            vd = run_all(ps, CycleType(parts), 1000)
            assert vd.status == MAY_EXIST, parts

    def test_unreachable_paired_types(self):
        # v = 0 mod 4 with t = 0 mod 4, paired equal parts, e = 0 mod 4:
        # no prime can ever help
        ps = params_for(9, 2)
        for parts in ((3, 3, 15, 15), (2, 2, 16, 16), (9, 9, 9, 9),
                      (2, 2, 2, 2, 5, 5, 9, 9)):
            ct = CycleType.of(parts)
            if ct.t % 4 or ct.num_even % 4:
                continue
            if square_test(ps, ct) or brc_filter(ps, ct):
                continue
            assert hasse_rule(ps, ct, 1000) is None, parts

    def test_verdict_json(self):
        vd = run_all(PS11, CycleType((2, 2, 7)), 1000)
        payload = vd.to_json()
        assert payload["status"] == RULED_OUT
        assert payload["cycle_type"] == "2^2,7"
        assert {c["place"] for c in payload["certificates"]} == {5, 13}
        assert "elapsed_ms" in payload

    def test_all_certificates_recheck(self):
        rng = random.Random(77)
        pool = [PS11, params_for(5, 1), params_for(10, 2), params_for(7, 2)]
        for ps in pool:
            types = list(enumerate_feasible(ps.v))
            for ct in rng.sample(types, min(12, len(types))):
                vd = run_all(ps, ct, 1000)
                for cert in vd.certificates:
                    assert recheck_certificate(ps, ct, cert), (ps, ct, cert)
