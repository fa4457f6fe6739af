import math
import random

import pytest

from oracles import brute_least_nonresidue, brute_least_primitive_root, brute_order
from primroots.arith import factorize, is_primitive_root, prime_array
from primroots.constructor import (
    BURGESS_EXPONENT,
    bound_exponent_main1,
    bound_exponent_main3,
    condition2_sum,
    construct_simultaneous_nonresidue,
    group_levels,
    least_primitive_root,
    lift_step,
    residue_profile,
    verify_remark2,
)
from primroots.dickman import u_of
from primroots.errors import ContractError, DomainError
from primroots.structure import DlogContext, ResidueConstraintSet, jacobsthal_of_primes, min_avoiding


def test_burgess_constant():
    assert BURGESS_EXPONENT == pytest.approx(0.15163266492815836, rel=1e-15)


class TestProfileAndLevels:
    def test_profiles(self):
        assert residue_profile(13).entries == ((2, 2), (3, 2))
        assert residue_profile(41).entries == ((5, 2), (2, 3))
        assert residue_profile(3).entries == ((2, 2),)
        with pytest.raises(DomainError):
            residue_profile(2)
        with pytest.raises(DomainError):
            residue_profile(15)

    def test_levels_examples(self):
        g13 = group_levels(residue_profile(13))
        assert [lv.primes for lv in g13.levels] == [(2, 3)]
        assert g13.g_values == (2,) and g13.divisors == (6,)
        g41 = group_levels(residue_profile(41))
        assert [lv.primes for lv in g41.levels] == [(5,), (2,)]
        assert g41.g_values == (2, 3) and g41.divisors == (10, 2)
        assert [lv.primes for lv in group_levels(residue_profile(257)).levels] == [(2,)]

    def test_level_invariants(self):
        for p in prime_array(20000).tolist()[1:]:
            g = group_levels(residue_profile(p))
            pm1 = factorize(p - 1)
            flat = sorted(q for lv in g.levels for q in lv.primes)
            assert flat == list(pm1.primes)
            assert all(a < b for a, b in zip(g.g_values, g.g_values[1:]))
            assert g.divisors[0] == pm1.radical
            for i, d in enumerate(g.divisors):
                assert d == math.prod(q for lv in g.levels[i:] for q in lv.primes)
            if p < 3000:
                for lv in g.levels:
                    assert all(brute_least_nonresidue(p, q) == lv.g for q in lv.primes)

    def test_remark2(self):
        assert verify_remark2(group_levels(residue_profile(41)))
        assert verify_remark2(group_levels(residue_profile(13)))
        rng = random.Random(7)
        for p in rng.sample(prime_array(10**5).tolist()[1:], 400):
            assert verify_remark2(group_levels(residue_profile(p)))


class TestLiftStep:
    def test_p41(self):
        ctx = DlogContext(41)
        r = lift_step(2, 3, (5,), (2,), ctx)
        assert (r.m, r.product) == (1, 6)
        assert pow(6, 8, 41) == 10 and pow(6, 20, 41) == 40

    def test_empty_level(self):
        with pytest.raises(DomainError):
            lift_step(2, 3, (), (2,), DlogContext(41))

    @pytest.mark.parametrize(
        "y,z,A,B,bad_q",
        [
            (32, 3, (5,), (2,), 5),  # y = 2^5 is a fifth power
            (6, 3, (5,), (2,), 2),  # y = 6 is not a square
            (2, 4, (5,), (2,), 2),  # z is a square
        ],
    )
    def test_preconditions(self, y, z, A, B, bad_q):
        with pytest.raises(ContractError) as err:
            lift_step(y, z, A, B, DlogContext(41))
        assert err.value.context["q"] == bad_q

    def test_matches_min_avoiding_sweep(self):
        for p in prime_array(10**5).tolist()[1::7]:
            g = group_levels(residue_profile(p))
            if g.s < 2:
                continue
            ctx = DlogContext(p)
            z = g.levels[-1].g
            later = list(g.levels[-1].primes)
            for t in range(g.s - 2, -1, -1):
                lv = g.levels[t]
                r = lift_step(lv.g, z, lv.primes, later, ctx)
                j = jacobsthal_of_primes(lv.primes)
                cs = ResidueConstraintSet(r.forbidden)
                if r.used_zero:
                    assert r.m == 0 and min_avoiding(cs, start=1) > j - 1
                else:
                    assert r.m == min_avoiding(cs, start=1) <= j - 1
                for q in list(lv.primes) + later:
                    assert pow(r.product, (p - 1) // q, p) != 1
                z = r.product
                later += lv.primes


class TestConstruction:
    def test_p13(self):
        t = construct_simultaneous_nonresidue(13)
        assert t.result == 2 and t.grouping.s == 1 and t.exponents == (1,)
        assert brute_order(2, 13) == 12

    def test_p41_tight(self):
        t = construct_simultaneous_nonresidue(41)
        assert t.result == 6 == t.least_primitive_root == brute_least_primitive_root(41)
        assert t.exponents == (1, 1)
        assert t.partial_products == (6, 3)

    def test_p7_and_p3(self):
        t = construct_simultaneous_nonresidue(7)
        assert residue_profile(7).entries == ((3, 2), (2, 3))
        assert brute_order(t.result, 7) == 6
        # 2 * 3 = -1 is a cube, so no m in [1, j(3) - 1] works and m = 0 is taken
        assert t.exponents == (0, 1) and t.result == 3
        assert t.flags == ["m_zero_level_1"]
        assert construct_simultaneous_nonresidue(3).result == 2

    def test_least_primitive_root_examples(self):
        assert least_primitive_root(7) == 3
        assert least_primitive_root(41) == 6
        assert least_primitive_root(3) == 2

    def test_all_primes_to_2e4(self):
        for p in prime_array(20000).tolist()[1:]:
            t = construct_simultaneous_nonresidue(p)
            pm1 = factorize(p - 1)
            assert is_primitive_root(t.result, p, pm1)
            assert t.result >= t.least_primitive_root
            assert t.exponents[-1] == 1
            assert t.integer_product % p == t.result
            for lv, m, lift in zip(t.grouping.levels, t.exponents, t.lifts):
                if lift is not None:
                    assert m <= jacobsthal_of_primes(lv.primes) - 1

    def test_large_prime(self):
        p = 1000000007
        t = construct_simultaneous_nonresidue(p)
        assert is_primitive_root(t.result, p)
        assert t.least_primitive_root == 5

    def test_log_bookkeeping(self):
        for p in (41, 7, 998244353, 1000003, 2311):
            t = construct_simultaneous_nonresidue(p)
            exact = math.log(t.integer_product) / math.log(p)
            assert t.realized_exponent == pytest.approx(exact, rel=1e-14, abs=1e-15)

    def test_trace_dict(self):
        d = construct_simultaneous_nonresidue(41).to_dict()
        assert list(d)[:3] == ["p", "result", "least_primitive_root"]
        assert d["levels"][0]["forbidden"] == [[5, 0]]
        assert set(d["bound_exponents"]) >= {"main1", "main1_j_minus_1", "main3"}


class TestBounds:
    def test_main1_single_level(self):
        assert bound_exponent_main1(13, 0.01) == BURGESS_EXPONENT + 0.01

    def test_main1_p41(self):
        expected = BURGESS_EXPONENT + 2 / u_of(10) + 0.01
        assert bound_exponent_main1(41, 0.01) == pytest.approx(expected, rel=1e-15)
        assert bound_exponent_main1(41, 0.01, j_minus_1=True) == pytest.approx(BURGESS_EXPONENT + 1 / u_of(10) + 0.01, rel=1e-15)

    def test_main3(self):
        assert bound_exponent_main3(257, 0.01) == BURGESS_EXPONENT + 0.01
        assert bound_exponent_main3(41, 0.01) == pytest.approx(BURGESS_EXPONENT + 10 / u_of(10) + 0.01, rel=1e-15)
        # 2311 - 1 = 2 3 5 7 11
        b = [6, 30, 210, 2310]
        assert bound_exponent_main3(2311, 0.05) == pytest.approx(BURGESS_EXPONENT + sum(10 / u_of(x) for x in b) + 0.05, rel=1e-14)

    def test_condition2(self):
        assert condition2_sum(257) == 0
        assert condition2_sum(23) == pytest.approx(1 / math.log(11), rel=1e-15)
        assert condition2_sum(23) == pytest.approx(0.417, abs=1e-3)
        assert condition2_sum(13) == pytest.approx(0.910, abs=1e-3)
        raw = condition2_sum(23, raw=True)
        assert raw == pytest.approx(math.log(math.log(11)) / math.log(11))
