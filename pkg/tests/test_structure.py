import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_jacobsthal, brute_least_primitive_root
from primroots.arith import factorize, prime_array, radical
from primroots.errors import CapacityError, ContractError, DomainError
from primroots.structure import (
    DlogContext,
    ResidueConstraintSet,
    crt_combine,
    discrete_log,
    jacobsthal_covering_bound,
    jacobsthal_exact,
    jacobsthal_of_primes,
    jacobsthal_pigeonhole_bound,
    least_primitive_root,
    min_avoiding,
    min_avoiding_checked,
)


class TestDlog:
    def test_examples(self):
        ctx = DlogContext(41)
        assert ctx.generator == 6
        assert discrete_log(1, ctx) == 0
        assert discrete_log(6, ctx) == 1
        assert discrete_log(pow(6, 7, 41), ctx) == 7
        with pytest.raises(DomainError):
            discrete_log(0, ctx)

    def test_round_trip_all_small_primes(self):
        for p in prime_array(10**4).tolist():
            ctx = DlogContext(p)
            g = ctx.generator
            table = ctx.full_table()
            x = 1
            for e in range(p - 1):
                assert table[x] == e
                x = x * g % p

    def test_bsgs_path_matches_table(self):
        # force the Pohlig-Hellman path on primes above the table limit
        for p in (10007, 65537, 1000003, 998244353):
            ctx = DlogContext(p)
            g = ctx.generator
            for e in random.Random(p).sample(range(p - 1), 200):
                assert ctx.log(pow(g, e, p)) == e

    def test_log_mod_prime(self):
        p = 998244353  # p - 1 = 2^23 * 7 * 17
        ctx = DlogContext(p)
        for a in (2, 3, 5, 10**6 + 3):
            e = ctx.log(a)
            for q in ctx.p_minus_1.primes:
                assert ctx.log_mod_prime(a, q) == e % q

    def test_homomorphism(self):
        for p in prime_array(500).tolist():
            ctx = DlogContext(p)
            L = np.array([0] + [ctx.log(a) for a in range(1, p)])
            a = np.arange(1, p)
            prod = np.outer(a, a) % p
            assert np.array_equal(L[prod], (L[a][:, None] + L[a][None, :]) % (p - 1))

    def test_custom_generator(self):
        ctx = DlogContext(41, generator=7)
        assert pow(7, ctx.log(10), 41) == 10
        with pytest.raises(DomainError):
            DlogContext(41, generator=2)

    def test_least_primitive_root(self):
        assert least_primitive_root(7) == 3
        assert least_primitive_root(41) == 6
        assert least_primitive_root(3) == 2
        for p in prime_array(3000).tolist()[1:]:
            assert least_primitive_root(p) == brute_least_primitive_root(p)


class TestCRT:
    def test_examples(self):
        assert crt_combine(ResidueConstraintSet(((3, 1), (5, 2)))) == (7, 15)
        assert crt_combine(ResidueConstraintSet(((7, 0),))) == (0, 7)
        assert crt_combine(ResidueConstraintSet()) == (0, 1)

    def test_duplicate_modulus(self):
        with pytest.raises(DomainError):
            ResidueConstraintSet(((3, 1), (3, 2)))

    def test_normalises(self):
        assert ResidueConstraintSet(((5, 12),)).constraints == ((5, 2),)

    @given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 13, 17, 19, 23]), unique=True, max_size=6), st.data())
    @settings(max_examples=80, deadline=None)
    def test_solution(self, primes, data):
        pairs = tuple((q, data.draw(st.integers(0, q - 1))) for q in primes)
        b, P = crt_combine(ResidueConstraintSet(pairs))
        assert P == math.prod(primes) and 0 <= b < P
        assert all(b % q == a for q, a in pairs)


class TestJacobsthal:
    def test_examples(self):
        assert jacobsthal_exact(1) == 1
        assert jacobsthal_exact(2) == 2
        assert jacobsthal_exact(30) == 6
        assert jacobsthal_exact(22) == 4
        assert jacobsthal_exact(35) == 3
        assert jacobsthal_exact(2431) == 4

    def test_known_primorials(self):
        # j of the primorials 2, 6, 30, 210, 2310, 30030, 510510, 9699690
        got = [jacobsthal_exact(n) for n in (2, 6, 30, 210, 2310, 30030, 510510, 9699690)]
        assert got == [2, 4, 6, 10, 14, 22, 26, 34]

    def test_against_window_definition(self):
        for n in range(1, 3000):
            if factorize(n).mobius() != 0:
                assert jacobsthal_exact(n) == brute_jacobsthal(n), n

    def test_depends_on_radical(self):
        for n in range(1, 10**4 + 1):
            assert jacobsthal_exact(n) == jacobsthal_exact(radical(n))

    def test_definition_windows_sampled(self):
        # every window of length j in [1, 2n] meets a coprime; some window of length j - 1 does not
        rng = random.Random(5)
        squarefree = [n for n in range(2, 10**5) if factorize(n).mobius() != 0]
        for n in rng.sample(squarefree, 60):
            j = jacobsthal_exact(n)
            cop = [math.gcd(k, n) == 1 for k in range(2 * n + 2)]
            assert all(any(cop[s:s + j]) for s in range(1, 2 * n - j + 2))
            assert any(not any(cop[s:s + j - 1]) for s in range(1, 2 * n - j + 2))

    def test_capacity(self):
        with pytest.raises(CapacityError):
            jacobsthal_of_primes((2, 3, 5, 7, 11), scan_limit=1000)

    def test_pigeonhole_corrected(self):
        assert jacobsthal_pigeonhole_bound(35) == 3
        assert jacobsthal_pigeonhole_bound(6) is None
        assert jacobsthal_pigeonhole_bound(2431) == 4
        # the bare omega(n) fails already for one prime
        assert jacobsthal_exact(7) == 2 > factorize(7).omega
        for n in range(2, 5000):
            b = jacobsthal_pigeonhole_bound(n)
            if b is not None:
                assert jacobsthal_exact(n) <= b

    def test_covering_bound(self):
        assert jacobsthal_covering_bound((2, 3, 5)) is None
        for primes in [(5, 7), (7, 11, 13), (11, 13, 17, 19), (3, 7, 11)]:
            b = jacobsthal_covering_bound(primes)
            assert b is not None and jacobsthal_of_primes(primes) <= b


class TestMinAvoiding:
    def test_examples(self):
        assert min_avoiding(ResidueConstraintSet(((3, 0),))) == 1
        assert min_avoiding(ResidueConstraintSet(((3, 1), (5, 2)))) == 0
        m, j = min_avoiding_checked(ResidueConstraintSet(((3, 0), (5, 0), (7, 0))))
        assert m == 1 and j == 5

    def test_start(self):
        assert min_avoiding(ResidueConstraintSet(((3, 1),)), start=1) == 2

    @given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 13, 17, 19]), unique=True, min_size=1, max_size=5), st.data())
    @settings(max_examples=150, deadline=None)
    def test_jacobsthal_bound(self, primes, data):
        pairs = tuple((q, data.draw(st.integers(0, q - 1))) for q in primes)
        cs = ResidueConstraintSet(pairs)
        j = jacobsthal_of_primes(tuple(sorted(primes)))
        m = min_avoiding(cs)
        assert m <= j - 1
        assert all(m % q != a for q, a in cs.constraints)
        assert all(any(k % q == a for q, a in cs.constraints) for k in range(m))
        # shifted origin: an admissible m >= 1 lies in [1, j]
        assert min_avoiding(cs, start=1) <= j

    def test_checked_raises_when_contract_broken(self, monkeypatch):
        import primroots.structure as S

        monkeypatch.setattr(S, "min_avoiding", lambda cs, start=0: 10**6)
        with pytest.raises(ContractError):
            S.min_avoiding_checked(ResidueConstraintSet(((3, 0),)))
