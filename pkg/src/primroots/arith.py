"""Integer and modular arithmetic primitives.

Everything here works on Python ints, so products never overflow; the
64-bit limits below are enforced explicitly to keep the behaviour
predictable for the sweep code built on top.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import CapacityError, DomainError

MAX_FACTOR_INPUT = 1 << 63
MAX_PRIME = 1 << 62
TRIAL_DIVISION_LIMIT = 10**6
DEFAULT_SEGMENT_SIZE = 1 << 20
# odd-only bytearray of this many entries is the largest dense sieve we allow
DENSE_SIEVE_BUDGET = 2 * 10**8

# deterministic for every n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


# --------------------------------------------------------------------- sieves

def _small_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def prime_array(limit: int, *, budget: int = DENSE_SIEVE_BUDGET) -> np.ndarray:
    """All primes <= limit as an int64 numpy array (dense, odd-only sieve)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    if limit // 2 > budget:
        raise CapacityError(
            f"dense sieve to {limit} exceeds budget of {budget} entries; "
            "use iter_prime_segments for segmented mode"
        )
    # index i stands for 2*i + 1
    half = limit // 2 + 1
    odd = np.ones(half, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2::p] = False
    out = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    if out.size and out[-1] > limit:
        out = out[:-1]
    return np.concatenate(([2], out)).astype(np.int64)


def sieve_primes(limit: int, *, budget: int = DENSE_SIEVE_BUDGET) -> List[int]:
    """Ordered list of the primes in [2, limit]."""
    if limit < 2:
        raise DomainError("sieve_primes requires limit >= 2")
    return prime_array(limit, budget=budget).tolist()


def iter_prime_segments(
    lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT_SIZE
) -> Iterator[np.ndarray]:
    """Yield the primes in [lo, hi] as consecutive int64 arrays, one per segment.

    Memory stays at O(segment_size + sqrt(hi)) regardless of the range.
    """
    if hi < 2 or hi < lo:
        return
    lo = max(lo, 2)
    base = _small_sieve(math.isqrt(hi))
    start = lo
    while start <= hi:
        stop = min(start + segment_size, hi + 1)
        flags = np.ones(stop - start, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            flags[first - start::p] = False
        if start <= 1 < stop:
            flags[1 - start] = False
        if start == 0:
            flags[0] = False
        yield (np.flatnonzero(flags) + start).astype(np.int64)
        start = stop


class SmallestFactorTable:
    """Smallest-prime-factor table for bulk factorization of n <= limit.

    Built once and read-only afterwards, so it can be shared across workers.
    """

    def __init__(self, limit: int):
        if limit > 5 * 10**7:
            raise CapacityError(f"smallest-factor table to {limit} is too large")
        self.limit = limit
        spf = np.zeros(limit + 1, dtype=np.int32)
        spf[2::2] = 2
        for p in range(3, math.isqrt(limit) + 1, 2):
            if spf[p] == 0:
                view = spf[p * p::p]
                view[view == 0] = p
        rest = np.flatnonzero(spf == 0)
        spf[rest] = rest
        spf[:2] = 0
        self._spf = spf

    def factorize(self, n: int) -> "FactoredInteger":
        if n < 1:
            raise DomainError("factorize requires n >= 1")
        if n > self.limit:
            return factorize(n)
        spf = self._spf
        factors: List[Tuple[int, int]] = []
        while n > 1:
            q = int(spf[n])
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            factors.append((q, e))
        return FactoredInteger._trusted(math.prod(q**e for q, e in factors), tuple(factors))


# ------------------------------------------------------------------ primality

def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all 64-bit inputs."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=1)
def _trial_primes() -> Tuple[int, ...]:
    return tuple(prime_array(TRIAL_DIVISION_LIMIT).tolist())


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split_large(n: int, out: Dict[int, int], rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n, rng)
    _split_large(d, out, rng)
    _split_large(n // d, out, rng)


# ------------------------------------------------------------ factored values

@dataclass(frozen=True)
class FactoredInteger:
    """A positive integer with its prime factorization, primes ascending."""

    value: int
    factors: Tuple[Tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if self.value < 1:
            raise DomainError("FactoredInteger value must be positive")
        prev = 1
        prod = 1
        for q, e in self.factors:
            if q <= prev or e < 1 or not is_prime(q):
                raise DomainError(f"invalid factor list {self.factors!r}")
            prev = q
            prod *= q**e
        if prod != self.value:
            raise DomainError(f"factors of {self.value} multiply to {prod}")

    @classmethod
    def _trusted(cls, value: int, factors: Tuple[Tuple[int, int], ...]) -> "FactoredInteger":
        obj = object.__new__(cls)
        object.__setattr__(obj, "value", value)
        object.__setattr__(obj, "factors", factors)
        return obj

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def radical(self) -> int:
        return math.prod(self.primes)

    def phi(self) -> int:
        return math.prod((q - 1) * q ** (e - 1) for q, e in self.factors)

    def mobius(self) -> int:
        if any(e > 1 for _, e in self.factors):
            return 0
        return -1 if self.omega % 2 else 1


def factorize(n: int) -> FactoredInteger:
    """Factor 1 <= n < 2**63: trial division by primes below 10**6, then Pollard-Brent."""
    if n < 1:
        raise DomainError("factorize requires n >= 1")
    if n >= MAX_FACTOR_INPUT:
        raise DomainError("factorize only supports n < 2**63")
    original = n
    found: Dict[int, int] = {}
    for q in _trial_primes():
        if q * q > n:
            break
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            found[q] = e
    if n > 1:
        if n < TRIAL_DIVISION_LIMIT**2 or is_prime(n):
            found[n] = found.get(n, 0) + 1
        else:
            # seeded so repeated calls agree step for step
            _split_large(n, found, random.Random(n))
    return FactoredInteger._trusted(original, tuple(sorted(found.items())))


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    if modulus < 1:
        raise DomainError("modulus must be >= 1")
    if exponent < 0:
        raise DomainError("negative exponents are not supported")
    return pow(base, exponent, modulus)


def _check_prime_modulus(p: int) -> None:
    if p < 2 or p > MAX_PRIME:
        raise DomainError(f"prime modulus {p} outside [2, 2**62]")


def multiplicative_order(a: int, p: int, p_minus_1: Optional[FactoredInteger] = None) -> int:
    """Order of a in (Z/pZ)^*, found by stripping prime factors off p - 1."""
    _check_prime_modulus(p)
    a %= p
    if a == 0:
        raise DomainError(f"{a} is not invertible mod {p}")
    if p_minus_1 is None:
        p_minus_1 = factorize(p - 1)
    order = p - 1
    for q, e in p_minus_1.factors:
        for _ in range(e):
            if pow(a, order // q, p) == 1:
                order //= q
            else:
                break
    return order


def is_primitive_root(a: int, p: int, p_minus_1: Optional[FactoredInteger] = None) -> bool:
    _check_prime_modulus(p)
    a %= p
    if a == 0:
        return False
    if p == 2:
        return a == 1
    if p_minus_1 is None:
        p_minus_1 = factorize(p - 1)
    return all(pow(a, (p - 1) // q, p) != 1 for q in p_minus_1.primes)


def omega_up_to(n: FactoredInteger, t: float) -> int:
    """Number of distinct primes q | n with q < t."""
    if t <= 0:
        raise DomainError("t must be positive")
    return sum(1 for q in n.primes if q < t)


def is_y_rough(p_minus_1: FactoredInteger, y: float) -> bool:
    """True when every odd prime factor of p - 1 is at least y."""
    return all(q >= y for q in p_minus_1.primes if q != 2)


def euler_phi(n: int) -> int:
    return factorize(n).phi()


def mobius(n: int) -> int:
    return factorize(n).mobius()


def omega(n: int) -> int:
    return factorize(n).omega


def radical(n: int) -> int:
    return factorize(n).radical


@dataclass(frozen=True)
class PrimeRecord:
    p: int
    p_minus_1: FactoredInteger
    is_rough_at: Dict[float, bool]


def prime_record(p: int, thresholds: Iterable[float] = (), p_minus_1: Optional[FactoredInteger] = None) -> PrimeRecord:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    _check_prime_modulus(p)
    pm1 = p_minus_1 if p_minus_1 is not None else factorize(p - 1)
    return PrimeRecord(p, pm1, {y: is_y_rough(pm1, y) for y in thresholds})


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> Tuple[int, int]:
    """Combine x = r1 (mod m1), x = r2 (mod m2) for coprime moduli."""
    inv = pow(m1, -1, m2)
    x = r1 + m1 * ((r2 - r1) * inv % m2)
    return x % (m1 * m2), m1 * m2

