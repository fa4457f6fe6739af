"""Discrete logarithms, CRT and the Jacobsthal function.

Discrete logs use Pohlig-Hellman over the known factorization of p - 1,
with baby-step giant-step inside each prime-order subgroup. Small primes
get a full lookup table instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .arith import (
    FactoredInteger,
    crt_pair,
    factorize,
    is_prime,
    is_primitive_root,
)
from .errors import CapacityError, ContractError, DomainError

FULL_TABLE_LIMIT = 10**4
# largest subgroup order solved by a single BSGS table of size ceil(sqrt(q))
BSGS_TABLE_CAP = 1 << 22
JACOBSTHAL_SCAN_LIMIT = 10**9
_SCAN_CHUNK = 1 << 22


def least_primitive_root(p: int, p_minus_1: Optional[FactoredInteger] = None) -> int:
    """Smallest a >= 1 generating (Z/pZ)^*; 1 for p = 2, otherwise >= 2."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p == 2:
        return 1
    pm1 = p_minus_1 or factorize(p - 1)
    a = 2
    while not is_primitive_root(a, p, pm1):
        a += 1
    return a


class DlogContext:
    """Discrete-log machinery for one prime, relative to its least primitive root."""

    def __init__(self, p: int, p_minus_1: Optional[FactoredInteger] = None, generator: Optional[int] = None):
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
        self.p = p
        self.p_minus_1 = p_minus_1 or factorize(p - 1)
        if self.p_minus_1.value != p - 1:
            raise DomainError("p_minus_1 does not match p")
        g = generator if generator is not None else least_primitive_root(p, self.p_minus_1)
        if not is_primitive_root(g, p, self.p_minus_1):
            raise DomainError(f"{g} is not a primitive root mod {p}")
        self.generator = g
        self._full: Optional[List[int]] = None
        self._bsgs: Dict[int, Tuple[int, Dict[int, int], int]] = {}
        if p <= FULL_TABLE_LIMIT:
            self._full = self._full_table()

    def _full_table(self) -> List[int]:
        p, g = self.p, self.generator
        table = [0] * p
        x = 1
        for e in range(p - 1):
            table[x] = e
            x = x * g % p
        return table

    def full_table(self) -> List[int]:
        """log table indexed by residue (entry 0 unused); built on first call."""
        if self._full is None:
            self._full = self._full_table()
        return self._full

    def _subgroup(self, q: int) -> Tuple[int, Dict[int, int], int]:
        """(generator of the order-q subgroup, baby steps, giant stride) for prime q | p-1."""
        entry = self._bsgs.get(q)
        if entry is None:
            p = self.p
            gamma = pow(self.generator, (p - 1) // q, p)
            m = math.isqrt(q - 1) + 1
            if m > BSGS_TABLE_CAP:
                raise CapacityError(f"BSGS table for subgroup order {q} too large")
            baby: Dict[int, int] = {}
            x = 1
            for j in range(m):
                baby.setdefault(x, j)
                x = x * gamma % p
            giant = pow(gamma, q - m, p)  # gamma^(-m)
            entry = (gamma, baby, giant)
            self._bsgs[q] = entry
        return entry

    def _log_prime_order(self, h: int, q: int) -> int:
        """Solve gamma^x = h in the subgroup of order q."""
        gamma, baby, giant = self._subgroup(q)
        m = math.isqrt(q - 1) + 1
        y = h
        for i in range(m):
            j = baby.get(y)
            if j is not None:
                return (i * m + j) % q
            y = y * giant % self.p
        raise ContractError(f"{h} not in subgroup of order {q} mod {self.p}")

    def log_mod_prime(self, a: int, q: int) -> int:
        """discrete_log(a) mod q for a prime q | p - 1, without the full log."""
        p = self.p
        a %= p
        if a == 0:
            raise DomainError("0 has no discrete logarithm")
        if (p - 1) % q:
            raise DomainError(f"{q} does not divide {p - 1}")
        if self._full is not None:
            return self._full[a] % q
        return self._log_prime_order(pow(a, (p - 1) // q, p), q)

    def log(self, a: int) -> int:
        p = self.p
        a %= p
        if a == 0:
            raise DomainError("0 has no discrete logarithm")
        if self._full is not None:
            return self._full[a]
        g = self.generator
        residue, modulus = 0, 1
        for q, e in self.p_minus_1.factors:
            qe = q**e
            cof = (p - 1) // qe
            h = pow(a, cof, p)
            g_qe = pow(g, cof, p)
            g_inv = pow(g_qe, -1, p)
            x = 0
            for k in range(e):
                # strip the digits found so far, project to the order-q subgroup
                t = pow(h * pow(g_inv, x, p) % p, q ** (e - 1 - k), p)
                x += self._log_prime_order(t, q) * q**k
            residue, modulus = crt_pair(residue, modulus, x, qe)
        return residue


def discrete_log(a: int, ctx: DlogContext) -> int:
    """The unique e in [0, p-1) with generator^e = a (mod p)."""
    if not 1 <= a < ctx.p:
        raise DomainError(f"discrete_log needs 1 <= a < p, got {a}")
    return ctx.log(a)


@lru_cache(maxsize=4096)
def dlog_context(p: int) -> DlogContext:
    return DlogContext(p)


# ------------------------------------------------------------------ CRT / sets

@dataclass(frozen=True)
class ResidueConstraintSet:
    """One forbidden residue class per distinct prime modulus."""

    constraints: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        seen = set()
        norm = []
        for q, a in self.constraints:
            if q in seen:
                raise DomainError(f"duplicate modulus {q}")
            if q < 2:
                raise DomainError(f"modulus {q} is not prime")
            seen.add(q)
            norm.append((q, a % q))
        object.__setattr__(self, "constraints", tuple(norm))

    @classmethod
    def of(cls, pairs: Iterable[Tuple[int, int]]) -> "ResidueConstraintSet":
        return cls(tuple(pairs))

    @property
    def moduli(self) -> Tuple[int, ...]:
        return tuple(q for q, _ in self.constraints)

    @property
    def modulus_product(self) -> int:
        return math.prod(self.moduli)


def crt_combine(constraints: ResidueConstraintSet) -> Tuple[int, int]:
    """(b, P) with b = a_q (mod q) for every constraint and P the product of moduli."""
    b, m = 0, 1
    for q, a in constraints.constraints:
        if math.gcd(m, q) != 1:
            raise DomainError(f"modulus {q} not coprime to {m}")
        b, m = crt_pair(b, m, a, q)
    return b, m


# ------------------------------------------------------------------ Jacobsthal

def _max_gap_squarefree(primes: Tuple[int, ...], period: int) -> int:
    """Largest difference between consecutive integers coprime to the period, over [1, period + 1]."""
    best = 1
    last = 0  # 0 is never coprime for period > 1; 1 always is
    start = 1
    stop_all = period + 2
    while start < stop_all:
        stop = min(start + _SCAN_CHUNK, stop_all)
        ok = np.ones(stop - start, dtype=bool)
        for q in primes:
            first = (-start) % q
            ok[first::q] = False
        idx = np.flatnonzero(ok) + start
        if idx.size:
            if last:
                best = max(best, int(idx[0]) - last)
            if idx.size > 1:
                best = max(best, int(np.diff(idx).max()))
            last = int(idx[-1])
        start = stop
    return best


@lru_cache(maxsize=1 << 16)
def jacobsthal_of_primes(primes: Tuple[int, ...], scan_limit: int = JACOBSTHAL_SCAN_LIMIT) -> int:
    """j(n) for rad(n) = product of the given primes (sorted, distinct)."""
    if not primes:
        return 1
    if len(primes) == 1:
        return 2
    period = math.prod(primes)
    if period > scan_limit:
        raise CapacityError(f"radical {period} exceeds Jacobsthal scan limit {scan_limit}")
    return _max_gap_squarefree(primes, period)


def jacobsthal_exact(n: FactoredInteger | int, scan_limit: int = JACOBSTHAL_SCAN_LIMIT) -> int:
    """Least m such that every m consecutive integers include one coprime to n.

    Scans one full period of rad(n); the wrap-around gap is always 2 because
    both 1 and rad(n) - 1 are coprime to n.
    """
    if isinstance(n, int):
        n = factorize(n)
    return jacobsthal_of_primes(n.primes, scan_limit)


def jacobsthal_covering_bound(primes: Sequence[int]) -> Optional[int]:
    """Cheap certified upper bound on j: least L with sum(ceil(L/q)) < L.

    Any window of L integers has at most ceil(L/q) multiples of q, so some
    member escapes every prime once the counts fall short of L. Returns None
    when sum(1/q) >= 1, where no such L exists.
    """
    if not primes:
        return 1
    if sum(1.0 / q for q in primes) >= 1.0 - 1e-12:
        return None
    L = 2
    while sum(-(-L // q) for q in primes) >= L:
        L += 1
    return L


def jacobsthal_pigeonhole_bound(n: FactoredInteger | int) -> Optional[int]:
    """omega(n) + 1 when every prime factor of n exceeds omega(n), else None.

    With all q > omega(n) each prime hits at most one integer of any window
    of omega(n) + 1 consecutive integers, so one is left coprime. The bare
    omega(n) is not an upper bound: a single prime q has j(q) = 2.
    """
    if isinstance(n, int):
        n = factorize(n)
    w = n.omega
    if all(q > w for q in n.primes):
        return w + 1
    return None


def min_avoiding(constraints: ResidueConstraintSet, start: int = 0) -> int:
    """Smallest m >= start with m != a_q (mod q) for every constraint."""
    cons = constraints.constraints
    m = start
    # terminates within prod(q) steps by CRT
    while any(m % q == a for q, a in cons):
        m += 1
    return m


def min_avoiding_checked(constraints: ResidueConstraintSet) -> Tuple[int, Optional[int]]:
    """min_avoiding plus the Jacobsthal value of the moduli when it can be computed."""
    m = min_avoiding(constraints)
    try:
        j = jacobsthal_of_primes(tuple(sorted(constraints.moduli)))
    except CapacityError:
        return m, None
    if m > j - 1:
        raise ContractError(f"min_avoiding returned {m} > j - 1 = {j - 1}", {"constraints": constraints.constraints})
    return m, j
