"""Power residues, least non-residues, smooth-number counts and character sums.

Smoothness here is strict: n is y-smooth when every prime factor is < y.
Most of the literature uses <= y; the two differ exactly when y is prime.
"""

from __future__ import annotations

import cmath
import math
from typing import Dict, List

import numpy as np

from .arith import is_prime, prime_array
from .dickman import rho
from .errors import CapacityError, DomainError
from .structure import DlogContext

PSI_LIMIT = 10**8
CHAR_SUM_LIMIT = 10**6


def _check_divisor(p: int, d: int) -> None:
    if d < 1 or (p - 1) % d:
        raise DomainError(f"{d} does not divide p - 1 = {p - 1}")


def is_dth_power_residue(n: int, p: int, d: int) -> bool:
    """Euler's criterion generalised: n is a d-th power mod p iff n^((p-1)/d) = 1."""
    _check_divisor(p, d)
    if not 1 <= n < p:
        raise DomainError(f"need 1 <= n < p, got n = {n}")
    return pow(n, (p - 1) // d, p) == 1


def least_power_nonresidue(p: int, d: int) -> int:
    """Smallest n >= 2 that is not a d-th power residue mod p."""
    if d < 2:
        raise DomainError("every residue is a first power; need d >= 2")
    _check_divisor(p, d)
    e = (p - 1) // d
    n = 2
    while pow(n, e, p) == 1:
        n += 1
    return n


def count_dth_power_residues(p: int, d: int) -> int:
    """Exhaustive count of d-th power residues in [1, p-1] (for testing)."""
    _check_divisor(p, d)
    e = (p - 1) // d
    return sum(1 for n in range(1, p) if pow(n, e, p) == 1)


# ------------------------------------------------------------------ Psi(x, y)

def psi_count(x: float, y: float, limit: int = PSI_LIMIT) -> int:
    """Number of n <= x whose prime factors are all < y."""
    if x < 1:
        raise DomainError("psi_count needs x >= 1")
    if y < 2:
        raise DomainError("psi_count needs y >= 2")
    X = int(math.floor(x))
    if X > limit:
        raise CapacityError(f"x = {X} exceeds the counting limit {limit}")
    q_min = math.ceil(y)  # first prime that spoils smoothness is >= y
    primes = prime_array(X)
    big = primes[primes >= q_min]
    if big.size == 0:
        return X
    bad = np.zeros(X + 1, dtype=bool)
    # primes with many multiples: slice; the rest: vectorise over the cofactor
    cut = max(q_min, X // 256)
    for q in big[big <= cut].tolist():
        bad[q::q] = True
    large = big[big > cut]
    k = 1
    while large.size:
        bad[large * k] = True
        k += 1
        large = large[large * k <= X]
    return X - int(np.count_nonzero(bad[1:]))


def psi_count_bruteforce(x: float, y: float) -> int:
    """Trial-division reference for small x."""
    X = int(math.floor(x))
    total = 0
    for n in range(1, X + 1):
        m = n
        ok = True
        q = 2
        while q * q <= m:
            while m % q == 0:
                if q >= y:
                    ok = False
                m //= q
            q += 1
        if m > 1 and m >= y:
            ok = False
        total += ok
    return total


def check_psi_lower_bound(x: float, y: float) -> Dict[str, float]:
    """Compare Psi(x, y) with x rho(log x / log y)."""
    psi = psi_count(x, y)
    u = math.log(x) / math.log(y) if x > 1 else 0.0
    x_rho_u = x * rho(max(u, 0.0))
    return {
        "x": x,
        "y": y,
        "u": u,
        "psi": psi,
        "x_rho_u": x_rho_u,
        "margin": psi - x_rho_u,
        "ratio": psi / x_rho_u if x_rho_u > 0 else math.inf,
        "holds": psi >= x_rho_u,
    }


# ------------------------------------------------------------ character sums

def _residue_log_counts(p: int, d: int, H: int) -> List[int]:
    """counts[r] = #{1 <= n <= H : log n = r (mod d)}."""
    ctx = DlogContext(p)
    table = ctx.full_table()
    counts = [0] * d
    for n in range(1, H + 1):
        counts[table[n] % d] += 1
    return counts


def character_partial_sum_diagnostic(p: int, d: int, H: int) -> Dict[str, float]:
    """max over non-principal chi with chi^d = 1 of |sum_{n<=H} chi(n)| / H.

    chi_k(n) = exp(2 pi i k log(n) / d). Grouping n by log n mod d turns each
    sum into a d-term combination of exact integer counts, so the only
    rounding is in the final fsum.
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if d < 2:
        raise DomainError("need d >= 2 for a non-principal character")
    _check_divisor(p, d)
    if not 1 <= H < p:
        raise DomainError("need 1 <= H < p")
    if p > CHAR_SUM_LIMIT:
        raise CapacityError(f"p = {p} too large for a full discrete-log table")
    counts = _residue_log_counts(p, d, H)
    best = 0.0
    best_k = 1
    for k in range(1, d):
        re = math.fsum(c * math.cos(2 * math.pi * (k * r % d) / d) for r, c in enumerate(counts) if c)
        im = math.fsum(c * math.sin(2 * math.pi * (k * r % d) / d) for r, c in enumerate(counts) if c)
        mag = abs(complex(re, im))
        if mag > best:
            best, best_k = mag, k
    return {"p": p, "d": d, "H": H, "max_normalized_sum": best / H, "argmax_k": best_k}


def character_sum_direct(p: int, d: int, H: int, k: int) -> complex:
    """Plain per-element summation of chi_k(n), n <= H (reference path)."""
    ctx = DlogContext(p)
    return sum(cmath.exp(2j * math.pi * k * ctx.log(n) / d) for n in range(1, H + 1))
