"""Build a primitive root as a product of least prime-power non-residues.

For each prime q | p - 1 take g(q), the least q-th power non-residue. Primes
sharing the same g(q) form one level; with levels A_1, ..., A_s ordered by
strictly increasing g, every g(A_j) is a q-th power residue for all q in a
later level. Starting from z_s = g(A_s) the construction walks down the
levels, at each step picking the least m >= 1 such that g(A_t)^m * z_{t+1}
stays a non-residue for every prime seen so far. The exponent m is found by
avoiding one forbidden residue class per prime in A_t, which keeps it below
the Jacobsthal function of the product of A_t.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import groupby
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import FactoredInteger, factorize, is_prime, is_primitive_root
from .dickman import u_of
from .errors import CapacityError, ContractError, DomainError
from .residues import least_power_nonresidue
from .structure import (
    DlogContext,
    ResidueConstraintSet,
    jacobsthal_of_primes,
    least_primitive_root,
    min_avoiding,
)

log = logging.getLogger(__name__)

BURGESS_EXPONENT = 1.0 / (4.0 * math.sqrt(math.e))
DEFAULT_EPSILON = 0.01

__all__ = [
    "BURGESS_EXPONENT",
    "ConstructionTrace",
    "Grouping",
    "Level",
    "LiftResult",
    "ResidueProfile",
    "bound_exponent_main1",
    "bound_exponent_main3",
    "condition2_sum",
    "construct_simultaneous_nonresidue",
    "group_levels",
    "least_primitive_root",
    "lift_step",
    "loglog",
    "residue_profile",
    "verify_remark2",
]


def loglog(x: float, raw: bool = False) -> float:
    """log log x, floored at 1 unless raw is set."""
    v = math.log(math.log(x))
    return v if raw else max(1.0, v)


# ------------------------------------------------------------------ profiles

@dataclass(frozen=True)
class ResidueProfile:
    """(q, g(q)) for each prime q | p - 1, sorted by g(q) then q."""

    p: int
    entries: Tuple[Tuple[int, int], ...]
    p_minus_1: FactoredInteger = field(repr=False, compare=False, default=None)


def residue_profile(p: int, p_minus_1: Optional[FactoredInteger] = None) -> ResidueProfile:
    if p == 2:
        raise DomainError("the multiplicative group mod 2 is trivial")
    if p < 2 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")
    pm1 = p_minus_1 or factorize(p - 1)
    entries = sorted(((q, least_power_nonresidue(p, q)) for q in pm1.primes), key=lambda e: (e[1], e[0]))
    return ResidueProfile(p, tuple(entries), pm1)


@dataclass(frozen=True)
class Level:
    primes: Tuple[int, ...]
    g: int

    @property
    def product(self) -> int:
        return math.prod(self.primes)


@dataclass(frozen=True)
class Grouping:
    """Levels A_1..A_s with strictly increasing g, and divisors d_i = prod of A_i..A_s."""

    p: int
    levels: Tuple[Level, ...]
    divisors: Tuple[int, ...]

    @property
    def g_values(self) -> Tuple[int, ...]:
        return tuple(lv.g for lv in self.levels)

    @property
    def s(self) -> int:
        return len(self.levels)


def group_levels(profile: ResidueProfile) -> Grouping:
    levels = tuple(
        Level(tuple(sorted(q for q, _ in grp)), g)
        for g, grp in groupby(profile.entries, key=lambda e: e[1])
    )
    divisors = []
    d = math.prod(q for q, _ in profile.entries)
    for lv in levels:
        divisors.append(d)
        d //= lv.product
    return Grouping(profile.p, levels, tuple(divisors))


def verify_remark2(grouping: Grouping, ctx: Optional[DlogContext] = None) -> bool:
    """Each g(A_j) has discrete log = 0 mod q for every q in a later level."""
    ctx = ctx or DlogContext(grouping.p)
    levels = grouping.levels
    for j, lower in enumerate(levels):
        for upper in levels[j + 1:]:
            for q in upper.primes:
                if ctx.log_mod_prime(lower.g, q) != 0:
                    return False
    return True


# --------------------------------------------------------------- lifting step

def _nonresidue(a: int, p: int, q: int) -> bool:
    return pow(a, (p - 1) // q, p) != 1


@dataclass(frozen=True)
class LiftResult:
    m: int
    product: int
    forbidden: Tuple[Tuple[int, int], ...]
    jacobsthal: Optional[int]
    used_zero: bool = False


def lift_step(
    y: int,
    z: int,
    A: Sequence[int],
    B: Sequence[int],
    ctx: DlogContext,
) -> LiftResult:
    """Least admissible m with y^m * z a q-th power non-residue for all q in A and B.

    Requires y non-residue for A, y residue for B, z non-residue for B.
    The forbidden class for q in A solves m log y + log z = 0 (mod q).
    m is searched from 1 up to j(P(A)) - 1; if that window is exhausted,
    m = 0 is the remaining admissible value by the Jacobsthal argument.
    """
    p = ctx.p
    if not A:
        raise DomainError("lift_step needs a non-empty level A")
    for q in A:
        if not _nonresidue(y, p, q):
            raise ContractError(f"y = {y} is a {q}-th power residue mod {p}", {"q": q})
    for q in B:
        if _nonresidue(y, p, q):
            raise ContractError(f"y = {y} is not a {q}-th power residue mod {p}", {"q": q})
        if not _nonresidue(z, p, q):
            raise ContractError(f"z = {z} is a {q}-th power residue mod {p}", {"q": q})

    forbidden = []
    for q in A:
        ly = ctx.log_mod_prime(y, q)
        lz = ctx.log_mod_prime(z, q)
        forbidden.append((q, (-lz * pow(ly, -1, q)) % q))
    cons = ResidueConstraintSet(tuple(forbidden))
    try:
        j = jacobsthal_of_primes(tuple(sorted(A)))
    except CapacityError:
        j = None

    m = min_avoiding(cons, start=1)
    used_zero = False
    if j is not None and m > j - 1:
        if all(a != 0 for _, a in cons.constraints):
            log.info("p=%d: no m in [1, %d] admissible for level %s, taking m = 0", p, j - 1, tuple(A))
            m, used_zero = 0, True
        else:
            raise ContractError(
                f"no admissible m in [0, {j - 1}] for level {tuple(A)} mod {p}",
                {"forbidden": forbidden, "j": j},
            )

    product = pow(y, m, p) * z % p
    for q in list(A) + list(B):
        if not _nonresidue(product, p, q):
            raise ContractError(
                f"y^m z = {product} is a {q}-th power residue mod {p}",
                {"q": q, "m": m, "y": y, "z": z},
            )
    return LiftResult(m, product, cons.constraints, j, used_zero)


# ---------------------------------------------------------------- the recipe

@dataclass
class ConstructionTrace:
    p: int
    grouping: Grouping
    exponents: Tuple[int, ...]
    partial_products: Tuple[int, ...]  # z_1, ..., z_s
    result: int
    log_product: float  # log of the unreduced integer prod g(A_i)^m_i
    lifts: Tuple[Optional[LiftResult], ...]
    bound_exponents: Dict[str, float]
    least_primitive_root: Optional[int] = None
    flags: List[str] = field(default_factory=list)

    @property
    def realized_exponent(self) -> float:
        return self.log_product / math.log(self.p)

    @property
    def integer_product(self) -> int:
        return math.prod(g**m for g, m in zip(self.grouping.g_values, self.exponents))

    def to_dict(self) -> dict:
        g = self.grouping
        return {
            "p": self.p,
            "result": self.result,
            "least_primitive_root": self.least_primitive_root,
            "s": g.s,
            "levels": [
                {
                    "primes": list(lv.primes),
                    "g": lv.g,
                    "divisor": d,
                    "m": m,
                    "partial_product": z,
                    "jacobsthal": None if lift is None else lift.jacobsthal,
                    "forbidden": None if lift is None else [list(f) for f in lift.forbidden],
                }
                for lv, d, m, z, lift in zip(g.levels, g.divisors, self.exponents, self.partial_products, self.lifts)
            ],
            "log_product": self.log_product,
            "realized_exponent": self.realized_exponent,
            "bound_exponents": dict(self.bound_exponents),
            "flags": list(self.flags),
        }


def _check_level_values(p: int, grouping: Grouping) -> None:
    """g(A_i) must be the least simultaneous non-residue for A_i and equal g(d_i)."""
    for lv, d in zip(grouping.levels, grouping.divisors):
        n = 2
        while not all(_nonresidue(n, p, q) for q in lv.primes):
            n += 1
        if n != lv.g:
            raise ContractError(f"least simultaneous non-residue for {lv.primes} is {n}, not {lv.g}")
        if least_power_nonresidue(p, d) != lv.g:
            raise ContractError(f"g(d) for d = {d} differs from g(A) = {lv.g}")


def construct_simultaneous_nonresidue(
    p: int,
    epsilon: float = DEFAULT_EPSILON,
    ctx: Optional[DlogContext] = None,
    p_minus_1: Optional[FactoredInteger] = None,
    with_least_root: bool = True,
) -> ConstructionTrace:
    """Run the level-by-level construction for an odd prime p and return the full trace."""
    profile = residue_profile(p, p_minus_1)
    pm1 = profile.p_minus_1
    grouping = group_levels(profile)
    ctx = ctx or DlogContext(p, pm1)
    flags: List[str] = []

    _check_level_values(p, grouping)
    if not verify_remark2(grouping, ctx):
        raise ContractError(f"level residue structure violated mod {p}", {"grouping": grouping})

    levels = grouping.levels
    s = len(levels)
    exps = [0] * s
    zs = [0] * s
    lifts: List[Optional[LiftResult]] = [None] * s
    exps[-1] = 1
    zs[-1] = levels[-1].g
    later: List[int] = list(levels[-1].primes)
    for t in range(s - 2, -1, -1):
        lift = lift_step(levels[t].g, zs[t + 1], levels[t].primes, later, ctx)
        if lift.used_zero:
            flags.append(f"m_zero_level_{t + 1}")
        exps[t], zs[t], lifts[t] = lift.m, lift.product, lift
        later.extend(levels[t].primes)

    result = zs[0]
    if not is_primitive_root(result, p, pm1):
        raise ContractError(f"constructed {result} is not a primitive root mod {p}")
    log_product = math.fsum(m * math.log(lv.g) for lv, m in zip(levels, exps))

    bounds: Dict[str, float] = {}
    main1, surrogate = _main1(grouping, epsilon, shift=0)
    bounds["main1"] = main1
    bounds["main1_j_minus_1"] = _main1(grouping, epsilon, shift=1)[0]
    if surrogate:
        flags.append("main1_jacobsthal_surrogate")
    bounds["main3"] = _main3(pm1.primes, epsilon)
    bounds["epsilon"] = epsilon

    lpr = least_primitive_root(p, pm1) if with_least_root else None
    return ConstructionTrace(
        p=p,
        grouping=grouping,
        exponents=tuple(exps),
        partial_products=tuple(zs),
        result=result,
        log_product=log_product,
        lifts=tuple(lifts),
        bound_exponents=bounds,
        least_primitive_root=lpr,
        flags=flags,
    )


# ----------------------------------------------------------- bound exponents

def _main1(grouping: Grouping, epsilon: float, shift: int = 0) -> Tuple[float, bool]:
    surrogate = False
    terms = []
    for lv, d in zip(grouping.levels[:-1], grouping.divisors[:-1]):
        try:
            j = jacobsthal_of_primes(lv.primes)
        except CapacityError:
            j = 10 * len(lv.primes)
            surrogate = True
        terms.append((j - shift) / u_of(d))
    return BURGESS_EXPONENT + math.fsum(terms) + epsilon, surrogate


def _main3(primes: Sequence[int], epsilon: float) -> float:
    qs = sorted(primes)
    terms = []
    b = qs[0] if qs else 1
    for q in qs[1:]:
        b *= q
        terms.append(10.0 / u_of(b))
    return BURGESS_EXPONENT + math.fsum(terms) + epsilon


def bound_exponent_main1(p: int, epsilon: float = DEFAULT_EPSILON, grouping: Optional[Grouping] = None, j_minus_1: bool = False) -> float:
    """1/(4 sqrt e) + sum_{i<s} j(P(A_i)) / u(d_i) + epsilon.

    With j_minus_1 the Jacobsthal values are lowered by one, matching the
    m_i <= j - 1 range that the lifting step actually guarantees.
    """
    grouping = grouping or group_levels(residue_profile(p))
    return _main1(grouping, epsilon, 1 if j_minus_1 else 0)[0]


def bound_exponent_main3(p: int, epsilon: float = DEFAULT_EPSILON, p_minus_1: Optional[FactoredInteger] = None) -> float:
    """1/(4 sqrt e) + sum_{j=2}^r 10 / u(q_1 ... q_j) + epsilon over primes q_1 < ... < q_r of p - 1."""
    pm1 = p_minus_1 or factorize(p - 1)
    return _main3(pm1.primes, epsilon)


def condition2_sum(p: int, p_minus_1: Optional[FactoredInteger] = None, raw: bool = False) -> float:
    """sum over odd primes q | p - 1 of loglog(q) / log(q), loglog floored at 1 unless raw."""
    pm1 = p_minus_1 or factorize(p - 1)
    return math.fsum(loglog(q, raw) / math.log(q) for q in pm1.primes if q != 2)
