"""The Dickman-de Bruijn function rho(u) and its inverse u(d).

rho is built one unit interval at a time. Marching the delay equation
directly, rho(u) = rho(k) - int_k^u rho(t-1)/t dt, loses all relative
accuracy after a few intervals: rounding errors decay like 1/u while rho
decays like u^-u. Instead each piece solves the equivalent positive identity

    u rho(u) = int_{u-1}^{k} rho(t) dt + int_k^u rho(t) dt,   k <= u <= k + 1,

by Chebyshev collocation. Every term is a positive integral, so errors stay
relative to rho itself and the table remains positive out to large u.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import DomainError

DEFAULT_U_MAX = 50.0
DEFAULT_STEP = 1e-3
CHEB_DEGREE = 31


class RangeError(DomainError):
    """u lies beyond the tabulated range; extend the table first."""


GAUSS_POINTS = 24


def _cheb_nodes(n: int) -> np.ndarray:
    return np.cos(np.pi * (np.arange(n) + 0.5) / n)


@lru_cache(maxsize=8)
def _operators(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(nodes, values->coefficients, values->indefinite integral at nodes) on [-1, 1]."""
    x = _cheb_nodes(n)
    theta = np.pi * (np.arange(n) + 0.5) / n
    to_coef = (2.0 / n) * np.cos(np.outer(np.arange(n), theta))
    to_coef[0] *= 0.5
    integ = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        integ[:, i] = C.chebval(x, C.chebint(e, lbnd=-1.0))
    return x, to_coef, integ @ to_coef


@dataclass
class DickmanTable:
    """rho on [0, u_max]: one Chebyshev series per unit interval plus a dense grid.

    pieces[k] holds the coefficients of rho on [k, k + 1] in the variable
    x = 2(u - k) - 1; values holds rho sampled at 0, step, 2 step, ..., u_max.
    """

    u_max: float = DEFAULT_U_MAX
    step: float = DEFAULT_STEP
    degree: int = CHEB_DEGREE
    pieces: List[np.ndarray] = field(default_factory=list, repr=False)
    values: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.u_max < 1:
            raise DomainError("u_max must be at least 1")
        inv = round(1.0 / self.step)
        if inv < 1 or abs(inv * self.step - 1.0) > 1e-12:
            raise DomainError("step must be the reciprocal of a positive integer")
        if not self.pieces:
            self._build(math.ceil(self.u_max))
        if self.values is None:
            self.values = self._grid()

    def _build(self, k_max: int) -> None:
        pieces = self.pieces
        if not pieces:
            pieces.append(np.array([1.0]))
        n = self.degree + 1
        x, to_coef, integ = _operators(n)
        gx, gw = np.polynomial.legendre.leggauss(GAUSS_POINTS)
        for k in range(len(pieces), k_max + 1):
            u = k + 0.5 * (x + 1.0)
            # tail[j] = int_{u_j - 1}^{k} rho(t) dt over the previous piece
            a = u - 1.0
            half = 0.5 * (k - a)
            t = a[:, None] + half[:, None] * (gx[None, :] + 1.0)
            vals = C.chebval(2.0 * (t - (k - 1)) - 1.0, pieces[k - 1])
            tail = half * (vals @ gw)
            # u_j v_j - int_k^{u_j} v = tail_j ; the integral carries a factor 1/2 from dx = 2 du
            system = np.diag(u) - 0.5 * integ
            v = np.linalg.solve(system, tail)
            pieces.append(to_coef @ v)

    def _grid(self) -> np.ndarray:
        inv = round(1.0 / self.step)
        n = int(math.floor(self.u_max * inv + 1e-9))
        us = np.arange(n + 1) / inv
        return self._eval_array(us)

    def _eval_array(self, us: np.ndarray) -> np.ndarray:
        out = np.ones_like(us, dtype=float)
        k = np.clip(np.floor(us).astype(int), 0, len(self.pieces) - 1)
        for kk in np.unique(k):
            if kk == 0:
                continue
            sel = k == kk
            out[sel] = C.chebval(2.0 * (us[sel] - kk) - 1.0, self.pieces[kk])
        out[us <= 1.0] = 1.0
        return out

    @property
    def grid(self) -> np.ndarray:
        inv = round(1.0 / self.step)
        return np.arange(len(self.values)) / inv

    def extend(self, u_max: float) -> None:
        if u_max <= self.u_max:
            return
        self._build(math.ceil(u_max))
        self.u_max = u_max
        self.values = self._grid()

    def rho(self, u: float) -> float:
        if u < 0:
            raise DomainError(f"rho undefined for u = {u} < 0")
        if u > self.u_max:
            raise RangeError(f"u = {u} beyond table range {self.u_max}")
        if u <= 1.0:
            return 1.0
        k = min(int(math.floor(u)), len(self.pieces) - 1)
        return float(C.chebval(2.0 * (u - k) - 1.0, self.pieces[k]))

    def rho_prime(self, u: float) -> float:
        """Derivative from the delay equation: rho'(u) = -rho(u - 1) / u."""
        if u <= 1.0:
            return 0.0
        return -self.rho(u - 1.0) / u


_lock = threading.Lock()
_default: DickmanTable | None = None


def default_table() -> DickmanTable:
    global _default
    with _lock:
        if _default is None:
            _default = DickmanTable()
        return _default


def rho(u: float, table: DickmanTable | None = None) -> float:
    """rho(u) for 0 <= u <= u_max; exactly 1 on [0, 1]."""
    return (table or default_table()).rho(u)


def u_of(d: float, table: DickmanTable | None = None, tol: float = 1e-13) -> float:
    """The unique u >= 1 with rho(u) = 1/d, by bisection.

    d = 1 returns 1, the right end of the interval where rho is 1.
    The table is doubled in range until it brackets the root.
    """
    if not d >= 1:
        raise DomainError(f"u(d) needs d >= 1, got {d}")
    if d == 1:
        return 1.0
    if table is None:
        return _u_of_cached(float(d))
    return _bisect(d, table, tol)


@lru_cache(maxsize=1 << 16)
def _u_of_cached(d: float) -> float:
    return _bisect(d, default_table(), 1e-13)


def _bisect(d: float, table: DickmanTable, tol: float) -> float:
    target = 1.0 / d
    while table.rho(table.u_max) > target:
        with _lock:
            table.extend(2 * table.u_max)
    lo, hi = 1.0, table.u_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if table.rho(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def u_asymptotic_reciprocal(n: float) -> Tuple[float, float]:
    """Leading term (loglog n - 1)/log n for 1/u(n), with its error scale.

    The error scale is logloglog n / (loglog n * log n); callers use it as
    the width of an uncertainty band around the leading term.
    """
    if n < 20:
        raise DomainError("asymptotic expansion needs n >= 20")
    L = math.log(n)
    LL = math.log(L)
    return (LL - 1.0) / L, math.log(LL) / (LL * L)


def rho_debruijn(u: float) -> float:
    """exp(-u log u - u loglog u + u), the main term of de Bruijn's expansion."""
    if u < 3:
        raise DomainError("de Bruijn main term is only used for u >= 3")
    lu = math.log(u)
    return math.exp(-u * lu - u * math.log(lu) + u)


def write_table_csv(path: str, u_max: float, step: float) -> int:
    """Write rows `u,rho` on the grid 0, step, ..., u_max; returns the row count."""
    table = DickmanTable(u_max=u_max, step=step)
    us = table.grid
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("u,rho\n")
        for u, r in zip(us, table.values):
            fh.write(f"{u:.12g},{r:.12g}\n")
    return len(us)
