"""Prime sweeps: roughness, the two exceptional-set conditions, omega(p - 1, t)
statistics and the distribution of least and constructed primitive roots.

Two kinds of routine live here. The vectorised statistics (omega_statistics,
rough_density, ...) work on a numpy array of all primes up to x and return
small dicts. run_survey walks the odd primes one at a time, streams a JSON
record per prime and keeps integer-only aggregates, so shards can be merged
in any order with bit-identical results.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .arith import FactoredInteger, SmallestFactorTable, factorize, iter_prime_segments, prime_array
from .constructor import BURGESS_EXPONENT, construct_simultaneous_nonresidue, loglog
from .errors import CapacityError, ContractError, DomainError
from .jsonfmt import dumps, round_floats
from .structure import DlogContext, jacobsthal_covering_bound, jacobsthal_of_primes, least_primitive_root

log = logging.getLogger(__name__)

SURVEY_X_CAP = 10**8
OMEGA_SUBSET_CAP = 20
TOTIENT_RATIO_BOUND = 5
CONDITION1_CONSTANT = 10
HIST_WIDTH = Fraction(1, 20)
HIST_BINS_GP = 20  # [0, 1)
HIST_BINS_REALIZED = 40  # [0, 2), last bin also takes overflow
SMOKE_MARGIN = 0.05


# ---------------------------------------------------------------- per prime

def condition1_check(p: int, p_minus_1: Optional[FactoredInteger] = None) -> Optional[bool]:
    """j(d) <= 10 omega(d) for every squarefree d | p - 1.

    Returns None when some subset could not be decided (Jacobsthal scan out
    of reach) and no other subset failed. Cheap certificates come first: with
    every q > |S| the pigeonhole bound gives j <= |S| + 1, and the covering
    bound handles most of the rest without a scan.
    """
    pm1 = p_minus_1 or factorize(p - 1)
    primes = pm1.primes
    if len(primes) > OMEGA_SUBSET_CAP:
        log.warning("p=%d: omega(p-1) = %d exceeds subset cap", p, len(primes))
        return None
    unknown = False
    for k in range(1, len(primes) + 1):
        cap = CONDITION1_CONSTANT * k
        for S in combinations(primes, k):
            if k == 1 or S[0] > k:
                continue  # j <= k + 1 <= 10k
            cover = jacobsthal_covering_bound(S)
            if cover is not None and cover <= cap:
                continue
            try:
                if jacobsthal_of_primes(S) > cap:
                    return False
            except CapacityError:
                unknown = True
    return None if unknown else True


def totient_ratio(p_minus_1: FactoredInteger) -> Fraction:
    """max over squarefree d | p - 1 of d / phi(d), which is attained at rad(p - 1)."""
    r = Fraction(1)
    for q in p_minus_1.primes:
        r *= Fraction(q, q - 1)
    return r


def totient_ratio_check(p: int, y: float = 3, p_minus_1: Optional[FactoredInteger] = None) -> dict:
    pm1 = p_minus_1 or factorize(p - 1)
    r = totient_ratio(pm1)
    return {
        "p": p,
        "rough": all(q >= y for q in pm1.primes if q != 2),
        "max_ratio": float(r),
        "holds": r <= TOTIENT_RATIO_BOUND,
    }


# ------------------------------------------------------------- vectorised

def _primes_upto(x: float) -> np.ndarray:
    X = int(math.floor(x))
    return prime_array(X) if X >= 2 else np.zeros(0, dtype=np.int64)


def _omega_below(n_max: int, t: float, primes: Optional[np.ndarray] = None) -> np.ndarray:
    """arr[n] = omega(n - 1, t) = #{q < t prime : q | n - 1} for 0 <= n <= n_max."""
    arr = np.zeros(n_max + 1, dtype=np.int16)
    if primes is None:
        primes = prime_array(min(n_max, max(2, math.ceil(t))))
    for q in primes[primes < t].tolist():
        arr[1::q] += 1
    return arr


def omega_statistics(x: float, t: float, xi_grid: Sequence[float] = (1.0, 2.0, 3.0), raw: bool = False) -> dict:
    """Mean, variance and tail frequencies of omega(p - 1, t) over primes p <= x."""
    if t <= 2:
        raise DomainError("t must exceed 2")
    P = _primes_upto(x)
    n = int(P.size)
    LL = loglog(t, raw)
    out = {
        "x": x,
        "t": t,
        "n": n,
        "loglog_t": LL,
        "t_in_lemma_range": x > 1 and t <= x**0.24,
    }
    if n == 0:
        out.update(mean=0.0, variance=0.0, variance_ratio=0.0, tail={str(xi): 0.0 for xi in xi_grid}, sum=0, sum_sq=0)
        return out
    w = _omega_below(int(P[-1]), t)[P].astype(np.int64)
    s1 = int(w.sum())
    s2 = int((w * w).sum())
    mean = Fraction(s1, n)
    var = Fraction(s2 * n - s1 * s1, n * n)
    tails = {}
    dev = np.abs(w - LL)
    for xi in xi_grid:
        tails[str(xi)] = int(np.count_nonzero(dev >= xi * math.sqrt(LL))) / n
    out.update(
        mean=float(mean),
        variance=float(var),
        variance_ratio=float(var) / LL,
        tail=tails,
        sum=s1,
        sum_sq=s2,
    )
    return out


def sup_omega_check(x: float, a: float, raw: bool = False) -> dict:
    """Fraction of p <= x with omega(p - 1, t_j) > (loglog t_j)^2 at some checkpoint t_j in (a, p - 1).

    The checkpoints are t_j = exp(exp(j)), so loglog t_j = j exactly.
    """
    if a < 16:
        raise DomainError("need a >= 16 so that loglog a >= 1")
    P = _primes_upto(x)
    n = int(P.size)
    scale = loglog(a, raw) ** -2
    bad = np.zeros(n, dtype=bool)
    j = 1
    checkpoints = []
    while True:
        tj = math.exp(math.exp(j))
        if n == 0 or tj >= P[-1] - 1:
            break
        if tj > a:
            checkpoints.append(tj)
            w = _omega_below(int(P[-1]), tj)[P]
            bad |= (P - 1 > tj) & (w > j * j)
        j += 1
    count = int(np.count_nonzero(bad))
    return {
        "x": x,
        "a": a,
        "n": n,
        "checkpoints": checkpoints,
        "violations": count,
        "fraction": count / n if n else 0.0,
        "scale": scale,
    }


def _rough_mask(P: np.ndarray, y: float, inclusive: bool) -> np.ndarray:
    mask = np.ones(P.size, dtype=bool)
    for q in prime_array(int(math.floor(y))).tolist():
        if q == 2 or (q >= y and not inclusive):
            continue
        mask &= (P - 1) % q != 0
    return mask


def mertens_prediction(y: float, inclusive: bool = False) -> float:
    """prod over odd primes q < y (q <= y when inclusive) of 1 - 1/(q - 1)."""
    r = 1.0
    for q in prime_array(int(math.floor(y))).tolist():
        if q == 2 or (q >= y and not inclusive):
            continue
        r *= 1.0 - 1.0 / (q - 1)
    return r


def rough_density(x: float, y: float) -> dict:
    """Empirical density of y-rough primes p <= x against the Mertens-type product.

    The main figures use the roughness definition (odd q < y excluded). The
    `inclusive` entry repeats the comparison with q <= y; the two differ only
    when y is prime.
    """
    P = _primes_upto(x)
    n = int(P.size)

    def one(inclusive: bool) -> dict:
        k = int(np.count_nonzero(_rough_mask(P, y, inclusive))) if n else 0
        pred = mertens_prediction(y, inclusive)
        emp = k / n if n else 0.0
        return {"rough": k, "primes": n, "empirical": emp, "mertens_prediction": pred, "ratio": emp / pred}

    out = {"x": x, "y": y}
    out.update(one(False))
    out["inclusive"] = one(True)
    return out


def totient_ratio_survey(x: float, y: float) -> dict:
    """Fraction of y-rough primes p <= x with prod_{q | p-1} q/(q-1) <= 5."""
    P = _primes_upto(x)
    if P.size == 0:
        return {"x": x, "y": y, "rough": 0, "holds": 0, "fraction": 0.0, "max_ratio": 0.0}
    N = int(P[-1])
    logr = np.zeros(N + 1)
    for q in prime_array(N).tolist():
        logr[1::q] += math.log(q / (q - 1))
    mask = _rough_mask(P, y, False)
    vals = logr[P[mask]]
    holds = vals <= math.log(TOTIENT_RATIO_BOUND) - 1e-12
    border = np.flatnonzero(np.abs(vals - math.log(TOTIENT_RATIO_BOUND)) <= 1e-12)
    for i in border.tolist():  # settle ties exactly
        p = int(P[mask][i])
        holds[i] = totient_ratio(factorize(p - 1)) <= TOTIENT_RATIO_BOUND
    k = int(mask.sum())
    h = int(holds.sum())
    return {
        "x": x,
        "y": y,
        "rough": k,
        "holds": h,
        "fraction": h / k if k else 0.0,
        "max_ratio": float(np.exp(vals.max())) if k else 0.0,
    }


def lemma_technical_check(x: float, y: float, eps2: float = 0.3, raw: bool = False) -> dict:
    """Mean over p <= x of sum_{q | p-1, q > y, q odd} loglog q / log q, and the share above eps2."""
    P = _primes_upto(x)
    n = int(P.size)
    if n == 0:
        return {"x": x, "y": y, "eps2": eps2, "n": 0, "mean": 0.0, "exceed_fraction": 0.0}
    N = int(P[-1])
    acc = np.zeros(N + 1)
    for q in prime_array(N).tolist():
        if q > y and q != 2:
            acc[1::q] += loglog(q, raw) / math.log(q)
    vals = acc[P]
    return {
        "x": x,
        "y": y,
        "eps2": eps2,
        "n": n,
        "mean": math.fsum(vals.tolist()) / n,
        "exceed_fraction": int(np.count_nonzero(vals > eps2)) / n,
    }


# ------------------------------------------------------------------- sweep

@dataclass(frozen=True)
class SurveyConfig:
    x_limit: int
    y: float = 3.0
    epsilon: float = 0.01
    delta: float = 0.1
    t_list: Tuple[float, ...] = (100.0, 1000.0)
    out_dir: Optional[str] = None
    shards: int = 1
    threads: int = 1
    raw_loglog: bool = False
    resume: bool = False
    time_budget: Optional[float] = None  # seconds per shard
    keep_records: bool = False

    def __post_init__(self):
        if self.y < 3:
            raise DomainError("roughness threshold y must be at least 3")
        if not 0 < self.epsilon < 1:
            raise DomainError("epsilon must lie in (0, 1)")
        if not 0 < self.delta < 1:
            raise DomainError("delta must lie in (0, 1)")
        if self.x_limit > SURVEY_X_CAP:
            raise CapacityError(f"x = {self.x_limit} beyond the desk cap {SURVEY_X_CAP}")
        if self.shards < 1 or self.threads < 1:
            raise DomainError("shards and threads must be positive")
        if any(t <= 2 for t in self.t_list):
            raise DomainError("every t must exceed 2")
        object.__setattr__(self, "t_list", tuple(float(t) for t in self.t_list))

    def fingerprint(self) -> dict:
        return {
            "x_limit": self.x_limit,
            "y": self.y,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "t_list": list(self.t_list),
            "shards": self.shards,
            "raw_loglog": self.raw_loglog,
        }


@dataclass
class PrimeSurveyRecord:
    p: int
    factors: List[List[int]]
    rough: bool
    g_p: int
    constructed: int
    log_product: float
    realized_exponent: float
    m_zero: bool
    cond1: Optional[bool]
    cond2_sum: float
    cond2: bool
    main1_exp: float
    main1_jm1_exp: float
    main3_exp: float
    omega_counts: Dict[str, int]
    totient_ratio_max: float
    totient_holds: bool
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return round_floats(asdict(self))


def survey_prime(p: int, cfg: SurveyConfig, pm1: Optional[FactoredInteger] = None) -> PrimeSurveyRecord:
    pm1 = pm1 or factorize(p - 1)
    rough = all(q >= cfg.y for q in pm1.primes if q != 2)
    c2 = math.fsum(loglog(q, cfg.raw_loglog) / math.log(q) for q in pm1.primes if q != 2)
    omega_counts = {f"{t:g}": sum(1 for q in pm1.primes if q < t) for t in cfg.t_list}
    tr = totient_ratio(pm1)
    error = None
    try:
        trace = construct_simultaneous_nonresidue(p, cfg.epsilon, DlogContext(p, pm1), pm1)
        constructed, g_p = trace.result, trace.least_primitive_root
        lp, rexp = trace.log_product, trace.realized_exponent
        b = trace.bound_exponents
        main1, main1j, main3 = b["main1"], b["main1_j_minus_1"], b["main3"]
        m_zero = any(f.startswith("m_zero") for f in trace.flags)
    except ContractError as exc:
        error = str(exc)
        log.error("p=%d: %s", p, exc)
        g_p = least_primitive_root(p, pm1)
        constructed, lp, rexp, main1, main1j, main3, m_zero = 0, 0.0, 0.0, 0.0, 0.0, 0.0, False
    return PrimeSurveyRecord(
        p=p,
        factors=[[q, e] for q, e in pm1.factors],
        rough=rough,
        g_p=g_p,
        constructed=constructed,
        log_product=lp,
        realized_exponent=rexp,
        m_zero=m_zero,
        cond1=condition1_check(p, pm1),
        cond2_sum=c2,
        cond2=c2 <= cfg.epsilon / 20,
        main1_exp=main1,
        main1_jm1_exp=main1j,
        main3_exp=main3,
        omega_counts=omega_counts,
        totient_ratio_max=float(tr),
        totient_holds=tr <= TOTIENT_RATIO_BOUND,
        error=error,
    )


_COUNT_KEYS = (
    "primes",
    "rough",
    "constructed_ok",
    "contract_errors",
    "tight",
    "m_zero",
    "rough_cond1_pass",
    "rough_cond1_unknown",
    "rough_cond2_pass",
    "rough_both",
    "rough_totient_holds",
    "main1_checked",
    "main1_violations",
    "main3_below_main1",
    "gp_within_reference",
    "gp_within_smoke",
)


@dataclass
class Aggregates:
    """Integer-only sufficient statistics; merge is plain addition."""

    counts: Dict[str, int] = field(default_factory=lambda: dict.fromkeys(_COUNT_KEYS, 0))
    omega_sum: Dict[str, int] = field(default_factory=dict)
    omega_sum_sq: Dict[str, int] = field(default_factory=dict)
    hist_gp: List[int] = field(default_factory=lambda: [0] * HIST_BINS_GP)
    hist_realized: List[int] = field(default_factory=lambda: [0] * HIST_BINS_REALIZED)

    def merge(self, other: "Aggregates") -> "Aggregates":
        out = Aggregates()
        for k in _COUNT_KEYS:
            out.counts[k] = self.counts[k] + other.counts[k]
        for name in ("omega_sum", "omega_sum_sq"):
            a, b = getattr(self, name), getattr(other, name)
            setattr(out, name, {t: a.get(t, 0) + b.get(t, 0) for t in sorted(set(a) | set(b), key=float)})
        out.hist_gp = [a + b for a, b in zip(self.hist_gp, other.hist_gp)]
        out.hist_realized = [a + b for a, b in zip(self.hist_realized, other.hist_realized)]
        return out

    def add(self, rec: dict, epsilon: float) -> None:
        c = self.counts
        p = rec["p"]
        c["primes"] += 1
        ok = rec["error"] is None
        c["contract_errors"] += not ok
        c["constructed_ok"] += ok
        c["tight"] += ok and rec["constructed"] == rec["g_p"]
        c["m_zero"] += rec["m_zero"]
        if rec["rough"]:
            c["rough"] += 1
            c["rough_cond1_pass"] += rec["cond1"] is True
            c["rough_cond1_unknown"] += rec["cond1"] is None
            c["rough_cond2_pass"] += rec["cond2"]
            c["rough_both"] += rec["cond1"] is True and rec["cond2"]
            c["rough_totient_holds"] += rec["totient_holds"]
            if rec["cond1"] is True and ok:
                c["main1_checked"] += 1
                c["main1_violations"] += rec["realized_exponent"] > rec["main1_exp"]
                c["main3_below_main1"] += rec["main3_exp"] < rec["main1_exp"]
        lg = math.log(rec["g_p"]) / math.log(p)
        c["gp_within_reference"] += lg <= BURGESS_EXPONENT + epsilon
        c["gp_within_smoke"] += lg <= BURGESS_EXPONENT + SMOKE_MARGIN
        for t, w in rec["omega_counts"].items():
            self.omega_sum[t] = self.omega_sum.get(t, 0) + w
            self.omega_sum_sq[t] = self.omega_sum_sq.get(t, 0) + w * w
        self.hist_gp[_bin(lg, HIST_BINS_GP)] += 1
        if ok:
            self.hist_realized[_bin(rec["realized_exponent"], HIST_BINS_REALIZED)] += 1

    def to_dict(self) -> dict:
        return {
            "counts": dict(self.counts),
            "omega_sum": dict(self.omega_sum),
            "omega_sum_sq": dict(self.omega_sum_sq),
            "hist_gp": list(self.hist_gp),
            "hist_realized": list(self.hist_realized),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Aggregates":
        return cls(dict(d["counts"]), dict(d["omega_sum"]), dict(d["omega_sum_sq"]), list(d["hist_gp"]), list(d["hist_realized"]))


def _bin(v: float, nbins: int) -> int:
    k = math.floor(Fraction(v) / HIST_WIDTH)
    return min(max(k, 0), nbins - 1)


@dataclass
class ShardResult:
    index: int
    lo: int
    hi: int
    aggregates: Aggregates
    truncated: bool = False
    last_p: Optional[int] = None
    records: List[dict] = field(default_factory=list)


def _shard_bounds(x: int, shards: int) -> List[Tuple[int, int]]:
    lo, hi = 3, x
    if hi < lo:
        return [(lo, lo - 1)]
    span = hi - lo + 1
    out = []
    for k in range(shards):
        a = lo + span * k // shards
        b = lo + span * (k + 1) // shards - 1
        out.append((a, b))
    return out


def _shard_paths(out_dir: str, k: int) -> Tuple[str, str]:
    return os.path.join(out_dir, f"records-{k:04d}.jsonl"), os.path.join(out_dir, f"shard-{k:04d}.json")


def _run_shard(cfg: SurveyConfig, k: int, lo: int, hi: int) -> ShardResult:
    agg = Aggregates()
    res = ShardResult(k, lo, hi, agg)
    fh = None
    if cfg.out_dir:
        rec_path, meta_path = _shard_paths(cfg.out_dir, k)
        if cfg.resume and os.path.exists(meta_path):
            with open(meta_path, encoding="utf-8") as m:
                meta = json.load(m)
            if meta.get("config") == round_floats(cfg.fingerprint()) and not meta.get("truncated"):
                res.aggregates = Aggregates.from_dict(meta["aggregates"])
                res.last_p = meta.get("last_p")
                if cfg.keep_records:
                    with open(rec_path, encoding="utf-8") as r:
                        res.records = [json.loads(line) for line in r]
                return res
        fh = open(rec_path, "w", encoding="utf-8", newline="\n")
    start = time.monotonic()
    table = SmallestFactorTable(hi) if 3 <= hi <= 5 * 10**7 else None
    try:
        for seg in iter_prime_segments(lo, hi):
            for p in seg.tolist():
                if p < 3:
                    continue
                if cfg.time_budget is not None and time.monotonic() - start > cfg.time_budget:
                    res.truncated = True
                    break
                pm1 = table.factorize(p - 1) if table else factorize(p - 1)
                rec = survey_prime(p, cfg, pm1).to_dict()
                agg.add(rec, cfg.epsilon)
                res.last_p = p
                if fh:
                    fh.write(dumps(rec) + "\n")
                if cfg.keep_records:
                    res.records.append(rec)
            if res.truncated:
                break
    finally:
        if fh:
            fh.close()
    if cfg.out_dir:
        with open(_shard_paths(cfg.out_dir, k)[1], "w", encoding="utf-8", newline="\n") as m:
            m.write(
                dumps(
                    {
                        "config": cfg.fingerprint(),
                        "index": k,
                        "lo": lo,
                        "hi": hi,
                        "truncated": res.truncated,
                        "last_p": res.last_p,
                        "aggregates": agg.to_dict(),
                    }
                )
            )
    return res


@dataclass
class SurveyReport:
    config: SurveyConfig
    aggregates: Aggregates
    truncated: bool
    shards: List[dict]
    records: List[dict] = field(default_factory=list, repr=False)

    def probabilities(self) -> Dict[str, dict]:
        c = self.aggregates.counts

        def frac(num: int, den: int) -> dict:
            return {"numerator": num, "denominator": den, "value": num / den if den else 0.0}

        return {
            "constructed_primitive_root": frac(c["constructed_ok"], c["primes"]),
            "construction_tight": frac(c["tight"], c["constructed_ok"]),
            "rough": frac(c["rough"], c["primes"]),
            "cond1_given_rough": frac(c["rough_cond1_pass"], c["rough"]),
            "cond2_given_rough": frac(c["rough_cond2_pass"], c["rough"]),
            "cond1_and_cond2_given_rough": frac(c["rough_both"], c["rough"]),
            "totient_holds_given_rough": frac(c["rough_totient_holds"], c["rough"]),
            "main1_violation_given_checked": frac(c["main1_violations"], c["main1_checked"]),
            "gp_within_reference": frac(c["gp_within_reference"], c["primes"]),
            "gp_within_smoke": frac(c["gp_within_smoke"], c["primes"]),
        }

    def omega_moments(self) -> List[dict]:
        a = self.aggregates
        n = a.counts["primes"]
        rows = []
        for t in a.omega_sum:
            s1, s2 = a.omega_sum[t], a.omega_sum_sq[t]
            mean = Fraction(s1, n) if n else Fraction(0)
            var = Fraction(s2 * n - s1 * s1, n * n) if n else Fraction(0)
            rows.append(
                {
                    "t": float(t),
                    "n": n,
                    "loglog_t": loglog(float(t), self.config.raw_loglog),
                    "mean": float(mean),
                    "variance": float(var),
                    "sum": s1,
                    "sum_sq": s2,
                }
            )
        return rows

    def density(self) -> dict:
        c = self.aggregates.counts
        pred = mertens_prediction(self.config.y)
        emp = c["rough"] / c["primes"] if c["primes"] else 0.0
        return {"y": self.config.y, "empirical": emp, "mertens_prediction": pred, "ratio": emp / pred}

    def histograms(self) -> dict:
        w = float(HIST_WIDTH)
        a = self.aggregates
        return {
            "bin_width": w,
            "log_gp_over_log_p": list(a.hist_gp),
            "realized_exponent": list(a.hist_realized),
        }

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "config": cfg.fingerprint(),
            "truncated": self.truncated,
            "counts": dict(self.aggregates.counts),
            "probabilities": self.probabilities(),
            "reference_exponent": BURGESS_EXPONENT + cfg.epsilon,
            "omega_moments": self.omega_moments(),
            "density": self.density(),
            "histograms": self.histograms(),
            "shards": self.shards,
        }


def aggregate_records(lines: Iterable[str], epsilon: float) -> Aggregates:
    """Rebuild aggregates from streamed JSON lines (the restartable second pass)."""
    agg = Aggregates()
    for line in lines:
        line = line.strip()
        if line:
            rec = json.loads(line)
            if "p" in rec:  # skip the truncation marker
                agg.add(rec, epsilon)
    return agg


def _write_tables(report: SurveyReport, out_dir: str) -> None:
    def table(name: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
        with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])

    probs = report.probabilities()
    table("conditions.csv", ("event", "numerator", "denominator", "value"),
          ((k, v["numerator"], v["denominator"], v["value"]) for k, v in probs.items()))
    table("omega_moments.csv", ("t", "n", "loglog_t", "mean", "variance"),
          ((r["t"], r["n"], r["loglog_t"], r["mean"], r["variance"]) for r in report.omega_moments()))
    d = report.density()
    table("density.csv", ("y", "empirical", "mertens_prediction", "ratio"),
          [(d["y"], d["empirical"], d["mertens_prediction"], d["ratio"])])
    h = report.histograms()
    w = h["bin_width"]
    table("histograms.csv", ("quantity", "bin_lo", "bin_hi", "count"),
          [("log_gp_over_log_p", i * w, (i + 1) * w, c) for i, c in enumerate(h["log_gp_over_log_p"])]
          + [("realized_exponent", i * w, (i + 1) * w, c) for i, c in enumerate(h["realized_exponent"])])


def run_survey(cfg: SurveyConfig) -> SurveyReport:
    """Sweep the odd primes up to cfg.x_limit, shard by shard, and assemble the report.

    With an out_dir, each shard streams records-NNNN.jsonl and a shard-NNNN.json
    summary; the merged records.jsonl, report.json and the CSV tables follow.
    A shard that runs out of its time budget stops early and marks the
    report as truncated.
    """
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
    bounds = _shard_bounds(cfg.x_limit, cfg.shards)
    results: List[ShardResult] = []
    if cfg.threads > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.threads, len(bounds))) as ex:
            futs = [ex.submit(_run_shard, cfg, k, lo, hi) for k, (lo, hi) in enumerate(bounds)]
            results = [f.result() for f in futs]
    else:
        results = [_run_shard(cfg, k, lo, hi) for k, (lo, hi) in enumerate(bounds)]

    agg = Aggregates()
    for r in sorted(results, key=lambda r: r.index):
        agg = agg.merge(r.aggregates)
    truncated = any(r.truncated for r in results)
    shards = [{"index": r.index, "lo": r.lo, "hi": r.hi, "truncated": r.truncated, "last_p": r.last_p} for r in results]
    records = [rec for r in results for rec in r.records] if cfg.keep_records else []
    report = SurveyReport(cfg, agg, truncated, shards, records)

    if cfg.out_dir:
        with open(os.path.join(cfg.out_dir, "records.jsonl"), "w", encoding="utf-8", newline="\n") as out:
            for k in range(len(bounds)):
                with open(_shard_paths(cfg.out_dir, k)[0], encoding="utf-8") as fh:
                    for line in fh:
                        out.write(line)
            if truncated:
                out.write(dumps({"truncated": True}) + "\n")
        with open(os.path.join(cfg.out_dir, "report.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps(report.to_dict(), indent=2) + "\n")
        _write_tables(report, cfg.out_dir)
    return report
