"""End-to-end experiments: double-root probabilities, divisibility, censuses.

Exact runs enumerate every coefficient tuple and count with integer weights;
Monte Carlo runs shard trials into fixed-size blocks with per-block derived
seeds, so merged counts are identical for every worker count.  Each report
carries the full configuration needed to reproduce it.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import (
    IntegerDistribution,
    IntPolynomial,
    distribution_to_json_dict,
    format_fraction,
)
from .errors import BudgetExceeded
from .mixture import decompose, to_sampler
from .polyalg import _max_root_modulus_small, _squarefree_part, has_multiple_root
from .seeding import DEFAULT_BLOCK, block_sizes, derive_seed

__all__ = [
    "DEFAULT_ENUM_BUDGET",
    "DEFAULT_CENSUS_BUDGET",
    "COUNT_KEYS",
    "DoubleRootReport",
    "ScalingRow",
    "ScalingTable",
    "DivisibilityReport",
    "TailCheck",
    "CensusReport",
    "ExperimentReport",
    "exact_double_root",
    "mc_double_root",
    "scaling_table",
    "divisibility_experiment",
    "tail_near_two_check",
    "small_house_census",
    "census_bound",
]

DEFAULT_ENUM_BUDGET = 20_000_000
DEFAULT_CENSUS_BUDGET = 10_000_000

COUNT_KEYS = ("any", "at_0", "at_plus1", "at_minus1", "at_pm1_or_0")

_FLAG_CACHE_CAP = 1 << 17


def _tuple_flags(coeffs: Sequence[int]) -> tuple[bool, bool, bool, bool]:
    """(any multiple root, double at 0, at +1, at -1) for one coefficient tuple.

    The all-zero tuple counts as a double root at 0 by convention, so exact
    counts stay well-defined when 0 is in the support.
    """
    if not any(coeffs):
        return True, True, False, False
    at0 = coeffs[0] == 0 and (len(coeffs) < 2 or coeffs[1] == 0)
    s = sum(coeffs)
    s_prime = sum(j * c for j, c in enumerate(coeffs))
    at1 = s == 0 and s_prime == 0
    alt = sum(c if j % 2 == 0 else -c for j, c in enumerate(coeffs))
    alt_prime = sum(j * c * (1 if (j - 1) % 2 == 0 else -1) for j, c in enumerate(coeffs) if j >= 1)
    atm1 = alt == 0 and alt_prime == 0
    if at0 or at1 or atm1:
        return True, at0, at1, atm1
    p = IntPolynomial.from_coeffs(coeffs)
    if p.degree <= 1:
        return False, False, False, False
    return has_multiple_root(p), False, False, False


@dataclass(frozen=True)
class DoubleRootReport:
    """Located and global double-root probabilities for one (dist, n) pair.

    counts are integer-weighted tuple counts (exact mode, total = denom^(n+1))
    or hit counts (Monte Carlo mode, total = trials).  Probabilities are exact
    count/total ratios; Monte Carlo standard errors use sqrt(p(1-p)/trials).
    """

    n: int
    dist: IntegerDistribution
    mode: str  # "exact" | "monte-carlo"
    counts: dict[str, int]
    total: int
    seed: int | None = None
    workers: int = 1
    elapsed_seconds: float | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "monte-carlo"):
            raise ValueError("mode must be 'exact' or 'monte-carlo'")
        if set(self.counts) != set(COUNT_KEYS):
            raise ValueError(f"counts must have keys {COUNT_KEYS}")
        if any(c < 0 or c > self.total for c in self.counts.values()):
            raise ValueError("counts must lie in [0, total]")
        if self.counts["any"] < self.counts["at_pm1_or_0"]:
            raise ValueError("located double roots cannot outnumber all double roots")

    def probability(self, key: str) -> Fraction:
        return Fraction(self.counts[key], self.total)

    def estimate(self, key: str) -> float:
        return self.counts[key] / self.total

    def standard_error(self, key: str) -> float:
        p = self.estimate(key)
        return math.sqrt(p * (1.0 - p) / self.total)

    def to_json_dict(self, include_timings: bool = False) -> dict:
        probs: dict[str, object] = {}
        for key in COUNT_KEYS:
            if self.mode == "exact":
                probs[f"p_{key}"] = format_fraction(self.probability(key))
            else:
                probs[f"p_{key}"] = self.estimate(key)
                probs[f"se_{key}"] = self.standard_error(key)
        out = {
            "n": self.n,
            "dist": distribution_to_json_dict(self.dist),
            "mode": self.mode,
            "counts": dict(self.counts),
            "total": self.total,
            "probabilities": probs,
            "seed": self.seed,
            "workers": self.workers,
        }
        if include_timings:
            out["elapsed_seconds"] = self.elapsed_seconds
        return out


# ---------------------------------------------------------------------------
# Exact enumeration
# ---------------------------------------------------------------------------


def _exact_range_counts(args) -> tuple[int, ...]:
    values, nums, n, start, end = args
    k = len(values)
    uniform = len(set(nums)) == 1
    digits = []
    idx = start
    for _ in range(n + 1):
        digits.append(idx % k)
        idx //= k
    counts = [0] * len(COUNT_KEYS)
    coeffs = [values[t] for t in digits]
    for index in range(start, end):
        if uniform:
            weight = 1
        else:
            weight = 1
            for t in digits:
                weight *= nums[t]
        f_any, at0, at1, atm1 = _tuple_flags(coeffs)
        if f_any:
            counts[0] += weight
            if at0:
                counts[1] += weight
            if at1:
                counts[2] += weight
            if atm1:
                counts[3] += weight
            if at0 or at1 or atm1:
                counts[4] += weight
        if index + 1 < end:
            pos = 0
            while True:
                digits[pos] += 1
                if digits[pos] < k:
                    coeffs[pos] = values[digits[pos]]
                    break
                digits[pos] = 0
                coeffs[pos] = values[0]
                pos += 1
    if uniform:
        scale = nums[0] ** (n + 1)
        counts = [c * scale for c in counts]
    return tuple(counts)


def exact_double_root(
    dist: IntegerDistribution,
    n: int,
    budget: int = DEFAULT_ENUM_BUDGET,
    workers: int = 1,
) -> DoubleRootReport:
    """Exhaustive double-root census over all |support|^(n+1) coefficient tuples."""
    if n < 0:
        raise ValueError("n must be non-negative")
    values, nums, denom = dist.integer_weights()
    k = len(values)
    tuples = k ** (n + 1)
    if tuples > budget:
        raise BudgetExceeded(
            f"enumeration needs {tuples} tuples (budget {budget})",
            estimated=tuples,
            budget=budget,
        )
    start_time = time.perf_counter()
    jobs = []
    chunk = max(1, math.ceil(tuples / max(workers, 1)))
    pos = 0
    while pos < tuples:
        jobs.append((values, nums, n, pos, min(pos + chunk, tuples)))
        pos += chunk
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_exact_range_counts, jobs))
    else:
        partials = [_exact_range_counts(job) for job in jobs]
    merged = [sum(part[i] for part in partials) for i in range(len(COUNT_KEYS))]
    total = denom ** (n + 1)
    return DoubleRootReport(
        n=n,
        dist=dist,
        mode="exact",
        counts=dict(zip(COUNT_KEYS, merged)),
        total=total,
        workers=workers,
        elapsed_seconds=time.perf_counter() - start_time,
    )


# ---------------------------------------------------------------------------
# Monte Carlo with block-deterministic sharding
# ---------------------------------------------------------------------------


def _mc_block_counts(args) -> tuple[int, ...]:
    import random

    sampler, n, block_seed, trials = args
    rng = random.Random(block_seed)
    counts = [0] * len(COUNT_KEYS)
    cache: dict[tuple[int, ...], tuple[bool, bool, bool, bool]] = {}
    for _ in range(trials):
        coeffs = tuple(sampler.sample(rng) for _ in range(n + 1))
        flags = cache.get(coeffs)
        if flags is None:
            flags = _tuple_flags(coeffs)
            if len(cache) < _FLAG_CACHE_CAP:
                cache[coeffs] = flags
        f_any, at0, at1, atm1 = flags
        if f_any:
            counts[0] += 1
            if at0:
                counts[1] += 1
            if at1:
                counts[2] += 1
            if atm1:
                counts[3] += 1
            if at0 or at1 or atm1:
                counts[4] += 1
    return tuple(counts)


def mc_double_root(
    dist: IntegerDistribution,
    n: int,
    trials: int,
    seed: int,
    workers: int = 1,
    block: int = DEFAULT_BLOCK,
) -> DoubleRootReport:
    """Monte Carlo double-root frequencies with exact per-draw detection.

    Coefficients are drawn through the two-point mixture sampler; the multiple
    root test on each draw is the exact gcd criterion.  Counts do not depend
    on the worker count: block b always runs with seed derive_seed(seed, b).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if n < 0:
        raise ValueError("n must be non-negative")
    sampler = to_sampler(decompose(dist))
    start_time = time.perf_counter()
    jobs = [
        (sampler, n, derive_seed(seed, b), size)
        for b, size in enumerate(block_sizes(trials, block))
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_mc_block_counts, jobs))
    else:
        partials = [_mc_block_counts(job) for job in jobs]
    merged = [sum(part[i] for part in partials) for i in range(len(COUNT_KEYS))]
    return DoubleRootReport(
        n=n,
        dist=dist,
        mode="monte-carlo",
        counts=dict(zip(COUNT_KEYS, merged)),
        total=trials,
        seed=seed,
        workers=workers,
        elapsed_seconds=time.perf_counter() - start_time,
    )


# ---------------------------------------------------------------------------
# Scaling with degree
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalingRow:
    n: int
    mode: str
    p_any: Fraction
    p_at_pm1_or_0: Fraction
    n2_p_any: Fraction


@dataclass(frozen=True)
class ScalingTable:
    rows: tuple[ScalingRow, ...]

    def to_csv(self) -> str:
        lines = ["n,mode,p_any,p_at_pm1_or_0,n2_p_any"]
        for r in self.rows:
            lines.append(
                f"{r.n},{r.mode},{format_fraction(r.p_any)},"
                f"{format_fraction(r.p_at_pm1_or_0)},{format_fraction(r.n2_p_any)}"
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "rows": [
                {
                    "n": r.n,
                    "mode": r.mode,
                    "p_any": format_fraction(r.p_any),
                    "p_at_pm1_or_0": format_fraction(r.p_at_pm1_or_0),
                    "n2_p_any": format_fraction(r.n2_p_any),
                }
                for r in self.rows
            ]
        }


def scaling_table(
    dist: IntegerDistribution,
    ns: Iterable[int],
    budget: int = DEFAULT_ENUM_BUDGET,
    mc_trials: int | None = None,
    seed: int = 0,
    workers: int = 1,
) -> ScalingTable:
    """Rows (n, p_any, p_at_pm1_or_0, n²·p_any) for trend inspection.

    Degrees beyond the exact enumeration budget fall back to Monte Carlo when
    mc_trials is given; each row is flagged with its mode.
    """
    rows = []
    for n in ns:
        k = len(dist.support)
        if k ** (n + 1) <= budget:
            rep = exact_double_root(dist, n, budget=budget, workers=workers)
        elif mc_trials is not None:
            rep = mc_double_root(dist, n, trials=mc_trials, seed=seed, workers=workers)
        else:
            raise BudgetExceeded(
                f"degree {n} exceeds the exact budget and no MC fallback was given",
                estimated=k ** (n + 1),
                budget=budget,
            )
        p_any = rep.probability("any")
        rows.append(
            ScalingRow(
                n=n,
                mode=rep.mode,
                p_any=p_any,
                p_at_pm1_or_0=rep.probability("at_pm1_or_0"),
                n2_p_any=Fraction(n * n) * p_any,
            )
        )
    return ScalingTable(rows=tuple(rows))


# ---------------------------------------------------------------------------
# Divisibility of P(a) by squares
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DivisibilityRow:
    k: int
    hits: int
    frequency: float
    standard_error: float


@dataclass(frozen=True)
class DivisibilityReport:
    n: int
    a: int
    trials: int
    seed: int
    rows: tuple[DivisibilityRow, ...]
    fit_constant: float | None
    fit_epsilon: float | None

    def to_csv(self) -> str:
        lines = ["k,hits,frequency,standard_error"]
        for r in self.rows:
            lines.append(f"{r.k},{r.hits},{r.frequency!r},{r.standard_error!r}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "a": self.a,
            "trials": self.trials,
            "seed": self.seed,
            "rows": [
                {
                    "k": r.k,
                    "hits": r.hits,
                    "frequency": r.frequency,
                    "standard_error": r.standard_error,
                }
                for r in self.rows
            ],
            "fit_constant": self.fit_constant,
            "fit_epsilon": self.fit_epsilon,
        }


def divisibility_experiment(
    dist: IntegerDistribution,
    n: int,
    a: int,
    ks: Sequence[int],
    trials: int,
    seed: int,
) -> DivisibilityReport:
    """Empirical P(k² | P(a)) per k, with a decay-exponent fit overlay.

    The fit models frequency ≈ C·k^-(1+eps) over the k ≥ 2 rows with at least
    one hit (log-log least squares); it is None when fewer than two such rows
    exist.
    """
    import random

    if a not in (-2, 2):
        raise ValueError("a must be -2 or 2")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not ks or any(k < 1 for k in ks):
        raise ValueError("k values must be positive")
    rng = random.Random(seed)
    hits = {k: 0 for k in ks}
    squares = {k: k * k for k in ks}
    for _ in range(trials):
        coeffs = dist.sample_many(rng, n + 1)
        value = 0
        for c in reversed(coeffs):
            value = value * a + c
        for k in ks:
            if value % squares[k] == 0:
                hits[k] += 1
    rows = []
    for k in ks:
        freq = hits[k] / trials
        se = math.sqrt(freq * (1.0 - freq) / trials)
        rows.append(DivisibilityRow(k=k, hits=hits[k], frequency=freq, standard_error=se))
    fit_pts = [(math.log(k), math.log(hits[k] / trials)) for k in ks if k >= 2 and hits[k] > 0]
    fit_c = fit_eps = None
    if len(fit_pts) >= 2:
        xs = [x for x, _ in fit_pts]
        ys = [y for _, y in fit_pts]
        mean_x = sum(xs) / len(xs)
        mean_y = sum(ys) / len(ys)
        var_x = sum((x - mean_x) ** 2 for x in xs)
        if var_x > 0:
            slope = sum((x - mean_x) * (y - mean_y) for x, y in fit_pts) / var_x
            fit_c = math.exp(mean_y - slope * mean_x)
            fit_eps = -slope - 1.0
    return DivisibilityReport(
        n=n, a=a, trials=trials, seed=seed, rows=tuple(rows),
        fit_constant=fit_c, fit_epsilon=fit_eps,
    )


# ---------------------------------------------------------------------------
# Tail of |P(a)| near a = ±2
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailCheck:
    n: int
    a: int
    c_exponent: float
    trials: int
    seed: int
    hits: int
    frequency: float
    standard_error: float
    threshold: float

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "a": self.a,
            "c_exponent": self.c_exponent,
            "trials": self.trials,
            "seed": self.seed,
            "hits": self.hits,
            "frequency": self.frequency,
            "standard_error": self.standard_error,
            "threshold": self.threshold,
        }


def tail_near_two_check(
    dist: IntegerDistribution,
    n: int,
    trials: int,
    seed: int,
    c_exponent: float,
    a: int = 2,
) -> TailCheck:
    """Empirical P(|P(a)| ≤ n^-C · 2^n); the comparison per draw is exact."""
    import random

    if a not in (-2, 2):
        raise ValueError("a must be -2 or 2")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if n < 1:
        raise ValueError("n must be at least 1")
    threshold = Fraction(2) ** n * Fraction(n ** (-c_exponent))
    rng = random.Random(seed)
    hits = 0
    for _ in range(trials):
        coeffs = dist.sample_many(rng, n + 1)
        value = 0
        for c in reversed(coeffs):
            value = value * a + c
        if abs(value) <= threshold:
            hits += 1
    freq = hits / trials
    se = math.sqrt(freq * (1.0 - freq) / trials)
    return TailCheck(
        n=n, a=a, c_exponent=c_exponent, trials=trials, seed=seed,
        hits=hits, frequency=freq, standard_error=se, threshold=float(threshold),
    )


# ---------------------------------------------------------------------------
# Census of degree-d polynomials with house below 1 + b·log(d)/(a·d)
# ---------------------------------------------------------------------------


def census_bound(d: int, a: int, b: Fraction) -> float:
    """exp((a·d)^(2/3+b)), the cap the census count is compared against."""
    return math.exp((a * d) ** (2.0 / 3.0 + float(b)))


@dataclass(frozen=True)
class CensusReport:
    degree: int
    lead: int
    b: Fraction
    threshold: float
    nodes_visited: int
    candidates_scanned: int
    matching: tuple[tuple[int, ...], ...]  # ascending coefficient tuples
    bound: float
    within_bound: bool

    @property
    def matching_count(self) -> int:
        return len(self.matching)

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "lead": self.lead,
            "b": format_fraction(self.b),
            "threshold": self.threshold,
            "nodes_visited": self.nodes_visited,
            "candidates_scanned": self.candidates_scanned,
            "matching_count": self.matching_count,
            "bound": self.bound,
            "within_bound": self.within_bound,
            "matching": [[str(c) for c in coeffs] for coeffs in self.matching],
        }


# Float root moduli of a polynomial with an m-fold root carry errors on the
# order of eps^(1/m); _HOUSE_BAND must dominate that worst case at degree ~10.
_HOUSE_BAND = 0.25


def _robust_house(int_coeffs_ascending: Sequence[int]) -> float:
    """House computed after exact squarefree deflation; all roots are simple."""
    sf = _squarefree_part(int_coeffs_ascending)
    return _max_root_modulus_small([float(c) for c in sf])


def _batched_max_moduli(rows: "np.ndarray", lam: float) -> tuple["np.ndarray", "np.ndarray"]:
    """(max root modulus, trusted flag) per row of float coefficient rows.

    rows[:, k] is the coefficient of x^k; the leading column must be nonzero.
    One stacked-companion eigenvalue call covers a whole search level.  A row
    is flagged untrusted when eigenvalues near the deciding modulus cluster,
    since an m-fold root is only located to about eps^(1/m); those rows get
    re-decided exactly by the caller.
    """
    n, width = rows.shape
    m = width - 1
    if m == 1:
        h = np.abs(rows[:, 0] / rows[:, 1])
        return h, np.ones(n, dtype=bool)
    monic = rows[:, :-1] / rows[:, -1:]
    comp = np.zeros((n, m, m), dtype=np.float64)
    idx = np.arange(m - 1)
    comp[:, idx + 1, idx] = 1.0
    comp[:, :, m - 1] = -monic
    eig = np.linalg.eigvals(comp)
    mod = np.abs(eig)
    h = mod.max(axis=1)
    near = mod >= lam - (_HOUSE_BAND + 0.05)
    dist = np.abs(eig[:, :, None] - eig[:, None, :])
    pair = near[:, :, None] & near[:, None, :]
    pair &= ~np.eye(m, dtype=bool)[None, :, :]
    dist = np.where(pair, dist, np.inf)
    min_sep = dist.min(axis=(1, 2))
    return h, min_sep > 1e-4


def small_house_census(
    d: int,
    a: int,
    b: Fraction = Fraction(1, 6),
    tol: float = 1e-9,
    budget: int = DEFAULT_CENSUS_BUDGET,
) -> CensusReport:
    """All degree-d, lead-a integer polynomials with house below the threshold.

    Coefficients are fixed from the leading side, one level at a time.  A
    prefix A[0..j] determines the (d-j)-th derivative g_j of any completion,
    and a qualifying completion keeps all roots of every g_j inside the
    Λ-disk, so each level prunes children with necessary conditions only:
    power sums forced by Newton's identity obey |S_k| ≤ d·Λ^k, the constant
    term of g_j is a value of the antiderivative of g_{j-1} on the disk, g_j
    cannot change sign on the real axis outside [-Λ, Λ], and the roots of g_j
    (batched companion eigenvalues per level) stay in the disk.  Children
    whose float house falls inside the uncertainty band are settled by exact
    squarefree deflation, so multiple roots cannot flip a decision.  The scan
    order is deterministic.
    """
    if d < 1 or a < 1:
        raise ValueError("need degree >= 1 and positive leading coefficient")
    b = Fraction(b)
    lam = 1.0 + float(b) * math.log(d) / (a * d)
    prune_pad = 1e-6
    s_bound = [0] + [
        math.floor(d * lam ** k * a ** k * (1.0 + 1e-12) + 1e-9) for k in range(1, d + 1)
    ]  # bound on the integer numerators N_k = S_k · a^k
    box = [0] + [math.floor(a * math.comb(d, k) * lam ** k + 1e-9) for k in range(1, d + 1)]
    fact = [math.factorial(i) for i in range(d + 1)]
    lam_powers = [lam ** k for k in range(d + 2)]

    matching: list[tuple[int, ...]] = []
    nodes = 0
    candidates = 0
    chunk_size = 65536

    # a node is (A, N): descending coefficients so far and integer power-sum
    # numerators N_k = S_k · a^k given by the Newton recursion
    level: list[tuple[tuple[int, ...], tuple[int, ...]]] = [((a,), (0,))]

    for j in range(1, d + 1):
        g_scale = fact[d - j]
        sign_probe = []
        for x in (lam * (1.0 + 1e-9), -lam * (1.0 + 1e-9)):
            sign_probe.append([x ** k for k in range(j + 1)])
        child_coeffs: list[tuple[int, ...]] = []
        child_sums: list[tuple[int, ...]] = []
        child_g0: list[int] = []
        fixed_rows: list[list[float]] = []
        row_of_child: list[int] = []

        for A, N in level:
            # N_j = -(Σ_{i=1..j-1} a_i N_{j-i} a^{i-1} + j a_j a^{j-1}), all integers
            t_num = 0
            for i in range(1, j):
                t_num += A[i] * N[j - i] * a ** (i - 1)
            aj_scale = j * a ** (j - 1)
            lim = s_bound[j]
            lo = -((lim + t_num) // aj_scale)  # exact ceil((-lim - t_num)/scale)
            hi = (lim - t_num) // aj_scale
            lo = max(lo, -box[j])
            hi = min(hi, box[j])
            if hi < lo:
                continue
            # the constant term of g_j is -G(z0) at a root z0 in the disk,
            # for G the antiderivative of g_{j-1} vanishing at 0
            anti_bound = 0.0
            for i in range(j):
                coeff = A[i] * (fact[d - i] // fact[j - 1 - i])
                k = j - i
                anti_bound += abs(coeff) / k * lam_powers[k]
            a_cap = math.floor(anti_bound / g_scale * (1.0 + 1e-9) + 1e-9) + 1
            lo = max(lo, -a_cap)
            hi = min(hi, a_cap)
            if hi < lo:
                continue
            nodes += hi - lo + 1
            if nodes > budget:
                raise BudgetExceeded(
                    f"census search exceeded {budget} nodes",
                    estimated=nodes,
                    budget=budget,
                )
            g_fixed = [A[i] * (fact[d - i] // fact[j - i]) for i in range(j)]
            fixed_asc = [float(c) for c in reversed(g_fixed)]  # x^1 .. x^j
            lead_sign = 1.0 if g_fixed[0] > 0 else -1.0
            probe_fixed = []
            for probe in sign_probe:
                probe_fixed.append(sum(c * p for c, p in zip(fixed_asc, probe[1:])))
            row_index = len(fixed_rows)
            fixed_rows.append(fixed_asc)
            for aj in range(lo, hi + 1):
                g0 = aj * g_scale
                # no sign change allowed on the real axis beyond ±Λ; the small
                # slack keeps float evaluation error from pruning a borderline
                # qualifier whose root sits just inside the disk
                if (g0 + probe_fixed[0]) * lead_sign <= -1e-9:
                    continue
                if (g0 + probe_fixed[1]) * lead_sign * (-1.0 if j % 2 else 1.0) <= -1e-9:
                    continue
                n_j = -(t_num + aj * aj_scale)
                child_coeffs.append(A + (aj,))
                child_sums.append(N + (n_j,))
                child_g0.append(g0)
                row_of_child.append(row_index)

        if not child_coeffs:
            level = []
            break

        # one batched eigenvalue sweep per level, chunked to bound memory
        keep: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
        total_children = len(child_coeffs)
        if j == d:
            candidates += total_children
        for chunk_start in range(0, total_children, chunk_size):
            chunk_end = min(chunk_start + chunk_size, total_children)
            rows = np.empty((chunk_end - chunk_start, j + 1), dtype=np.float64)
            for idx in range(chunk_start, chunk_end):
                rows[idx - chunk_start, 0] = float(child_g0[idx])
                rows[idx - chunk_start, 1:] = fixed_rows[row_of_child[idx]]
            moduli, trusted = _batched_max_moduli(rows, lam)
            for offset in range(chunk_end - chunk_start):
                idx = chunk_start + offset
                h = moduli[offset]
                A_child = child_coeffs[idx]
                if j < d:
                    if trusted[offset]:
                        ok = h <= lam + prune_pad
                    elif h > lam + _HOUSE_BAND:
                        ok = False
                    else:
                        g_asc = [child_g0[idx]] + [
                            int(c) for c in fixed_rows[row_of_child[idx]]
                        ]
                        ok = _robust_house(g_asc) <= lam + prune_pad
                    if ok:
                        keep.append((A_child, child_sums[idx]))
                else:
                    if trusted[offset]:
                        if h < lam - tol:
                            matching.append(tuple(reversed(A_child)))
                    elif h < lam - _HOUSE_BAND:
                        matching.append(tuple(reversed(A_child)))
                    elif h <= lam + _HOUSE_BAND:
                        ascending = list(reversed(A_child))
                        if _robust_house(ascending) < lam - tol:
                            matching.append(tuple(ascending))
        level = keep

    bound = census_bound(d, a, b)
    return CensusReport(
        degree=d,
        lead=a,
        b=b,
        threshold=lam,
        nodes_visited=nodes,
        candidates_scanned=candidates,
        matching=tuple(matching),
        bound=bound,
        within_bound=len(matching) <= bound,
    )


# ---------------------------------------------------------------------------
# Generic serializable run record used by the CLI
# ---------------------------------------------------------------------------


@dataclass
class ExperimentReport:
    """A complete record of one run: what was asked, what came out, how long."""

    kind: str
    config: dict
    result: dict
    elapsed_seconds: float | None = None

    def to_json_dict(self, include_timings: bool = False) -> dict:
        out = {"command": self.kind, "config": self.config, "result": self.result}
        if include_timings:
            out["elapsed_seconds"] = self.elapsed_seconds
        return out
