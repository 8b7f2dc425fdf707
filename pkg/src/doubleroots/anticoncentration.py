"""Exact laws of P(a), the W statistic, and the bounds that control them.

The evaluation law of Σ ξ_j a^j is computed by iterated sparse convolution
over integer weights with a single common denominator, so point masses come
out as exact rationals.  A dense int64 kernel handles the common case; a
Python-int fallback covers denominators too large for 64-bit accumulation.
Runs whose value range exceeds the configured entry budget are refused up
front with the estimated entry count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .core import IntegerDistribution, SparsePMF, format_fraction, max_atom
from .errors import BudgetExceeded, MaxAtomTooLarge, ZeroInput

__all__ = [
    "DEFAULT_PMF_BUDGET",
    "DEFAULT_W_BUDGET",
    "EpsilonProfile",
    "EpsilonRow",
    "WModel",
    "CoinsCheck",
    "WBinomialBound",
    "ExpectedWBound",
    "FnAnalysis",
    "LambdaTable",
    "leading_power_two",
    "exact_pmf_of_evaluation",
    "max_point_mass",
    "epsilon_profile",
    "estimate_lambda",
    "coins_bound_check",
    "w_exact_pmf",
    "sample_w",
    "w_binomial_bound",
    "u_vector_and_U",
    "f1",
    "g_prime",
    "f_n_analysis",
    "expected_w_lower_bound",
]

DEFAULT_PMF_BUDGET = 30_000_000
DEFAULT_W_BUDGET = 2_000_000

_INT64_SAFE = 1 << 62


def leading_power_two(k: int) -> int:
    """Exponent of 2 in the factorization of a nonzero integer."""
    if k == 0:
        raise ZeroInput("the leading power of 2 is undefined for 0")
    return (k & -k).bit_length() - 1


# ---------------------------------------------------------------------------
# Exact law of the evaluation P(a) = Σ ξ_j a^j
# ---------------------------------------------------------------------------


def _evaluation_range(dist: IntegerDistribution, n: int, a: int) -> tuple[int, int]:
    lo = hi = 0
    for j in range(n + 1):
        aj = a ** j
        shifts = [v * aj for v in dist.support]
        lo += min(shifts)
        hi += max(shifts)
    return lo, hi


def _evaluation_weights(dist: IntegerDistribution, n: int, a: int, budget: int):
    """Integer-weight law of Σ ξ_j a^j: (kind, data, offset, denom).

    kind "dense": data is an int64 array, value of index i is offset + i.
    kind "sparse": data is a dict value -> weight (arbitrary precision).
    """
    lo, hi = _evaluation_range(dist, n, a)
    entries = hi - lo + 1
    if entries > budget:
        raise BudgetExceeded(
            f"evaluation law needs up to {entries} entries (budget {budget})",
            estimated=entries,
            budget=budget,
        )
    values, nums, step_denom = dist.integer_weights()
    denom = step_denom ** (n + 1)
    if denom <= _INT64_SAFE:
        arr = np.zeros(1, dtype=np.int64)
        arr[0] = 1
        offset = 0
        for j in range(n + 1):
            aj = a ** j
            shifts = [v * aj for v in values]
            new_lo = offset + min(shifts)
            new_hi = offset + len(arr) - 1 + max(shifts)
            new = np.zeros(new_hi - new_lo + 1, dtype=np.int64)
            for s, w in zip(shifts, nums):
                start = offset + s - new_lo
                new[start : start + len(arr)] += w * arr
            arr, offset = new, new_lo
        return "dense", arr, offset, denom
    acc = {0: 1}
    for j in range(n + 1):
        aj = a ** j
        new: dict[int, int] = {}
        for v, w in zip(values, nums):
            s = v * aj
            for val, c in acc.items():
                key = val + s
                new[key] = new.get(key, 0) + w * c
        acc = new
    return "sparse", acc, 0, denom


def exact_pmf_of_evaluation(
    dist: IntegerDistribution, n: int, a: int, budget: int = DEFAULT_PMF_BUDGET
) -> SparsePMF:
    """Exact law of Σ_{j=0}^n ξ_j a^j for i.i.d. coefficients drawn from dist."""
    if n < 0:
        raise ValueError("n must be non-negative")
    kind, data, offset, denom = _evaluation_weights(dist, n, a, budget)
    if kind == "dense":
        idx = np.nonzero(data)[0]
        weights = {int(offset + i): int(data[i]) for i in idx}
    else:
        weights = data
    return SparsePMF.from_integer_weights(weights, denom)


def max_point_mass(pmf: SparsePMF) -> tuple[int, Fraction]:
    """The heaviest atom of a pmf; ties go to the smallest value."""
    best = max(pmf.entries.values())
    value = min(v for v, p in pmf.entries.items() if p == best)
    return value, best


def _evaluation_max_mass(
    dist: IntegerDistribution, n: int, a: int, budget: int
) -> tuple[int, Fraction]:
    """(argmax value, exact max mass) of the evaluation law, without materializing it."""
    kind, data, offset, denom = _evaluation_weights(dist, n, a, budget)
    if kind == "dense":
        mx = int(data.max())
        value = offset + int(np.argmax(data))
    else:
        mx = max(data.values())
        value = min(v for v, c in data.items() if c == mx)
    return value, Fraction(mx, denom)


@dataclass(frozen=True)
class EpsilonRow:
    n: int
    p_max: Fraction
    argmax: int
    eps: float


@dataclass(frozen=True)
class EpsilonProfile:
    """Per-degree exact max point mass of P(a) and the decay rate margin.

    eps is defined by p_max = 2^{-n(1/2 + eps)}; positive eps means the mass
    decays strictly faster than 2^{-n/2}.
    """

    a: int
    rows: tuple[EpsilonRow, ...]

    @property
    def nonpositive_eps_rows(self) -> tuple[int, ...]:
        return tuple(r.n for r in self.rows if r.eps <= 0)

    def to_csv(self) -> str:
        lines = ["n,p_max_num,p_max_den,argmax,eps_n"]
        for r in self.rows:
            lines.append(
                f"{r.n},{r.p_max.numerator},{r.p_max.denominator},{r.argmax},{r.eps!r}"
            )
        return "\n".join(lines) + "\n"


def _log2_fraction(q: Fraction) -> float:
    return math.log2(q.numerator) - math.log2(q.denominator)


def epsilon_profile(
    dist: IntegerDistribution,
    ns: Iterable[int],
    a: int = 2,
    budget: int = DEFAULT_PMF_BUDGET,
) -> EpsilonProfile:
    """Exact p_max(n) of P(a) for each n, with eps_n = -log2(p_max)/n - 1/2."""
    if max_atom(dist) > Fraction(1, 2):
        raise MaxAtomTooLarge("epsilon profile requires max atom at most 1/2")
    rows = []
    for n in ns:
        if n < 1:
            raise ValueError("profile degrees must be at least 1")
        value, p_max = _evaluation_max_mass(dist, n, a, budget)
        eps = -_log2_fraction(p_max) / n - 0.5
        rows.append(EpsilonRow(n=n, p_max=p_max, argmax=value, eps=eps))
    return EpsilonProfile(a=a, rows=tuple(rows))


@dataclass(frozen=True)
class LambdaRow:
    n: int
    num_coeffs: int
    p_max: Fraction
    lambda_hat: float


@dataclass(frozen=True)
class LambdaTable:
    """Exact p_max rows with the per-coefficient decay rate -ln(p_max)/(n+1).

    Indexing by the coefficient count m = n+1 makes the law of the m-term sum
    submultiplicative: p_{m1+m2} >= p_{m1} * p_{m2}, checked exactly on every
    computed triple.
    """

    a: int
    rows: tuple[LambdaRow, ...]
    submultiplicative_ok: bool
    checked_triples: tuple[tuple[int, int, int], ...]

    def to_csv(self) -> str:
        lines = ["n,num_coeffs,p_max_num,p_max_den,lambda_hat"]
        for r in self.rows:
            lines.append(
                f"{r.n},{r.num_coeffs},{r.p_max.numerator},{r.p_max.denominator},{r.lambda_hat!r}"
            )
        return "\n".join(lines) + "\n"


def estimate_lambda(
    dist: IntegerDistribution,
    ns: Iterable[int],
    a: int = 2,
    budget: int = DEFAULT_PMF_BUDGET,
) -> LambdaTable:
    """Decay-rate table for p_max, with exact submultiplicativity diagnostics."""
    if max_atom(dist) > Fraction(1, 2):
        raise MaxAtomTooLarge("lambda estimation requires max atom at most 1/2")
    rows = []
    by_m: dict[int, Fraction] = {}
    for n in sorted(set(ns)):
        if n < 0:
            raise ValueError("degrees must be non-negative")
        _, p_max = _evaluation_max_mass(dist, n, a, budget)
        m = n + 1
        lam = -(math.log(p_max.numerator) - math.log(p_max.denominator)) / m
        rows.append(LambdaRow(n=n, num_coeffs=m, p_max=p_max, lambda_hat=lam))
        by_m[m] = p_max
    triples = []
    ok = True
    ms = sorted(by_m)
    for m1 in ms:
        for m2 in ms:
            if m2 < m1:
                continue
            m3 = m1 + m2
            if m3 in by_m:
                triples.append((m1, m2, m3))
                if by_m[m3] < by_m[m1] * by_m[m2]:
                    ok = False
    return LambdaTable(
        a=a, rows=tuple(rows), submultiplicative_ok=ok, checked_triples=tuple(triples)
    )


# ---------------------------------------------------------------------------
# Fair-coin sums: exact max mass versus the distinct-dyadic-valuation bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoinsCheck:
    max_mass: Fraction
    max_value: int
    bound: Fraction
    passed: bool


def coins_bound_check(
    b: Sequence[int], d: Sequence[int], limit: int = 20
) -> CoinsCheck:
    """Exact max point mass of Σ b_i + d_i B_i against 2^-|{L(d_i)}|.

    B_i are independent fair bits.  The law is enumerated exactly, so the
    comparison with the bound is an integer comparison.
    """
    if len(b) != len(d):
        raise ValueError("b and d must have the same length")
    if len(d) == 0:
        raise ValueError("need at least one term")
    if len(d) > limit:
        raise ValueError(f"brute force limited to {limit} terms")
    if any(di == 0 for di in d):
        raise ZeroInput("all d_i must be nonzero")
    counts = {sum(b): 1}
    for di in d:
        new: dict[int, int] = {}
        for v, c in counts.items():
            new[v] = new.get(v, 0) + c
            key = v + di
            new[key] = new.get(key, 0) + c
        counts = new
    total = 1 << len(d)
    mx = max(counts.values())
    value = min(v for v, c in counts.items() if c == mx)
    bound = Fraction(1, 1 << len({leading_power_two(di) for di in d}))
    max_mass = Fraction(mx, total)
    return CoinsCheck(max_mass=max_mass, max_value=value, bound=bound, passed=max_mass <= bound)


# ---------------------------------------------------------------------------
# The W statistic: W = |{i + w_i : 1 <= i <= n}|
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WModel:
    """n i.i.d. non-negative integer displacements w_i; W counts distinct i + w_i."""

    w_law: IntegerDistribution
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if any(v < 0 for v in self.w_law.support):
            raise ValueError("displacement law must be supported on non-negative integers")


def w_exact_pmf(model: WModel, budget: int = DEFAULT_W_BUDGET) -> SparsePMF:
    """Exact law of W by exhaustive enumeration over displacement vectors."""
    values, nums, step_denom = model.w_law.integer_weights()
    k = len(values)
    total_tuples = k ** model.n
    if total_tuples > budget:
        raise BudgetExceeded(
            f"W enumeration needs {total_tuples} vectors (budget {budget})",
            estimated=total_tuples,
            budget=budget,
        )
    uniform = len(set(nums)) == 1
    counts: dict[int, int] = {}
    n = model.n
    for tup in product(range(k), repeat=n):
        seen = {i + values[t] for i, t in enumerate(tup, 1)}
        if uniform:
            weight = 1
        else:
            weight = 1
            for t in tup:
                weight *= nums[t]
        key = len(seen)
        counts[key] = counts.get(key, 0) + weight
    denom = step_denom ** n
    if uniform:
        scale = nums[0] ** n
        counts = {w: c * scale for w, c in counts.items()}
    return SparsePMF.from_integer_weights(counts, denom)


def sample_w(model: WModel, rng) -> int:
    """One Monte Carlo draw of W."""
    ws = model.w_law.sample_many(rng, model.n)
    return len({i + w for i, w in enumerate(ws, 1)})


@dataclass(frozen=True)
class WBinomialBound:
    n: int
    k: int
    alpha: Fraction
    binomial_term: Fraction
    ratio_term: Fraction
    chain_ok: bool

    @property
    def ratio_term_float(self) -> float:
        return float(self.ratio_term)


def w_binomial_bound(n: int, alpha: Fraction) -> WBinomialBound:
    """The two-step bound C(n, αn)·α^n ≤ (α/(1−α))^{n(1−α)} at a feasible α.

    With αn integral the exponent n(1−α) is the integer n−k, so both sides
    are exact rationals and the chain is verified exactly.
    """
    alpha = Fraction(alpha)
    if not (0 < alpha < 1):
        raise ValueError("alpha must lie strictly between 0 and 1")
    k = alpha * n
    if k.denominator != 1:
        raise ValueError("alpha*n must be an integer")
    k = int(k)
    binomial_term = Fraction(math.comb(n, k)) * alpha ** n
    ratio_term = Fraction(k, n - k) ** (n - k)
    return WBinomialBound(
        n=n,
        k=k,
        alpha=alpha,
        binomial_term=binomial_term,
        ratio_term=ratio_term,
        chain_ok=binomial_term <= ratio_term,
    )


def u_vector_and_U(A: Iterable[int], model: WModel) -> tuple[list[Fraction], Fraction]:
    """Per-index hit probabilities u_i = P(i + w_i mod n ∈ A) and U = Π u_i.

    The balance identity Σ u_i = |A| holds exactly because each residue class
    receives total mass 1 across the n shifted copies of the law; U is then at
    most (|A|/n)^n by the AM-GM inequality.  Both facts are re-checked here.
    """
    n = model.n
    aset = set(A)
    if any(x < 0 or x >= n for x in aset):
        raise ValueError("A must be a subset of {0, ..., n-1}")
    u = []
    for i in range(1, n + 1):
        ui = sum((w for v, w in model.w_law.atoms if (i + v) % n in aset), Fraction(0))
        u.append(ui)
    U = math.prod(u, start=Fraction(1))
    assert sum(u, Fraction(0)) == len(aset), "balance identity must hold"
    assert U <= Fraction(len(aset), n) ** n, "product bound must hold"
    return u, U


# ---------------------------------------------------------------------------
# The rate function f_n and its monotonicity threshold c0
# ---------------------------------------------------------------------------


def f1(alpha: float) -> float:
    """(α/(1−α))^{1−α} · 2^{1/2−α} on (0, 1)."""
    return (alpha / (1.0 - alpha)) ** (1.0 - alpha) * 2.0 ** (0.5 - alpha)


def g_prime(alpha: float) -> float:
    """Derivative of log f1: -ln α + ln(1−α) + 1/α − ln 2."""
    return -math.log(alpha) + math.log(1.0 - alpha) + 1.0 / alpha - math.log(2.0)


def _bisect_c0(lo: float = 0.5, hi: float = 0.99, tol: float = 1e-9) -> float:
    flo, fhi = g_prime(lo), g_prime(hi)
    if not (flo > 0 > fhi):
        raise ValueError("bisection bracket does not straddle the root")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g_prime(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class FnAnalysis:
    n: int
    c0: float
    grid: tuple[tuple[float, float], ...]  # (alpha, f_n(alpha))

    def to_csv(self) -> str:
        lines = ["alpha,f_n"]
        for a, v in self.grid:
            lines.append(f"{a!r},{v!r}")
        return "\n".join(lines) + "\n"


def f_n_analysis(
    n: int,
    grid_size: int = 512,
    alpha_lo: float = 0.01,
    alpha_hi: float = 0.99,
    tol: float = 1e-9,
) -> FnAnalysis:
    """Tabulate f_n = f1^n on a grid and locate the monotonicity threshold c0."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (0 < alpha_lo < alpha_hi < 1):
        raise ValueError("grid must lie strictly inside (0, 1)")
    c0 = _bisect_c0(tol=tol)
    grid = []
    for i in range(grid_size):
        alpha = alpha_lo + (alpha_hi - alpha_lo) * i / max(grid_size - 1, 1)
        grid.append((alpha, f1(alpha) ** n))
    return FnAnalysis(n=n, c0=c0, grid=tuple(grid))


@dataclass(frozen=True)
class ExpectedWBound:
    n: int
    eta: Fraction
    bound: Fraction


def expected_w_lower_bound(model: WModel) -> ExpectedWBound:
    """E[W] ≥ (n/2)(1 + Σ p_k²), with η = (1/2) Σ p_k²."""
    sum_sq = sum((w * w for _, w in model.w_law.atoms), Fraction(0))
    eta = sum_sq / 2
    bound = Fraction(model.n, 2) * (1 + sum_sq)
    return ExpectedWBound(n=model.n, eta=eta, bound=bound)
