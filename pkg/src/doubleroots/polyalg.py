"""Root machinery: exact multiple-root detection, numeric roots, power sums.

Multiple-root detection never touches floating point: the degree of
gcd(p, p') over the rationals is read off an integer pseudo-remainder
sequence with primitive reduction at every step.  The numeric side (root
locations, house, root counting) is a damped Aberth-Ehrlich iteration with
deterministic initialization, so repeated runs are bit-identical.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import IntPolynomial, derivative, evaluate
from .errors import DomainError, NonConverged

__all__ = [
    "RootSet",
    "PowerSums",
    "JensenCheck",
    "has_multiple_root",
    "double_root_at",
    "roots_complex",
    "house",
    "count_roots_modulus_ge",
    "jensen_check",
    "power_sums",
    "separation_check",
    "is_root_of_unity",
    "divisible_by_square",
    "off_circle_root_bound",
]


# ---------------------------------------------------------------------------
# Exact gcd degree over Q via integer pseudo-remainders
# ---------------------------------------------------------------------------


def _trimmed(cs: list[int]) -> list[int]:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _primitive(cs: list[int]) -> list[int]:
    g = 0
    for c in cs:
        g = math.gcd(g, c)
        if g == 1:
            return cs
    return [c // g for c in cs]


def _pseudo_remainder(f: list[int], g: list[int]) -> list[int]:
    """Remainder of lc(g)^k · f by g in Z[x]; only its degree sequence matters here."""
    r = list(f)
    dg = len(g) - 1
    lg = g[-1]
    while len(r) - 1 >= dg and r:
        lr = r[-1]
        shift = len(r) - 1 - dg
        r = [lg * c for c in r]
        for i, gc in enumerate(g):
            r[shift + i] -= lr * gc
        _trimmed(r)
    return r


def _gcd_degree(f: list[int], g: list[int]) -> int:
    """Degree of gcd(f, g) over Q for nonzero integer polynomials."""
    f = _primitive(_trimmed(list(f)))
    g = _primitive(_trimmed(list(g)))
    if len(f) < len(g):
        f, g = g, f
    while True:
        r = _pseudo_remainder(f, g)
        if not r:
            return len(g) - 1
        if len(r) == 1:
            return 0
        f, g = g, _primitive(r)


def _int_gcd(f: list[int], g: list[int]) -> list[int]:
    """Primitive gcd of two nonzero integer polynomials (sign-normalized)."""
    f = _primitive(_trimmed(list(f)))
    g = _primitive(_trimmed(list(g)))
    if len(f) < len(g):
        f, g = g, f
    while True:
        r = _pseudo_remainder(f, g)
        if not r:
            break
        if len(r) == 1:
            g = [1]
            break
        f, g = g, _primitive(r)
    if g[-1] < 0:
        g = [-c for c in g]
    return g


def _exact_quotient(f: list[int], g: list[int]) -> list[int]:
    """Primitive integer quotient of f by a divisor g (division over Q is exact)."""
    num = [Fraction(c) for c in f]
    dg = len(g) - 1
    lead = Fraction(g[-1])
    q = [Fraction(0)] * (len(f) - dg)
    while len(num) - 1 >= dg and any(num):
        shift = len(num) - 1 - dg
        coef = num[-1] / lead
        q[shift] = coef
        for i, gc in enumerate(g):
            num[shift + i] -= coef * gc
        while num and num[-1] == 0:
            num.pop()
    if any(num):
        raise ValueError("polynomial division was not exact")
    den = math.lcm(*(c.denominator for c in q)) if q else 1
    return _primitive([int(c * den) for c in q])


def _squarefree_part(coeffs: Sequence[int]) -> list[int]:
    """Primitive squarefree part f / gcd(f, f'); same roots, all simple."""
    cs = _primitive(_trimmed(list(coeffs)))
    if len(cs) <= 2:
        return cs
    dcs = _trimmed([i * c for i, c in enumerate(cs)][1:])
    g = _int_gcd(cs, dcs)
    if len(g) == 1:
        return cs
    return _exact_quotient(cs, g)


def has_multiple_root(p: IntPolynomial) -> bool:
    """Whether p has a multiple complex root: deg gcd(p, p') ≥ 1, decided exactly."""
    if p.is_zero:
        raise ValueError("zero polynomial")
    if p.degree <= 1:
        return False
    return _gcd_degree(list(p.coeffs), list(derivative(p).coeffs)) >= 1


def double_root_at(p: IntPolynomial, x0: int) -> bool:
    """Whether x0 ∈ {0, -1, +1} is a double root of p (exact integer arithmetic)."""
    if p.is_zero:
        raise ValueError("zero polynomial")
    if x0 == 0:
        return p.coefficient(0) == 0 and p.coefficient(1) == 0
    if x0 in (-1, 1):
        return evaluate(p, x0) == 0 and evaluate(derivative(p), x0) == 0
    raise ValueError("only 0, -1, +1 are supported")


# ---------------------------------------------------------------------------
# Numeric roots: Aberth-Ehrlich with deterministic initialization
# ---------------------------------------------------------------------------

_INIT_PHASE = 0.4  # radians; fixed so runs are reproducible bit-for-bit


def _aberth(coeffs: Sequence[float], tol: float, max_iter: int):
    """All roots of a float polynomial (ascending coeffs, nonzero lead/tail).

    Returns (roots, scaled residual, iterations); does not raise.
    """
    c = np.asarray(coeffs, dtype=np.float64)
    d = len(c) - 1
    cr = c[::-1]
    dcr = (c[1:] * np.arange(1, d + 1))[::-1]
    lead = abs(c[-1])
    radius = 1.05 * (1.0 + max(abs(c[:-1])) / lead)
    angles = 2.0 * np.pi * np.arange(d) / d + _INIT_PHASE
    z = radius * np.exp(1j * angles)
    abs_c = np.abs(c)
    powers = np.arange(d + 1)

    def residual(zs: np.ndarray) -> float:
        pv = np.abs(np.polyval(cr, zs))
        scale = (np.maximum(1.0, np.abs(zs))[:, None] ** powers[None, :]) @ abs_c
        return float(np.max(pv / scale))

    res = residual(z)
    it = 0
    for it in range(1, max_iter + 1):
        pv = np.polyval(cr, z)
        dv = np.polyval(dcr, z)
        dv = np.where(dv == 0, 1e-300, dv)
        w = pv / dv
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = (1.0 / diff).sum(axis=1)
        denom = 1.0 - w * s
        denom = np.where(denom == 0, 1e-300, denom)
        step = w / denom
        z = z - step
        # keep polishing past the residual tolerance until the steps stall
        if np.max(np.abs(step) / (1.0 + np.abs(z))) < 1e-15:
            break
    res = residual(z)
    return z, res, it


def _max_root_modulus_small(coeffs: Sequence[float], step_tol: float = 1e-12, max_iter: int = 120) -> float:
    """Max root modulus for small degrees without numpy overhead.

    Closed forms for degrees 1-2, a plain-Python Aberth loop above; built for
    the census inner loop where the polynomial degree is at most ~10.
    """
    cs = list(coeffs)
    while cs and cs[0] == 0.0:
        cs.pop(0)
    d = len(cs) - 1
    if d <= 0:
        return 0.0
    if d == 1:
        return abs(cs[0] / cs[1])
    if d == 2:
        c, b, a = cs
        disc = cmath.sqrt(b * b - 4.0 * a * c)
        return max(abs((-b + disc) / (2.0 * a)), abs((-b - disc) / (2.0 * a)))
    lead = abs(cs[-1])
    radius = 1.05 * (1.0 + max(abs(c) for c in cs[:-1]) / lead)
    z = [radius * cmath.exp(1j * (2.0 * math.pi * i / d + _INIT_PHASE)) for i in range(d)]
    dcs = [i * cs[i] for i in range(1, d + 1)]
    rcs = cs[::-1]
    rdcs = dcs[::-1]
    for _ in range(max_iter):
        moved = 0.0
        for i in range(d):
            zi = z[i]
            pv = 0j
            for c in rcs:
                pv = pv * zi + c
            dv = 0j
            for c in rdcs:
                dv = dv * zi + c
            if dv == 0:
                dv = 1e-300
            w = pv / dv
            s = 0j
            for jj in range(d):
                if jj != i:
                    diff = zi - z[jj]
                    if diff == 0:
                        diff = 1e-300
                    s += 1.0 / diff
            denom = 1.0 - w * s
            if denom == 0:
                denom = 1e-300
            step = w / denom
            z[i] = zi - step
            rel = abs(step) / (1.0 + abs(z[i]))
            if rel > moved:
                moved = rel
        if moved < step_tol:
            break
    return max(abs(zi) for zi in z)


@dataclass(frozen=True)
class RootSet:
    """Numeric roots with multiplicity estimates and a scaled residual.

    residual is max |p(z)| / Σ_j |c_j| max(1,|z|)^j over the returned roots;
    multiplicities come from greedy clustering at the given radius.
    """

    roots: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    residual: float
    iterations: int

    @property
    def moduli(self) -> tuple[float, ...]:
        return tuple(abs(z) for z in self.roots)


def _cluster_multiplicities(roots: Sequence[complex], radius: float) -> tuple[int, ...]:
    mult = []
    for z in roots:
        mult.append(sum(1 for w in roots if abs(z - w) <= radius * (1.0 + abs(z))))
    return tuple(mult)


def roots_complex(
    p: IntPolynomial,
    tol: float = 1e-10,
    max_iter: int = 200,
    cluster_radius: float = 1e-6,
) -> RootSet:
    """All complex roots of p, or NonConverged if the residual stays above tol."""
    if p.is_zero or p.degree < 1:
        raise ValueError("need a polynomial of degree at least 1")
    cs = list(p.coeffs)
    zeros_at_origin = 0
    while cs[0] == 0:
        cs.pop(0)
        zeros_at_origin += 1
    if len(cs) == 1:
        roots: list[complex] = []
        res = 0.0
        iters = 0
    else:
        z, res, iters = _aberth([float(c) for c in cs], tol=tol, max_iter=max_iter)
        order = np.lexsort((z.imag, z.real))
        roots = [complex(z[i]) for i in order]
        if res > tol:
            raise NonConverged(
                f"residual {res:.3e} above tolerance {tol:.3e} after {iters} iterations",
                residual=res,
            )
    all_roots = tuple([0j] * zeros_at_origin + roots)
    return RootSet(
        roots=all_roots,
        multiplicities=_cluster_multiplicities(all_roots, cluster_radius),
        residual=res,
        iterations=iters,
    )


def house(p: IntPolynomial, tol: float = 1e-10) -> float:
    """Maximum root modulus of p (degree ≥ 1)."""
    return max(roots_complex(p, tol=tol).moduli)


def count_roots_modulus_ge(
    p: IntPolynomial, r: float = 1.5, tol: float = 1e-10
) -> int:
    """Number of roots with modulus ≥ r; moduli within tol of r count as ≥."""
    rs = roots_complex(p, tol=tol)
    return sum(1 for m in rs.moduli if m >= r - tol)


@dataclass(frozen=True)
class JensenCheck:
    count: int
    bound: int
    passed: bool


def jensen_check(p: IntPolynomial, M: int, r: float = 1.5, tol: float = 1e-10) -> JensenCheck:
    """Check that at most 64·M roots have modulus ≥ 3/2 when all |coeffs| ≤ M."""
    if M < 1:
        raise ValueError("M must be at least 1")
    if any(abs(c) > M for c in p.coeffs):
        raise ValueError("all coefficients must be bounded by M in absolute value")
    count = count_roots_modulus_ge(p, r=r, tol=tol)
    return JensenCheck(count=count, bound=64 * M, passed=count <= 64 * M)


# ---------------------------------------------------------------------------
# Power sums and the separation identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerSums:
    """S_1..S_k, where S_j is the sum of j-th powers of all roots (exact)."""

    sums: tuple[Fraction, ...]

    def S(self, k: int) -> Fraction:
        return self.sums[k - 1]


def power_sums(p: IntPolynomial, upto: int) -> PowerSums:
    """S_1..S_upto via the Newton recursion on coefficients; no root finding.

    Coefficients enter in descending order a_0 = lc, ..., a_d = constant:
    a_0 S_k + a_1 S_{k-1} + ... + a_{k-1} S_1 + k a_k = 0.
    """
    d = p.degree
    if d < 1:
        raise ValueError("need degree at least 1")
    if not (1 <= upto <= d):
        raise ValueError("k must satisfy 1 <= k <= degree")
    a = [p.coefficient(d - i) for i in range(d + 1)]  # descending
    sums: list[Fraction] = []
    for k in range(1, upto + 1):
        acc = Fraction(k * a[k])
        for i in range(1, k):
            acc += a[i] * sums[k - i - 1]
        sums.append(-acc / a[0])
    return PowerSums(sums=tuple(sums))


def separation_check(f: IntPolynomial, g: IntPolynomial, k: int) -> Fraction:
    """|S_k(f) − S_k(g)| for polynomials first differing at descending index k.

    Requires equal degree, equal leading coefficient, agreement on all
    coefficients above index k, and disagreement at k.  Verifies the identity
    |S_k(f) − S_k(g)| = k|a_k − b_k| / a_0 and S_i(f) = S_i(g) for i < k.
    """
    d = f.degree
    if d < 1 or g.degree != d:
        raise ValueError("polynomials must share a degree of at least 1")
    if not (1 <= k <= d):
        raise ValueError("k must satisfy 1 <= k <= degree")
    fa = [f.coefficient(d - i) for i in range(d + 1)]
    ga = [g.coefficient(d - i) for i in range(d + 1)]
    if fa[0] != ga[0]:
        raise ValueError("leading coefficients must agree")
    if fa[:k] != ga[:k]:
        raise ValueError(f"coefficients above index {k} must agree")
    if fa[k] == ga[k]:
        raise ValueError(f"coefficients at index {k} must differ")
    sf = power_sums(f, k)
    sg = power_sums(g, k)
    for i in range(1, k):
        if sf.S(i) != sg.S(i):
            raise AssertionError("lower power sums must agree")
    diff = abs(sf.S(k) - sg.S(k))
    expected = Fraction(k * abs(fa[k] - ga[k]), fa[0])
    if diff != expected:
        raise AssertionError("separation identity violated")
    return diff


# ---------------------------------------------------------------------------
# Roots of unity, squared divisors, off-circle root probability bound
# ---------------------------------------------------------------------------


def _poly_remainder_x_power(p: IntPolynomial, kmax: int):
    """Yield (k, x^k mod p) over Q for k = 1..kmax."""
    d = p.degree
    lead = Fraction(p.coefficient(d))
    r = [Fraction(0), Fraction(1)]  # the polynomial x
    for k in range(1, kmax + 1):
        if k > 1:
            r = [Fraction(0)] + r  # multiply by x
        while len(r) - 1 >= d:
            factor = r[-1] / lead
            for i in range(d + 1):
                r[len(r) - 1 - d + i] -= factor * p.coefficient(i)
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        yield k, r


def is_root_of_unity(p: IntPolynomial, kmax: int = 120) -> tuple[bool, int | None]:
    """Whether p divides x^k − 1 for some k ≤ kmax; returns the minimal such k.

    Division is tested exactly over the rationals, so non-monic inputs are
    handled (e.g. 2x − 2 divides x − 1 up to a rational unit).
    """
    if p.is_zero or p.degree < 1:
        raise ValueError("need a polynomial of degree at least 1")
    for k, r in _poly_remainder_x_power(p, kmax):
        if r == [Fraction(1)]:
            return True, k
    return False, None


def divisible_by_square(value: int, k: int) -> bool:
    """Whether k² divides value (0 is divisible by everything)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return value % (k * k) == 0


def off_circle_root_bound(abs_alpha: float, M: int, n: int) -> float:
    """exp(-n ln2 / ℓ) with ℓ = ⌈log(M+1)/|log|α||⌉, for |α| ≠ 1.

    Bounds the probability that a fixed point off the unit circle is a root
    of a random polynomial with coefficients bounded by M.
    """
    if abs_alpha <= 0:
        raise ValueError("|alpha| must be positive")
    if abs_alpha == 1:
        raise DomainError("the bound is vacuous on the unit circle")
    if M < 1 or n < 1:
        raise ValueError("M and n must be at least 1")
    ratio = math.log(M + 1) / abs(math.log(abs_alpha))
    ell = math.ceil(ratio - 1e-12)
    return math.exp(-n * math.log(2.0) / ell)
