"""Exact-arithmetic domain types: integer laws, integer polynomials, sparse PMFs.

Probabilities are `fractions.Fraction` end to end.  Floating point only enters
downstream, in the numeric root finder and in Monte Carlo estimators; every
identity in this module is exact and therefore testable as a binary predicate.

All three types are immutable after construction and safe to share across
threads; the operations on them are pure functions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "IntegerDistribution",
    "IntPolynomial",
    "SparsePMF",
    "max_atom",
    "evaluate",
    "derivative",
    "multiply",
    "format_fraction",
    "parse_fraction",
]


def format_fraction(q: Fraction) -> str:
    """Render a rational as the canonical "num/den" string ("3" for integers)."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str | int) -> Fraction:
    """Parse "num/den", a decimal string, or an int into an exact rational."""
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(text.strip())


# ---------------------------------------------------------------------------
# Integer distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegerDistribution:
    """A finitely supported probability law on the integers with exact weights.

    ``atoms`` is a tuple of (value, weight) pairs sorted by value; weights are
    strictly positive Fractions summing exactly to 1.
    """

    atoms: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("distribution needs at least one atom")
        values = [v for v, _ in self.atoms]
        if any(not isinstance(v, int) for v in values):
            raise ValueError("atom values must be integers")
        if values != sorted(values) or len(set(values)) != len(values):
            raise ValueError("atom values must be distinct and sorted ascending")
        weights = [w for _, w in self.atoms]
        if any(not isinstance(w, Fraction) for w in weights):
            raise ValueError("atom weights must be Fractions")
        if any(w <= 0 for w in weights):
            raise ValueError("atom weights must be strictly positive")
        if sum(weights) != 1:
            raise ValueError("atom weights must sum exactly to 1")

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, Fraction | str | int]) -> "IntegerDistribution":
        atoms = tuple(
            sorted((int(v), parse_fraction(w) if not isinstance(w, Fraction) else w)
                   for v, w in mapping.items())
        )
        return cls(atoms)

    @classmethod
    def rademacher(cls) -> "IntegerDistribution":
        """Uniform on {-1, +1}."""
        return cls(((-1, Fraction(1, 2)), (1, Fraction(1, 2))))

    @classmethod
    def uniform_range(cls, lo: int, hi: int) -> "IntegerDistribution":
        """Uniform on the integer interval [lo, hi]."""
        if hi < lo:
            raise ValueError("empty range")
        n = hi - lo + 1
        return cls(tuple((v, Fraction(1, n)) for v in range(lo, hi + 1)))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.atoms)

    @property
    def max_abs_value(self) -> int:
        """Radius of the support: max |v| over atoms."""
        return max(abs(v) for v, _ in self.atoms)

    def weight(self, value: int) -> Fraction:
        for v, w in self.atoms:
            if v == value:
                return w
        return Fraction(0)

    def integer_weights(self) -> tuple[tuple[int, ...], tuple[int, ...], int]:
        """Return (values, numerators, common denominator) with Σ num == denom."""
        denom = math.lcm(*(w.denominator for _, w in self.atoms))
        values = tuple(v for v, _ in self.atoms)
        nums = tuple(int(w * denom) for _, w in self.atoms)
        return values, nums, denom

    def sample(self, rng) -> int:
        """Draw one value; exact thresholds, deterministic given the rng state."""
        values, nums, denom = self.integer_weights()
        r = rng.randrange(denom)
        acc = 0
        for v, c in zip(values, nums):
            acc += c
            if r < acc:
                return v
        raise AssertionError("unreachable: weights sum to the denominator")

    def sample_many(self, rng, k: int) -> list[int]:
        values, nums, denom = self.integer_weights()
        cums = []
        acc = 0
        for c in nums:
            acc += c
            cums.append(acc)
        return rng.choices(values, cum_weights=cums, k=k)


def max_atom(dist: IntegerDistribution) -> Fraction:
    """The largest probability the law assigns to a single integer."""
    return max(w for _, w in dist.atoms)


# ---------------------------------------------------------------------------
# Integer polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial; ``coeffs[j]`` multiplies x**j.

    Canonical form: no trailing zeros, so the zero polynomial is the empty
    tuple and ``degree`` is the true degree (-1 for the zero polynomial).
    """

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if any(not isinstance(c, int) for c in self.coeffs):
            raise ValueError("coefficients must be integers")
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError("coefficients must be in canonical form (no trailing zeros)")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int]) -> "IntPolynomial":
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        return cls(tuple(int(c) for c in cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading_coefficient(self) -> int:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coefficient(self, j: int) -> int:
        """Coefficient of x**j, zero beyond the degree."""
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return 0


def evaluate(p: IntPolynomial, x: int) -> int:
    """Exact value of p at the integer x (Horner)."""
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def derivative(p: IntPolynomial) -> IntPolynomial:
    """Formal derivative with exact integer coefficients."""
    return IntPolynomial.from_coeffs(j * c for j, c in enumerate(p.coeffs) if j >= 1)


def multiply(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    """Schoolbook product; used to build structured test inputs downstream."""
    if p.is_zero or q.is_zero:
        return IntPolynomial(())
    out = [0] * (len(p.coeffs) + len(q.coeffs) - 1)
    for i, a in enumerate(p.coeffs):
        if a == 0:
            continue
        for j, b in enumerate(q.coeffs):
            out[i + j] += a * b
    return IntPolynomial.from_coeffs(out)


# ---------------------------------------------------------------------------
# Sparse probability mass functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SparsePMF:
    """Exact law of an integer-valued random variable: value -> Fraction.

    Entries are strictly positive and sum exactly to 1.  Treat instances as
    immutable; the entries dict must not be mutated after construction.
    """

    entries: dict[int, Fraction]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("pmf needs at least one entry")
        if any(p <= 0 for p in self.entries.values()):
            raise ValueError("probabilities must be strictly positive")
        if sum(self.entries.values()) != 1:
            raise ValueError("probabilities must sum exactly to 1")

    @classmethod
    def from_integer_weights(cls, weights: Mapping[int, int], denom: int) -> "SparsePMF":
        """Build from integer weights over a common denominator (must sum to it)."""
        if denom <= 0:
            raise ValueError("denominator must be positive")
        pos = {int(v): c for v, c in weights.items() if c != 0}
        if any(c < 0 for c in pos.values()):
            raise ValueError("weights must be non-negative")
        if sum(pos.values()) != denom:
            raise ValueError("weights must sum to the denominator")
        entries = {v: Fraction(c, denom) for v, c in pos.items()}
        obj = cls.__new__(cls)
        object.__setattr__(obj, "entries", entries)
        return obj

    @classmethod
    def from_distribution(cls, dist: IntegerDistribution) -> "SparsePMF":
        return cls(dict(dist.atoms))

    @classmethod
    def point_mass(cls, value: int) -> "SparsePMF":
        return cls({value: Fraction(1)})

    def prob(self, value: int) -> Fraction:
        return self.entries.get(value, Fraction(0))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.entries))

    def convolve(self, other: "SparsePMF") -> "SparsePMF":
        """Exact law of the sum of two independent variables."""
        out: dict[int, Fraction] = {}
        for v, p in self.entries.items():
            for w, q in other.entries.items():
                key = v + w
                out[key] = out.get(key, Fraction(0)) + p * q
        return SparsePMF(out)

    def shift_scale(self, scale: int, shift: int = 0) -> "SparsePMF":
        """Exact law of scale*X + shift."""
        if scale == 0:
            return SparsePMF.point_mass(shift)
        return SparsePMF({v * scale + shift: p for v, p in self.entries.items()})


# ---------------------------------------------------------------------------
# Canonical JSON serialization (golden tests and the CLI rely on this form)
# ---------------------------------------------------------------------------


def distribution_to_json_dict(dist: IntegerDistribution) -> dict:
    return {"atoms": [[v, format_fraction(w)] for v, w in dist.atoms]}


def distribution_from_json_dict(data: Mapping) -> IntegerDistribution:
    return IntegerDistribution(tuple((int(v), parse_fraction(w)) for v, w in data["atoms"]))


def polynomial_to_json_dict(p: IntPolynomial) -> dict:
    return {"coeffs": [str(c) for c in p.coeffs]}


def polynomial_from_json_dict(data: Mapping) -> IntPolynomial:
    return IntPolynomial.from_coeffs(int(c) for c in data["coeffs"])


def pmf_to_json_dict(pmf: SparsePMF) -> dict:
    return {"entries": [[str(v), format_fraction(pmf.entries[v])] for v in sorted(pmf.entries)]}


def pmf_from_json_dict(data: Mapping) -> SparsePMF:
    return SparsePMF({int(v): parse_fraction(p) for v, p in data["entries"]})


def to_canonical_json(data: Mapping) -> str:
    """Deterministic JSON rendering: sorted keys, fixed separators."""
    return json.dumps(data, sort_keys=True, indent=2)
