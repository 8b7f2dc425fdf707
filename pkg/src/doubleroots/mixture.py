"""Decomposition of integer laws into mixtures of fair two-point laws.

Any law whose largest atom is at most 1/2 splits exactly into components of
the form (1/2)(δ_a + δ_b) with a < b.  The construction is greedy: while the
support has more than three points, peel off a two-point component built from
the heaviest and the fourth-heaviest point; a remainder on at most three
points admits a closed-form split.  Everything here is exact rational
arithmetic, so reconstruction is an identity, not an approximation.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import IntegerDistribution, format_fraction, max_atom
from .errors import MaxAtomTooLarge

__all__ = [
    "OrderedMeasure",
    "MixtureDecomposition",
    "BernoulliMixtureSampler",
    "canonical_order",
    "decompose_three",
    "extract_component",
    "decompose",
    "to_sampler",
]


@dataclass(frozen=True)
class OrderedMeasure:
    """A finite non-negative measure on ℤ in canonical order.

    Items are (point, weight) with weights non-increasing; ties are broken by
    ascending point value.  ``total`` is the measure of ℤ (not necessarily 1:
    intermediate remainders of the decomposition are deficient measures).
    """

    items: tuple[tuple[int, Fraction], ...]
    total: Fraction

    def __post_init__(self):
        weights = [w for _, w in self.items]
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be strictly positive")
        for (p1, w1), (p2, w2) in zip(self.items, self.items[1:]):
            if w1 < w2 or (w1 == w2 and p1 >= p2):
                raise ValueError("items must be sorted by weight desc, ties by point asc")
        if sum(weights, Fraction(0)) != self.total:
            raise ValueError("total must equal the sum of the weights")

    @classmethod
    def from_pairs(cls, pairs) -> "OrderedMeasure":
        items = tuple(sorted(pairs, key=lambda it: (-it[1], it[0])))
        return cls(items, sum((w for _, w in items), Fraction(0)))

    @property
    def support_size(self) -> int:
        return len(self.items)

    @property
    def in_class_m(self) -> bool:
        """Whether the top weight is at most half the total mass."""
        if not self.items:
            return True
        return self.items[0][1] * 2 <= self.total


@dataclass(frozen=True)
class MixtureDecomposition:
    """An exact mixture Σ t_i · (δ_{a_i} + δ_{b_i})/2 with Σ t_i = 1, a_i < b_i."""

    components: tuple[tuple[Fraction, int, int], ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("decomposition needs at least one component")
        for t, a, b in self.components:
            if t <= 0:
                raise ValueError("component weights must be strictly positive")
            if a >= b:
                raise ValueError("components must have a < b")
        if sum((t for t, _, _ in self.components), Fraction(0)) != 1:
            raise ValueError("component weights must sum exactly to 1")
        pairs = [(a, b) for _, a, b in self.components]
        if len(set(pairs)) != len(pairs):
            raise ValueError("duplicate component pairs must be merged")

    def reconstruct(self) -> IntegerDistribution:
        """The mixture law itself; equals the decomposed input exactly."""
        acc: dict[int, Fraction] = {}
        for t, a, b in self.components:
            acc[a] = acc.get(a, Fraction(0)) + t / 2
            acc[b] = acc.get(b, Fraction(0)) + t / 2
        return IntegerDistribution(tuple(sorted(acc.items())))

    def to_json_dict(self) -> dict:
        return {
            "components": [
                {"t": format_fraction(t), "a": a, "b": b} for t, a, b in self.components
            ]
        }


@dataclass(frozen=True)
class BernoulliMixtureSampler:
    """Sampling form of a mixture: rows (probability, base I, gap Δ ≥ 1).

    Drawing a row (I, Δ) and an independent fair bit B yields I + B·Δ, which
    reproduces the source law exactly.  Row selection uses exact integer
    thresholds over a common denominator, never float weights.
    """

    rows: tuple[tuple[Fraction, int, int], ...]

    def __post_init__(self):
        if not self.rows:
            raise ValueError("sampler needs at least one row")
        for t, _, delta in self.rows:
            if t <= 0:
                raise ValueError("row probabilities must be strictly positive")
            if delta < 1:
                raise ValueError("gaps must be at least 1")
        if sum((t for t, _, _ in self.rows), Fraction(0)) != 1:
            raise ValueError("row probabilities must sum exactly to 1")
        denom = math.lcm(*(t.denominator for t, _, _ in self.rows))
        cums, acc = [], 0
        for t, _, _ in self.rows:
            acc += int(t * denom)
            cums.append(acc)
        object.__setattr__(self, "_cums", cums)
        object.__setattr__(self, "_denom", denom)

    def sample(self, rng) -> int:
        """Draw one value: pick a row by exact thresholds, then add B·Δ."""
        if len(self.rows) == 1:
            _, base, delta = self.rows[0]
        else:
            i = bisect.bisect_right(self._cums, rng.randrange(self._denom))
            _, base, delta = self.rows[i]
        return base + rng.getrandbits(1) * delta

    def sample_many(self, rng, k: int) -> list[int]:
        return [self.sample(rng) for _ in range(k)]


def canonical_order(dist: IntegerDistribution) -> OrderedMeasure:
    """Order the atoms by weight descending, ties by point ascending."""
    return OrderedMeasure.from_pairs(dist.atoms)


def decompose_three(m: OrderedMeasure) -> MixtureDecomposition:
    """Closed-form split of a normalized measure on ≤ 3 points.

    With ordered weights w1 ≥ w2 ≥ w3 on points π1, π2, π3 the components are
    (w1+w2−w3) on {π1,π2}, (w1+w3−w2) on {π1,π3}, (w2+w3−w1) on {π2,π3};
    zero-weight components are dropped.  A two-point input is the w3 = 0 case.
    """
    if m.support_size > 3:
        raise ValueError("support size must be at most 3")
    if m.total != 1:
        raise ValueError("measure must be normalized")
    if not m.in_class_m:
        raise MaxAtomTooLarge("top weight exceeds half the total mass")
    points = [p for p, _ in m.items]
    weights = [w for _, w in m.items]
    while len(weights) < 3:
        weights.append(Fraction(0))
    w1, w2, w3 = weights
    raw = [(w1 + w2 - w3, 0, 1), (w1 + w3 - w2, 0, 2), (w2 + w3 - w1, 1, 2)]
    components = []
    for t, i, j in raw:
        if t == 0:
            continue
        a, b = sorted((points[i], points[j]))
        components.append((t, a, b))
    return MixtureDecomposition(tuple(sorted(components, key=lambda c: (c[1], c[2]))))


def extract_component(
    m: OrderedMeasure,
) -> tuple[tuple[Fraction, int, int], OrderedMeasure]:
    """Peel one two-point component off a measure with support size ≥ 4.

    The component puts the fourth-largest weight w4 at each of π1 and π4 and
    carries total mass 2·w4; the remainder stays in the half-mass class, drops
    π4 entirely, and has strictly smaller support.
    """
    if m.support_size < 4:
        raise ValueError("support size must be at least 4")
    if not m.in_class_m:
        raise MaxAtomTooLarge("top weight exceeds half the total mass")
    pi1, _ = m.items[0]
    pi4, w4 = m.items[3]
    rest_pairs = []
    for p, w in m.items:
        if p == pi1:
            w = w - w4
        elif p == pi4:
            continue
        if w > 0:
            rest_pairs.append((p, w))
    rest = OrderedMeasure.from_pairs(rest_pairs)
    a, b = sorted((pi1, pi4))
    return (2 * w4, a, b), rest


def decompose(dist: IntegerDistribution) -> MixtureDecomposition:
    """Split a law with max atom ≤ 1/2 into an exact mixture of fair pairs.

    Raises MaxAtomTooLarge when the necessary condition fails (no such
    mixture exists then).  Components are merged per pair and emitted sorted
    by (a, b) so the output is canonical.
    """
    if max_atom(dist) > Fraction(1, 2):
        raise MaxAtomTooLarge(
            f"max atom {format_fraction(max_atom(dist))} exceeds 1/2; no Bernoulli mixture exists"
        )
    m = canonical_order(dist)
    acc: dict[tuple[int, int], Fraction] = {}
    while m.support_size > 3:
        (t, a, b), m = extract_component(m)
        acc[(a, b)] = acc.get((a, b), Fraction(0)) + t
    remaining = m.total
    if remaining > 0:
        normalized = OrderedMeasure(
            tuple((p, w / remaining) for p, w in m.items), Fraction(1)
        )
        for t, a, b in decompose_three(normalized).components:
            acc[(a, b)] = acc.get((a, b), Fraction(0)) + t * remaining
    components = tuple((t, a, b) for (a, b), t in sorted(acc.items()))
    return MixtureDecomposition(components)


def to_sampler(d: MixtureDecomposition) -> BernoulliMixtureSampler:
    """Rows (t, I = a, Δ = b − a) of the base-plus-fair-bit representation."""
    return BernoulliMixtureSampler(tuple((t, a, b - a) for t, a, b in d.components))
