"""Exact-arithmetic toolkit for double roots of random integer polynomials.

The package splits into five layers: exact domain types (`core`), the
two-point mixture decomposition (`mixture`), exact evaluation laws and the
W statistic (`anticoncentration`), root machinery (`polyalg`), and end-to-end
experiments with a CLI front end (`experiments`, `cli`).
"""

from .core import (
    IntegerDistribution,
    IntPolynomial,
    SparsePMF,
    derivative,
    evaluate,
    max_atom,
    multiply,
)
from .errors import (
    BudgetExceeded,
    DomainError,
    DoubleRootsError,
    MaxAtomTooLarge,
    NonConverged,
    ZeroInput,
)
from .mixture import (
    BernoulliMixtureSampler,
    MixtureDecomposition,
    OrderedMeasure,
    canonical_order,
    decompose,
    decompose_three,
    extract_component,
    to_sampler,
)

__version__ = "0.1.0"

__all__ = [
    "IntegerDistribution",
    "IntPolynomial",
    "SparsePMF",
    "max_atom",
    "evaluate",
    "derivative",
    "multiply",
    "OrderedMeasure",
    "MixtureDecomposition",
    "BernoulliMixtureSampler",
    "canonical_order",
    "decompose_three",
    "extract_component",
    "decompose",
    "to_sampler",
    "DoubleRootsError",
    "MaxAtomTooLarge",
    "BudgetExceeded",
    "NonConverged",
    "ZeroInput",
    "DomainError",
    "__version__",
]
