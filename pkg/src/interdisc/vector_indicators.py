"""Per-journal indicators computed from a single citation vector.

Gini coefficient (raw and normalized to a unit maximum) and Shannon entropy
in bits (raw and as a fraction of the local maximum log2(n)).  The population
is the vector's nonzero cells by default; zero cells can be pulled into the
Gini population for sensitivity runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Direction, JournalVector
from .errors import UndefinedIndicatorError


@dataclass
class VectorIndicatorResult:
    journal_id: int
    direction: Direction
    gini: float
    gini_normalized: float
    entropy_bits: float
    entropy_normalized: float
    support_size: int
    degenerate: bool  # support_size == 1: values defined by convention only


def _as_population(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise UndefinedIndicatorError("indicator undefined for an empty vector")
    if np.any(x < 0):
        raise UndefinedIndicatorError("citation counts must be nonnegative")
    return x


def gini_from_counts(x: np.ndarray) -> float:
    """Gini coefficient of a count vector.

    Sorts non-decreasingly and evaluates sum((2i - n - 1) * x_i) / (n * sum(x)),
    i = 1..n.  Zero for a single-element population.  Ranges over
    [0, (n-1)/n]; ties in the sort do not affect the value.
    """
    x = np.sort(_as_population(x))
    n = x.size
    if n == 1:
        return 0.0
    total = x.sum()
    if total <= 0:
        raise UndefinedIndicatorError("indicator undefined for an all-zero vector")
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(((2.0 * i - n - 1.0) * x).sum() / (n * total))


def gini_normalized_from_counts(x: np.ndarray) -> float:
    """Gini rescaled by n/(n-1) so every population size can reach 1.0."""
    x = _as_population(x)
    n = x.size
    if n == 1:
        return 0.0
    return gini_from_counts(x) * n / (n - 1.0)


def shannon_entropy_from_counts(x: np.ndarray) -> float:
    """Shannon entropy in bits of the distribution p_i = x_i / sum(x).

    Computed as log2(S) - sum(x_i*log2(x_i))/S over the nonzero entries,
    which is algebraically -sum(p*log2(p)) but keeps uniform vectors exactly
    at log2(n).
    """
    x = _as_population(x)
    x = x[x > 0]
    if x.size == 0:
        raise UndefinedIndicatorError("indicator undefined for an all-zero vector")
    if x.size == 1:
        return 0.0
    if np.all(x == x[0]):
        return float(np.log2(x.size))
    total = x.sum()
    return float(np.log2(total) - (x * np.log2(x)).sum() / total)


def entropy_normalized_from_counts(x: np.ndarray) -> float:
    """Entropy as a fraction of its local maximum log2(n); 0 when n == 1.

    Exactly 1.0 for uniform vectors of any size n >= 2.
    """
    x = _as_population(x)
    x = x[x > 0]
    n = x.size
    if n <= 1:
        return 0.0
    if np.all(x == x[0]):
        return 1.0
    return shannon_entropy_from_counts(x) / float(np.log2(n))


def _population(vec: JournalVector, include_zeros: bool) -> np.ndarray:
    if include_zeros:
        full = np.zeros(vec.length, dtype=np.float64)
        full[vec.ids] = vec.counts
        return full
    return vec.counts.astype(np.float64)


def gini(vec: JournalVector, include_zeros: bool = False) -> float:
    return gini_from_counts(_population(vec, include_zeros))


def gini_normalized(vec: JournalVector, include_zeros: bool = False) -> float:
    return gini_normalized_from_counts(_population(vec, include_zeros))


def shannon_entropy(vec: JournalVector) -> float:
    return shannon_entropy_from_counts(vec.counts)


def entropy_normalized(vec: JournalVector) -> float:
    return entropy_normalized_from_counts(vec.counts)


def compute_vector_indicators(
    vec: JournalVector, gini_include_zeros: bool = False
) -> VectorIndicatorResult:
    """All four vector indicators for one journal vector.

    Raises UndefinedIndicatorError for empty vectors; single-cell vectors get
    the conventional zeros with the degenerate flag set.
    """
    if vec.support_size == 0:
        raise UndefinedIndicatorError(
            f"journal {vec.owner_id} has no {vec.direction.value} citations"
        )
    return VectorIndicatorResult(
        journal_id=vec.owner_id,
        direction=vec.direction,
        gini=gini(vec, gini_include_zeros),
        gini_normalized=gini_normalized(vec, gini_include_zeros),
        entropy_bits=shannon_entropy(vec),
        entropy_normalized=entropy_normalized(vec),
        support_size=vec.support_size,
        degenerate=vec.support_size == 1,
    )
