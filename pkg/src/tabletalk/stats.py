"""Numeric kernels shared by the profiler and the plan executor.

All functions assume their preconditions hold (callers surface typed errors);
sums go through ``math.fsum`` so results are independent of row order.
"""

from __future__ import annotations

import math
from typing import Sequence


def mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def sample_var(values: Sequence[float]) -> float:
    m = mean(values)
    return math.fsum((v - m) ** 2 for v in values) / (len(values) - 1)


def sample_std(values: Sequence[float]) -> float:
    return math.sqrt(sample_var(values))


def median(values: Sequence[float]) -> float:
    return quantile(values, 0.5)


def quantile(values: Sequence[float], q: float) -> float:
    """Linear-interpolation quantile over the sorted values."""
    s = sorted(values)
    pos = q * (len(s) - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    frac = pos - lo
    return s[lo] * (1 - frac) + s[hi] * frac


def value_counts(values: Sequence) -> dict:
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return counts


def modes(values: Sequence) -> list:
    """All values with the top frequency, sorted ascending."""
    counts = value_counts(values)
    top = max(counts.values())
    return sorted(v for v, n in counts.items() if n == top)


def pearson(pairs: Sequence[tuple[float, float]]) -> float:
    """Pearson r; caller guarantees >= 2 pairs and non-constant columns."""
    n = len(pairs)
    mx = math.fsum(p[0] for p in pairs) / n
    my = math.fsum(p[1] for p in pairs) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in pairs)
    sxx = math.fsum((a - mx) ** 2 for a, b in pairs)
    syy = math.fsum((b - my) ** 2 for a, b in pairs)
    r = sxy / (math.sqrt(sxx) * math.sqrt(syy))
    return max(-1.0, min(1.0, r))


def ols(pairs: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares (slope, intercept); caller guarantees x variance > 0."""
    n = len(pairs)
    mx = math.fsum(p[0] for p in pairs) / n
    my = math.fsum(p[1] for p in pairs) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in pairs)
    sxx = math.fsum((a - mx) ** 2 for a, b in pairs)
    slope = sxy / sxx
    return slope, my - slope * mx
