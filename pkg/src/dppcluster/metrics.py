"""External agreement measures between two labelings."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateData, ShapeMismatch

__all__ = ["ContingencyTable", "contingency", "ari", "rn"]


@dataclass(frozen=True)
class ContingencyTable:
    """Cross-tabulation of two labelings over the same n observations."""

    counts: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    n: int


def contingency(labels_a, labels_b) -> ContingencyTable:
    a = np.asarray(labels_a).ravel()
    b = np.asarray(labels_b).ravel()
    if a.shape != b.shape:
        raise ShapeMismatch(f"label lengths differ: {a.size} vs {b.size}")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    ka = int(ia.max()) + 1
    kb = int(ib.max()) + 1
    counts = np.bincount(ia * kb + ib, minlength=ka * kb).reshape(ka, kb)
    return ContingencyTable(counts, counts.sum(axis=1), counts.sum(axis=0), int(a.size))


def _pairs(c) -> int:
    c = int(c)
    return c * (c - 1) // 2


def ari(labels_a, labels_b) -> float:
    """Adjusted Rand index, exactly 1.0 iff the labelings are identical up
    to renaming.

    All pair counts use Python integers before the single final division, so
    the value is exact for any n.  Returns 1.0 in the degenerate case where
    the chance-adjusted denominator vanishes (e.g. both labelings are a
    single cluster, or both are all singletons).
    """
    t = contingency(labels_a, labels_b)
    if t.n < 2:
        raise DegenerateData("need at least two observations")
    sum_ij = sum(_pairs(c) for c in t.counts.flat)
    a = sum(_pairs(c) for c in t.row_sums)
    b = sum(_pairs(c) for c in t.col_sums)
    total = _pairs(t.n)
    num = 2 * (total * sum_ij - a * b)
    den = total * (a + b) - 2 * a * b
    if den == 0:
        return 1.0
    return num / den


def rn(g_hat: int, g_true: int) -> float:
    """Relative square-root difference between estimated and true cluster
    counts; positive iff g_hat > g_true.  Reporting uses the absolute value.
    """
    if g_hat < 1 or g_true < 1:
        raise ConfigError("cluster counts must be at least 1")
    return (math.sqrt(g_hat) - math.sqrt(g_true)) / math.sqrt(g_true)
