"""Exact k-medoids by enumerating every K-subset of points."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import sum_of_errors
from .errors import CapacityError, ConfigError

#: Hard limit on C(n, K).
MAX_SUBSETS = 10_000_000

_CHUNK = 4096


@dataclass
class OracleResult:
    best_se: float
    best_medoids: list
    enumerated: int


def exhaustive_kmedoids(m: np.ndarray, K: int, max_subsets: int = MAX_SUBSETS) -> OracleResult:
    """Global optimum of the sum of errors over all K-subsets.

    Every optimal subset is returned, in lexicographic order. Subsets are
    screened in vectorised chunks and near-best ones re-scored with
    :func:`sum_of_errors`, so the reported ties are exact.
    """
    n = m.shape[0]
    if not 1 <= K <= n:
        raise ConfigError(f"K must lie in [1, {n}], got {K}")
    count = math.comb(n, K)
    if count > max_subsets:
        raise CapacityError(f"C({n}, {K}) = {count} subsets exceeds the limit of {max_subsets}")

    screened = []
    approx_best = math.inf
    combos = itertools.combinations(range(n), K)
    enumerated = 0
    while True:
        chunk = np.array(list(itertools.islice(combos, _CHUNK)), dtype=np.intp)
        if chunk.size == 0:
            break
        enumerated += len(chunk)
        # (n, chunk, K) -> per-subset SE
        se = m[:, chunk].min(axis=2).sum(axis=0)
        low = se.min()
        slack = 1e-9 * max(1.0, abs(low))
        if low < approx_best + slack:
            approx_best = min(approx_best, low)
            screened = [c for c in screened if c[0] <= approx_best + slack]
            keep = np.flatnonzero(se <= approx_best + slack)
            screened.extend((se[i], tuple(int(x) for x in chunk[i])) for i in keep)

    exact = [(sum_of_errors(m, subset), subset) for _, subset in screened]
    best = min(value for value, _ in exact)
    optima = [list(subset) for value, subset in exact if value == best]
    return OracleResult(best_se=best, best_medoids=optima, enumerated=enumerated)
