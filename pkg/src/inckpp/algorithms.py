"""Seeding and local-search procedures for the k-medoids problem.

Every function works on a precomputed dissimilarity matrix ``m``. Stochastic
procedures take a ``numpy.random.Generator`` (see :func:`inckpp.core.make_rng`)
and are deterministic given its state.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial.distance import cdist

from .core import ClusteringResult, Dataset, METRICS, check_medoids, make_rng, nearest, total
from .errors import CandidateSetTooSmallError, ConfigError, DegenerateDistributionError

#: Safety net for FKM; float cycling is the only way to reach it.
FKM_MAX_ITER = 500

#: Stretch factors swept when INCKM is benchmarked.
LAMBDA_SWEEP = tuple(round(1.5 + 0.1 * k, 1) for k in range(11))


def _check_k(K, n):
    if not 1 <= K <= n:
        raise ConfigError(f"K must lie in [1, {n}], got {K}")


def fkm(m: np.ndarray, initial, max_iter: int = FKM_MAX_ITER) -> ClusteringResult:
    """Simple and fast k-medoids local search from ``initial`` medoids.

    Alternates nearest-medoid assignment with replacing each cluster's
    medoid by the member with the smallest total distance to the other
    members, until the SE stops changing. A cluster left empty keeps its
    medoid, and an incumbent medoid is kept when it ties for the minimum.
    """
    medoids = check_medoids(initial, m.shape[0]).copy()
    owner, dist = nearest(m, medoids)
    se = total(dist)
    result = ClusteringResult(medoids=[], owner=owner, se=se, iterations=0,
                              history=[se], initial=medoids.tolist())
    while result.iterations < max_iter:
        result.iterations += 1
        updated = medoids.copy()
        for j, current in enumerate(medoids):
            members = np.flatnonzero(owner == j)
            if members.size == 0:
                continue
            cost = m[np.ix_(members, members)].sum(axis=1)
            best = int(np.argmin(cost))
            here = np.flatnonzero(members == current)
            if here.size and cost[here[0]] <= cost[best]:
                continue
            updated[j] = members[best]
        new_owner, dist = nearest(m, updated)
        new_se = total(dist)
        result.history.append(new_se)
        if new_se > se:
            # Rounding in the cost sums picked a worse set; keep the previous one.
            break
        medoids, owner = updated, new_owner
        if new_se == se:
            break
        se = new_se
    else:
        result.capped = True
    result.medoids = medoids.tolist()
    result.owner = owner
    result.se = se
    return result


def one_medoid(m: np.ndarray) -> int:
    """Exact 1-medoid: the point with the smallest row sum (lowest index on ties)."""
    return int(np.argmin(m.sum(axis=1)))


def random_medoids(n: int, K: int, rng) -> list:
    """``K`` distinct indices drawn uniformly without replacement."""
    _check_k(K, n)
    rng = make_rng(rng)
    return [int(i) for i in rng.choice(n, size=K, replace=False)]


def dsquared_sample(m: np.ndarray, current, rng) -> int:
    """Draw a point with probability proportional to its squared distance
    to the nearest medoid in ``current``.

    Raises
    ------
    DegenerateDistributionError
        If every point sits at distance zero from ``current``.
    """
    cur = check_medoids(current, m.shape[0])
    rng = make_rng(rng)
    d = m[:, cur].min(axis=1)
    weights = d * d
    weights[cur] = 0.0
    cumulative = np.cumsum(weights)
    mass = cumulative[-1]
    if not mass > 0:
        raise DegenerateDistributionError(
            "all points coincide with the current medoids; D^2 weights are zero"
        )
    i = int(np.searchsorted(cumulative, rng.random() * mass, side="right"))
    if i >= len(weights):
        i = int(np.flatnonzero(weights)[-1])
    return i


def _next_center(m, current, rng) -> int:
    try:
        return dsquared_sample(m, current, rng)
    except DegenerateDistributionError:
        rest = np.setdiff1d(np.arange(m.shape[0]), current)
        return int(rng.choice(rest))


def kpp_seed(m: np.ndarray, K: int, rng) -> list:
    """k-means++ seeding: one uniform draw, then K-1 D^2 draws."""
    n = m.shape[0]
    _check_k(K, n)
    rng = make_rng(rng)
    seeds = [int(rng.integers(n))]
    while len(seeds) < K:
        seeds.append(_next_center(m, seeds, rng))
    return seeds


def kpp(m: np.ndarray, K: int, rng) -> ClusteringResult:
    """k-means++ seeding followed by FKM."""
    return fkm(m, kpp_seed(m, K, rng))


def fkm_random(m: np.ndarray, K: int, rng) -> ClusteringResult:
    """FKM from uniformly drawn initial medoids (the plain FKM baseline)."""
    return fkm(m, random_medoids(m.shape[0], K, rng))


def candidate_set(ds: Dataset, m: np.ndarray, lam: float, metric: str = "euclidean"):
    """Points whose spread ``sigma_i`` is within ``lam`` times the data spread.

    Returns ``(mask, sigma, sigma_i)``. ``sigma`` is the root mean squared
    distance to the centroid and ``sigma_i`` the root mean squared distance
    from point ``i`` to all points, both normalised by ``n - 1``.
    """
    if not lam > 0:
        raise ConfigError(f"lambda must be positive, got {lam}")
    n = m.shape[0]
    if n < 2:
        raise ConfigError("candidate set needs at least two points")
    if ds.n != n:
        raise ConfigError(f"dataset has {ds.n} points but matrix is {n} x {n}")
    centroid = ds.points.mean(axis=0, keepdims=True)
    to_centroid = cdist(ds.points, centroid, metric=METRICS[metric])[:, 0]
    sigma = math.sqrt(float(np.sum(to_centroid ** 2)) / (n - 1))
    sigma_i = np.sqrt((m * m).sum(axis=1) / (n - 1))
    return sigma_i <= lam * sigma, sigma, sigma_i


def _farthest_candidate(m, medoids, candidates) -> int:
    d = m[np.ix_(candidates, medoids)].min(axis=1)
    d[np.isin(candidates, medoids)] = -1.0
    return int(candidates[int(np.argmax(d))])


def inckm_seed(ds: Dataset, m: np.ndarray, K: int, lam: float,
               metric: str = "euclidean") -> list:
    """Deterministic INCKM seeds drawn from the candidate set.

    The first seed is the candidate with the smallest total distance to all
    points; each further seed is the candidate farthest from its nearest
    chosen seed.
    """
    _check_k(K, m.shape[0])
    mask, _, _ = candidate_set(ds, m, lam, metric)
    candidates = np.flatnonzero(mask)
    if candidates.size < K:
        raise CandidateSetTooSmallError(candidates.size, K, lam)
    seeds = [int(candidates[np.argmin(m[candidates].sum(axis=1))])]
    while len(seeds) < K:
        seeds.append(_farthest_candidate(m, seeds, candidates))
    return seeds


def inckm(ds: Dataset, m: np.ndarray, K: int, lam: float, metric: str = "euclidean",
          refine_each_stage: bool = True) -> ClusteringResult:
    """Incremental k-medoids with max-distance seeding from the candidate set.

    With ``refine_each_stage`` the j-medoid solution (refined by FKM) seeds
    stage j + 1; otherwise all K seeds are chosen first and refined once.
    ``iterations`` totals FKM iterations over all stages.
    """
    if not refine_each_stage:
        res = fkm(m, inckm_seed(ds, m, K, lam, metric))
        res.stages.append((res.history[0], res.se))
        res.lam = lam
        return res
    _check_k(K, m.shape[0])
    mask, _, _ = candidate_set(ds, m, lam, metric)
    candidates = np.flatnonzero(mask)
    if candidates.size < K:
        raise CandidateSetTooSmallError(candidates.size, K, lam)
    first = int(candidates[np.argmin(m[candidates].sum(axis=1))])
    res = fkm(m, [first])
    iterations, stages = res.iterations, [(res.history[0], res.se)]
    for _ in range(1, K):
        grown = res.medoids + [_farthest_candidate(m, res.medoids, candidates)]
        res = fkm(m, grown)
        iterations += res.iterations
        stages.append((res.history[0], res.se))
    res.iterations, res.stages, res.lam = iterations, stages, lam
    return res


def inckpp(m: np.ndarray, K: int, rng) -> ClusteringResult:
    """Incremental k-medoids grown by D^2 sampling with FKM refinement.

    Starts from the exact 1-medoid; for k = 2..K draws one new medoid by
    k-means++ sampling against the current medoids, then refines all k
    with FKM.
    """
    n = m.shape[0]
    _check_k(K, n)
    rng = make_rng(rng)
    first = one_medoid(m)
    owner, dist = nearest(m, [first])
    se = total(dist)
    res = ClusteringResult(medoids=[first], owner=owner, se=se, iterations=0,
                           history=[se], initial=[first])
    iterations, stages = 0, []
    for _ in range(1, K):
        grown = res.medoids + [_next_center(m, res.medoids, rng)]
        res = fkm(m, grown)
        iterations += res.iterations
        stages.append((res.history[0], res.se))
    res.iterations, res.stages = iterations, stages
    return res


def sample_indices(n: int, K: int, percent: float, rng) -> np.ndarray:
    """Sorted uniform subset of ``max(K, round(n * percent / 100))`` indices.

    Draws nothing from ``rng`` when the subset is the whole range, so a
    100 percent sample leaves the stream untouched for the pre-search.
    """
    if not 0 < percent <= 100:
        raise ConfigError(f"sample percent must lie in (0, 100], got {percent}")
    size = min(n, max(K, int(math.floor(n * percent / 100 + 0.5))))
    if size >= n:
        return np.arange(n)
    rng = make_rng(rng)
    return np.sort(rng.choice(n, size=size, replace=False))


def _sampled(presearch, m, K, percent, rng) -> ClusteringResult:
    n = m.shape[0]
    _check_k(K, n)
    rng = make_rng(rng)
    idx = sample_indices(n, K, percent, rng)
    pre = presearch(m[np.ix_(idx, idx)], K, rng)
    res = fkm(m, idx[pre.medoids])
    res.iterations += pre.iterations
    res.stages = [(res.history[0], res.se)]
    return res


def inckpp_sample(m: np.ndarray, K: int, percent: float, rng) -> ClusteringResult:
    """INCKPP on a ``percent`` sample, then FKM on the full matrix from its medoids."""
    return _sampled(inckpp, m, K, percent, rng)


def kpp_sample(m: np.ndarray, K: int, percent: float, rng) -> ClusteringResult:
    """KPP on a ``percent`` sample, then FKM on the full matrix."""
    return _sampled(kpp, m, K, percent, rng)


def fkm_sample(m: np.ndarray, K: int, percent: float, rng) -> ClusteringResult:
    """Randomly initialised FKM on a ``percent`` sample, then FKM on the full matrix."""
    return _sampled(fkm_random, m, K, percent, rng)
