"""Shared data structures and the sum-of-errors objective."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import CapacityError, ConfigError, DataError

#: Largest point count for which a dense n x n matrix is built.
MAX_POINTS = 15_000

METRICS = {"euclidean": "euclidean", "manhattan": "cityblock"}


@dataclass
class Dataset:
    """``n`` points with ``p`` real attributes and optional integer labels."""

    points: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DataError(f"points must form a non-empty n x p array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            bad = int(np.argwhere(~np.isfinite(pts))[0][0])
            raise DataError(f"non-finite attribute value in point {bad}")
        self.points = pts
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (pts.shape[0],):
                raise DataError(f"expected {pts.shape[0]} labels, got {labels.shape[0]}")
            self.labels = labels.astype(np.int64)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def p(self) -> int:
        return self.points.shape[1]


@dataclass
class ClusteringResult:
    """Medoids, nearest-medoid ownership, SE and the FKM iteration count.

    ``history`` holds the SE values checked at each stopping test, starting
    with the SE of the initial configuration. ``stages`` is filled by the
    incremental algorithms with ``(se_after_append, se_after_refine)`` pairs.
    ``initial`` is the medoid set the final FKM pass started from, and
    ``lam`` the stretch factor used when the result comes from INCKM.
    """

    medoids: list
    owner: np.ndarray
    se: float
    iterations: int
    history: list = field(default_factory=list)
    stages: list = field(default_factory=list)
    initial: list = field(default_factory=list)
    capped: bool = False
    lam: Optional[float] = None


def make_rng(seed) -> np.random.Generator:
    """PCG64 stream for ``seed``; identical seeds give identical draws."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ConfigError("an explicit seed is required")
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def build_dissimilarity(ds: Dataset, metric: str = "euclidean") -> np.ndarray:
    """Dense symmetric distance matrix with an exact zero diagonal."""
    if metric not in METRICS:
        raise ConfigError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}")
    if not isinstance(ds, Dataset):
        ds = Dataset(ds)
    if ds.n > MAX_POINTS:
        raise CapacityError(f"{ds.n} points exceeds the dense-matrix limit of {MAX_POINTS}")
    if ds.n == 1:
        return np.zeros((1, 1))
    return squareform(pdist(ds.points, metric=METRICS[metric]))


def check_dissimilarity(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DataError(f"dissimilarity matrix must be square and non-empty, got {m.shape}")
    if not np.all(np.isfinite(m)) or np.any(m < 0):
        raise DataError("dissimilarity entries must be finite and non-negative")
    if np.any(np.diag(m) != 0) or not np.array_equal(m, m.T):
        raise DataError("dissimilarity matrix must be symmetric with a zero diagonal")
    return m


def check_medoids(medoids: Sequence[int], n: int) -> np.ndarray:
    idx = np.asarray(medoids, dtype=np.intp).reshape(-1)
    if idx.size == 0:
        raise ConfigError("medoid set is empty")
    if idx.min() < 0 or idx.max() >= n:
        raise ConfigError(f"medoid index out of range [0, {n})")
    if np.unique(idx).size != idx.size:
        raise ConfigError("medoid indices must be distinct")
    return idx


def nearest(m: np.ndarray, medoids) -> tuple[np.ndarray, np.ndarray]:
    """Per-point (owner, distance); ties go to the lowest medoid ordinal."""
    sub = m[:, medoids]
    owner = np.argmin(sub, axis=1)
    return owner, sub[np.arange(m.shape[0]), owner]


def total(dists) -> float:
    # Correctly rounded, so the value does not depend on summation order.
    return math.fsum(dists)


def sum_of_errors(m: np.ndarray, medoids: Sequence[int]) -> float:
    """Sum over points of the distance to the nearest medoid."""
    idx = check_medoids(medoids, m.shape[0])
    return total(m[:, idx].min(axis=1))


def assign(m: np.ndarray, medoids: Sequence[int]) -> np.ndarray:
    """Index into ``medoids`` of each point's nearest medoid."""
    idx = check_medoids(medoids, m.shape[0])
    return nearest(m, idx)[0]
