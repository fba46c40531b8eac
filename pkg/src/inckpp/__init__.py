"""Incremental k-means++-seeded k-medoids clustering and benchmark harness."""

from .core import (
    ClusteringResult,
    Dataset,
    assign,
    build_dissimilarity,
    make_rng,
    sum_of_errors,
)
from .errors import (
    CandidateSetTooSmallError,
    CapacityError,
    ConfigError,
    DataError,
    DegenerateDistributionError,
    KMedoidsError,
)
from .algorithms import (
    dsquared_sample,
    fkm,
    fkm_sample,
    inckm,
    inckm_seed,
    inckpp,
    inckpp_sample,
    kpp,
    kpp_sample,
    kpp_seed,
    one_medoid,
    random_medoids,
    sample_indices,
)
from .oracle import OracleResult, exhaustive_kmedoids

__version__ = "0.1.0"
