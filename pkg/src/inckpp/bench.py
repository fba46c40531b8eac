"""Time-budget-matched comparison of clustering algorithms.

A reference algorithm (one INCKM run, or N runs of INCKPP_sample) fixes a
wall-time budget; every other algorithm is then launched repeatedly with
seeds ``root + 0, root + 1, ...`` until the budget is spent. A run that
starts before the budget expires is always completed and counted.
"""

from __future__ import annotations

import csv
import multiprocessing
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import algorithms as alg
from .core import ClusteringResult, Dataset, build_dissimilarity
from .errors import CandidateSetTooSmallError, ConfigError

ALGORITHMS = ("inckm", "inckpp", "inckpp_sample", "kpp", "kpp_sample", "fkm", "fkm_sample")
SAMPLED = ("inckpp_sample", "kpp_sample", "fkm_sample")
BUDGET_REFS = ("inckm", "inckpp_sample")
DEFAULT_PERCENT = 10.0

#: Seed offset between replications; runs inside one replication use root + ordinal.
REPLICATION_STRIDE = 1_000_000

COLUMNS = ("dataset", "algorithm", "params", "K", "p", "N", "lambda",
           "min_se", "aver_se", "iter_mean", "repeats", "budget_s", "wall_s")

REPORT_NOTE = ("# min_se, aver_se, iter_mean and repeats are means over replications "
               "(min_se is a mean of per-replication minima); budget_s and wall_s are timings")


@dataclass
class Problem:
    """A dataset together with its dissimilarity matrix."""

    data: Dataset
    matrix: np.ndarray
    name: str = "data"
    metric: str = "euclidean"

    @classmethod
    def from_dataset(cls, ds: Dataset, name: str = "data", metric: str = "euclidean"):
        return cls(ds, build_dissimilarity(ds, metric), name, metric)


@dataclass
class BenchSpec:
    algorithm: str
    K: int
    dataset: str = "data"
    root_seed: int = 0
    replications: int = 1
    lam: Optional[float] = None
    percent: Optional[float] = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if self.K < 1:
            raise ConfigError("K must be >= 1")
        if self.lam is not None and self.algorithm != "inckm":
            raise ConfigError("lambda applies only to inckm")
        if self.percent is not None and self.algorithm not in SAMPLED:
            raise ConfigError("a sample percentage applies only to the sampled variants")
        if self.algorithm in SAMPLED and self.percent is None:
            self.percent = DEFAULT_PERCENT


@dataclass
class Criteria:
    min_se: float
    aver_se: float
    iter_mean: float
    repeats: float
    wall_budget: float
    wall_s: float
    lam: Optional[float] = None
    ses: list = field(default_factory=list, repr=False)


def run_once(problem: Problem, spec: BenchSpec, seed: int) -> ClusteringResult:
    """One run of ``spec.algorithm``.

    INCKM without a fixed lambda sweeps the stretch factors and keeps the
    best SE; the chosen value is stored on the result as ``lam``.
    """
    m, K = problem.matrix, spec.K
    name = spec.algorithm
    if name == "inckm":
        lams = (spec.lam,) if spec.lam is not None else alg.LAMBDA_SWEEP
        best, failure = None, None
        for lam in lams:
            try:
                res = alg.inckm(problem.data, m, K, lam, problem.metric)
            except CandidateSetTooSmallError as exc:
                failure = exc
                continue
            if best is None or res.se < best.se:
                best = res
        if best is None:
            raise failure
        return best
    if name == "inckpp":
        return alg.inckpp(m, K, seed)
    if name == "kpp":
        return alg.kpp(m, K, seed)
    if name == "fkm":
        return alg.fkm_random(m, K, seed)
    return getattr(alg, name)(m, K, spec.percent, seed)


def _timed(problem, spec, seed):
    start = time.perf_counter()
    res = run_once(problem, spec, seed)
    return res, time.perf_counter() - start


def _criteria(results, elapsed, budget) -> Criteria:
    ses = [r.se for r in results]
    return Criteria(min(ses), statistics.fmean(ses),
                    statistics.fmean(r.iterations for r in results),
                    float(len(results)), budget, elapsed, results[0].lam, ses)


def measure_budget(problem: Problem, spec: BenchSpec, N: int, root_seed: Optional[int] = None) -> float:
    """Total wall time of ``N`` complete runs with seeds ``root + 0 .. root + N - 1``."""
    return _reference_runs(problem, spec, N, root_seed)[1]


def _reference_runs(problem, spec, N, root_seed=None):
    root = spec.root_seed if root_seed is None else root_seed
    results, elapsed = [], 0.0
    for i in range(N):
        res, dt = _timed(problem, spec, root + i)
        results.append(res)
        elapsed += dt
    return results, elapsed


def run_budgeted(problem: Problem, spec: BenchSpec, budget: float,
                 root_seed: Optional[int] = None, max_runs: Optional[int] = None) -> Criteria:
    """Repeat ``spec.algorithm`` while the accumulated run time is under ``budget``.

    At least one run always completes. ``max_runs`` replaces the time gate
    with a fixed run count, which makes every criterion reproducible.
    """
    if max_runs is None and not budget > 0:
        raise ConfigError(f"budget must be positive, got {budget}")
    if max_runs is not None and max_runs < 1:
        raise ConfigError("max_runs must be >= 1")
    root = spec.root_seed if root_seed is None else root_seed
    results, elapsed = [], 0.0
    while True:
        res, dt = _timed(problem, spec, root + len(results))
        results.append(res)
        elapsed += dt
        if max_runs is not None:
            if len(results) >= max_runs:
                break
        elif elapsed >= budget:
            break
    return _criteria(results, elapsed, budget)


@dataclass
class Reference:
    """Which algorithm sets the budget, and how."""

    algorithm: str = "inckm"
    N: int = 1
    percent: float = DEFAULT_PERCENT
    lam: Optional[float] = None

    def __post_init__(self):
        if self.algorithm not in BUDGET_REFS:
            raise ConfigError(f"budget reference must be one of {BUDGET_REFS}")
        if self.N < 1:
            raise ConfigError("N must be >= 1")

    def spec(self, K, dataset, root_seed) -> BenchSpec:
        if self.algorithm == "inckm":
            return BenchSpec("inckm", K, dataset, root_seed, lam=self.lam)
        return BenchSpec("inckpp_sample", K, dataset, root_seed, percent=self.percent)


def _replicate(problem, specs, reference, replication, fixed_repeats):
    root = specs[0].root_seed + replication * REPLICATION_STRIDE
    ref_spec = reference.spec(specs[0].K, specs[0].dataset, root)
    runs = reference.N if reference.algorithm == "inckpp_sample" else 1
    ref_results, budget = _reference_runs(problem, ref_spec, runs)
    row = []
    for spec in specs:
        seed = spec.root_seed + replication * REPLICATION_STRIDE
        if spec.algorithm == reference.algorithm and spec.lam == ref_spec.lam \
                and spec.percent == ref_spec.percent:
            row.append(_criteria(ref_results, budget, budget))
        else:
            row.append(run_budgeted(problem, spec, budget, seed, max_runs=fixed_repeats))
    return row


_WORKER_PROBLEM = None


def _worker(args):
    return _replicate(_WORKER_PROBLEM, *args)


def compare(problem: Problem, specs, reference: Optional[Reference] = None,
            fixed_repeats: Optional[int] = None, jobs: int = 1) -> list:
    """Budget-matched comparison; one row dict per spec, in spec order.

    Criteria are averaged over the replications. When a spec names the
    reference algorithm itself, its row reports the reference runs.
    """
    specs = list(specs)
    if not specs:
        raise ConfigError("compare needs at least one spec")
    reference = reference or Reference()
    first = specs[0]
    for s in specs[1:]:
        if (s.dataset, s.K, s.replications, s.root_seed) != \
                (first.dataset, first.K, first.replications, first.root_seed):
            raise ConfigError("all specs must share dataset, K, replications and root seed")

    tasks = [(specs, reference, r, fixed_repeats) for r in range(first.replications)]
    if jobs > 1 and len(tasks) > 1:
        global _WORKER_PROBLEM
        _WORKER_PROBLEM = problem
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            per_rep = list(pool.map(_worker, tasks))
        _WORKER_PROBLEM = None
    else:
        per_rep = [_replicate(problem, *t) for t in tasks]

    rows = []
    for i, spec in enumerate(specs):
        crit = [rep[i] for rep in per_rep]
        mean = lambda attr: statistics.fmean(getattr(c, attr) for c in crit)  # noqa: E731
        lam = crit[0].lam if spec.algorithm == "inckm" else None
        params = [f"budget_ref={reference.algorithm}", f"replications={spec.replications}"]
        if spec.algorithm == "inckm":
            params.append("lambda=" + (f"{spec.lam:g}" if spec.lam is not None else "sweep"))
        if spec.percent is not None:
            params.append(f"p={spec.percent:g}")
        if reference.algorithm == "inckpp_sample":
            params.append(f"N={reference.N}")
        if fixed_repeats is not None:
            params.append(f"fixed_repeats={fixed_repeats}")
        rows.append({
            "dataset": spec.dataset,
            "algorithm": spec.algorithm,
            "params": ";".join(params),
            "K": spec.K,
            "p": spec.percent,
            "N": reference.N if reference.algorithm == "inckpp_sample" else None,
            "lambda": lam,
            "min_se": mean("min_se"),
            "aver_se": mean("aver_se"),
            "iter_mean": mean("iter_mean"),
            "repeats": mean("repeats"),
            "budget_s": mean("wall_budget"),
            "wall_s": mean("wall_s"),
        })
    return rows


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def write_report(rows, fh, note: bool = True) -> None:
    """Write rows as CSV with the fixed column order."""
    if note:
        fh.write(REPORT_NOTE + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in COLUMNS])
