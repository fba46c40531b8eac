"""Exit criteria. Run with ``pytest tests/test_acceptance.py`` or as a script.

Each criterion is a function returning ``(passed, detail)``; the pytest
wrappers assert on it and the terminal summary prints one line per criterion.
"""

import math
import os
import sys
import time

import numpy as np
import pytest
from scipy.stats import chisquare
from sklearn.metrics import adjusted_rand_score

from inckpp import (Dataset, build_dissimilarity, dsquared_sample, exhaustive_kmedoids, fkm,
                    inckm, inckm_seed, inckpp, inckpp_sample, make_rng, random_medoids,
                    sum_of_errors)
from inckpp.algorithms import LAMBDA_SWEEP
from inckpp.bench import BenchSpec, Problem, measure_budget, run_budgeted
from inckpp.data import imbalanced_pair, load_from_manifest, normalize_min_max

RESULTS = {}

MANIFEST_ENV = "INCKPP_MANIFEST"


def _instance(rng, n, p=2):
    ds = Dataset(rng.random((n, p)))
    return ds, build_dissimilarity(ds)


def _timed(limit):
    def wrap(fn):
        def run():
            start = time.perf_counter()
            ok, detail = fn()
            elapsed = time.perf_counter() - start
            if elapsed >= limit:
                ok = False
            return ok, f"{detail}; {elapsed:.1f}s (limit {limit}s)"
        run.__name__ = fn.__name__
        return run
    return wrap


@_timed(30)
def criterion_1():
    """INCKPP with 50 restarts attains the exhaustive optimum on >= 95/100 instances."""
    rng = np.random.default_rng(2024)
    attained, below = 0, 0
    for _ in range(100):
        n = int(rng.integers(8, 15))
        K = int(rng.choice([2, 3]))
        _, m = _instance(rng, n)
        best = exhaustive_kmedoids(m, K).best_se
        ses = [inckpp(m, K, int(rng.integers(2**63))).se for _ in range(50)]
        below += sum(se < best for se in ses)
        attained += min(ses) == best
    return attained >= 95 and below == 0, f"optimum attained on {attained}/100, runs below oracle: {below}"


@_timed(10)
def criterion_2():
    """FKM's SE sequence strictly decreases, then repeats once; cap never hit."""
    rng = np.random.default_rng(7)
    bad = capped = 0
    for _ in range(1000):
        n = int(rng.integers(10, 41))
        K = int(rng.integers(2, 6))
        _, m = _instance(rng, n, int(rng.integers(1, 4)))
        res = fkm(m, random_medoids(n, K, rng))
        h = res.history
        strictly = all(a > b for a, b in zip(h[:-2], h[1:-1]))
        bad += not (len(h) >= 2 and strictly and h[-1] == h[-2] and res.se == h[-1])
        capped += res.capped
    return bad == 0 and capped == 0, f"non-monotone runs: {bad}, capped runs: {capped}"


@_timed(5)
def criterion_3():
    """100 000 D^2 draws pass chi-square against exact d^2 weights at 0.001."""
    pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 3.0], [-1.0, 4.0], [5.0, -2.0]]
    m = build_dissimilarity(Dataset(pts))
    weights = np.array([(x - pts[0][0]) ** 2 + (y - pts[0][1]) ** 2 for x, y in pts])
    rng = make_rng(31337)
    counts = np.bincount([dsquared_sample(m, [0], rng) for _ in range(100_000)], minlength=6)
    expected = weights[1:] / weights[1:].sum() * counts.sum()
    pvalue = chisquare(counts[1:], expected).pvalue
    return counts[0] == 0 and pvalue > 0.001, f"p-value {pvalue:.4f}, medoid drawn {counts[0]} times"


@_timed(60)
def criterion_4a():
    """INCKM seeds both land in the large class for every lambda and 20 generator seeds."""
    failures = []
    for gen_seed in range(20):
        ds = normalize_min_max(imbalanced_pair(2000, 100, separation=10.0, seed=gen_seed))
        m = build_dissimilarity(ds)
        for lam in LAMBDA_SWEEP:
            seeds = inckm_seed(ds, m, 2, lam)
            if any(ds.labels[s] != 0 for s in seeds):
                failures.append((gen_seed, lam))
    return not failures, f"{20 * len(LAMBDA_SWEEP) - len(failures)}/{20 * len(LAMBDA_SWEEP)} (seed, lambda) pairs split the large class"


@_timed(60)
def criterion_4b():
    """INCKPP, K = 2, ARI >= 0.95 in >= 90 of 100 seeded single runs."""
    ds = normalize_min_max(imbalanced_pair(2000, 100, separation=10.0, seed=0))
    m = build_dissimilarity(ds)
    good = sum(adjusted_rand_score(ds.labels, inckpp(m, 2, s).owner) >= 0.95 for s in range(100))
    return good >= 90, f"{good}/100 runs with ARI >= 0.95"


@_timed(5)
def criterion_5():
    """INCKM is bit-reproducible and its seeds satisfy sigma_i <= lambda * sigma."""
    rng = np.random.default_rng(55)
    unsound = mismatched = 0
    for trial in range(6):
        n = int(rng.integers(30, 80))
        pts = rng.normal(size=(n, 3)) * rng.uniform(0.5, 3, size=3)
        ds = Dataset(pts)
        m = build_dissimilarity(ds)
        for lam in (1.5, 2.0, 2.5):
            a, b = inckm(ds, m, 3, lam), inckm(ds, m, 3, lam)
            same = (a.medoids == b.medoids and a.owner.tobytes() == b.owner.tobytes()
                    and repr(a.se) == repr(b.se) and a.iterations == b.iterations)
            mismatched += not same
            # independent recomputation straight from the coordinates
            rows = pts.tolist()
            centroid = [sum(r[k] for r in rows) / n for k in range(3)]
            sigma = math.sqrt(sum(sum((r[k] - centroid[k]) ** 2 for k in range(3)) for r in rows) / (n - 1))
            for s in inckm_seed(ds, m, 3, lam):
                sigma_s = math.sqrt(sum(sum((rows[s][k] - r[k]) ** 2 for k in range(3))
                                        for r in rows) / (n - 1))
                unsound += not sigma_s <= lam * sigma * (1 + 1e-12)
    return unsound == 0 and mismatched == 0, f"unsound seeds: {unsound}, non-reproducible runs: {mismatched}"


@_timed(30)
def criterion_6():
    """p = 100 reproduces INCKPP; smaller p never ends above its pre-search SE."""
    rng = np.random.default_rng(66)
    unequal = worse = 0
    for i in range(50):
        n = int(rng.integers(20, 60))
        K = int(rng.integers(2, 5))
        _, m = _instance(rng, n)
        unequal += inckpp_sample(m, K, 100, i).se != inckpp(m, K, i).se
    for i in range(30):
        n = int(rng.integers(200, 401))
        K = int(rng.integers(2, 6))
        _, m = _instance(rng, n)
        for percent in (5, 10, 15):
            res = inckpp_sample(m, K, percent, 1000 + i)
            worse += res.se > sum_of_errors(m, res.initial)
    return unequal == 0 and worse == 0, f"p=100 mismatches: {unequal}/50, pre-search increases: {worse}/90"


@_timed(30)
def criterion_7():
    """3x a single run's time admits 3 +/- 1 runs; min-SE never rises as the budget doubles."""
    rng = np.random.default_rng(77)
    ds = Dataset(rng.random((500, 2)))
    problem = Problem.from_dataset(ds)
    spec = BenchSpec("inckm", 4, lam=2.0)
    measure_budget(problem, spec, 1)  # warm-up
    single = measure_budget(problem, spec, 1)
    repeats = run_budgeted(problem, spec, 3 * single).repeats
    kpp = BenchSpec("kpp", 6, root_seed=9)
    base = measure_budget(problem, kpp, 1)
    mins = [run_budgeted(problem, kpp, base * 2 ** j).min_se for j in range(6)]
    monotone = all(a >= b for a, b in zip(mins, mins[1:]))
    return 2 <= repeats <= 4 and monotone, f"repeats {repeats:g} for 3x budget, min-SE by doubling budget {['%.4f' % v for v in mins]}"


@_timed(1)
def criterion_8():
    """Normalised non-constant columns span exactly [0, 1]; normalisation is idempotent."""
    rng = np.random.default_rng(88)
    bad = 0
    for _ in range(50):
        x = rng.normal(size=(int(rng.integers(2, 200)), int(rng.integers(1, 8)))) * 10 ** rng.uniform(-3, 3)
        x[:, 0] = 7.0
        out = normalize_min_max(Dataset(x)).points
        bad += not (np.all(out[:, 1:].min(axis=0) == 0) and np.all(out[:, 1:].max(axis=0) == 1)
                    and np.all(out[:, 0] == 0)
                    and np.array_equal(normalize_min_max(Dataset(out)).points, out))
    return bad == 0, f"violations: {bad}/50"


def criterion_9():
    """imbalance2, K = 2: INCKPP min-SE 75.75 +/- 0.01 within 10 restarts; stable over 1000."""
    manifest = os.environ.get(MANIFEST_ENV)
    if not manifest or not os.path.exists(manifest):
        return None, f"SKIP: set {MANIFEST_ENV} to a manifest listing imbalance or imbalance2"
    ds = normalize_min_max(load_from_manifest(manifest, "imbalance2"))
    m = build_dissimilarity(ds)
    first = min(inckpp(m, 2, s).se for s in range(10))
    lowest = min(inckpp(m, 2, s).se for s in range(1000))
    ok = abs(first - 75.75) <= 0.01 and lowest >= first - 1e-6
    return ok, f"min-SE over 10 restarts {first:.4f}, over 1000 restarts {lowest:.4f}"


CRITERIA = {
    "1 oracle equivalence": criterion_1,
    "2 FKM monotone convergence": criterion_2,
    "3 D^2 distribution": criterion_3,
    "4a INCKM imbalanced seeding": criterion_4a,
    "4b INCKPP imbalanced ARI": criterion_4b,
    "5 INCKM determinism/soundness": criterion_5,
    "6 sampled-variant consistency": criterion_6,
    "7 budget protocol": criterion_7,
    "8 normalization": criterion_8,
    "9 imbalance2 (dataset-conditional)": criterion_9,
}


def _check(name):
    ok, detail = CRITERIA[name]()
    RESULTS[name] = (ok, detail)
    if ok is None:
        pytest.skip(detail)
    assert ok, detail


@pytest.mark.acceptance
@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion(name):
    _check(name)


def main():
    failed = 0
    for name, fn in CRITERIA.items():
        ok, detail = fn()
        tag = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        failed += ok is False
        print(f"[{tag}] {name}: {detail}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
