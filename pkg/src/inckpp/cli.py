"""Command-line entry point: ``inckpp {cluster,seed,bench,oracle,gen}``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 capacity error,
1 anything unexpected.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import sys

from . import algorithms as alg
from . import bench
from .core import build_dissimilarity
from .data import (GeneratorSpec, LABEL_COLUMNS, generate, load, load_from_manifest,
                   normalize_min_max, parse_clusters, write)
from .errors import ConfigError, KMedoidsError
from .oracle import exhaustive_kmedoids

CLUSTER_ALGOS = ("fkm", "kpp", "inckm", "inckpp", "fkm_sample", "kpp_sample", "inckpp_sample")
SEED_ALGOS = ("kpp", "inckm", "random")
RANDOMIZED = tuple(a for a in CLUSTER_ALGOS if a != "inckm")


def _data_args(p):
    src = p.add_argument_group("data")
    src.add_argument("--data", help="dataset text file")
    src.add_argument("--manifest", help="manifest file mapping ids to paths")
    src.add_argument("--dataset", help="dataset id inside --manifest")
    src.add_argument("--label-column", choices=LABEL_COLUMNS, default="none")
    src.add_argument("--metric", choices=("euclidean", "manhattan"), default="euclidean")
    src.add_argument("--no-normalize", dest="normalize", action="store_false",
                     help="skip min-max normalisation")


def _out_arg(p):
    p.add_argument("--out", "-o", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inckpp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="run one clustering algorithm")
    _data_args(p)
    p.add_argument("--algo", choices=CLUSTER_ALGOS, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--p", dest="percent", type=float)
    _out_arg(p)

    p = sub.add_parser("seed", help="print initial medoids from a seeding rule")
    _data_args(p)
    p.add_argument("--algo", choices=SEED_ALGOS, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    _out_arg(p)

    p = sub.add_parser("bench", help="time-budget-matched comparison")
    _data_args(p)
    p.add_argument("--algos", default="inckpp_sample,kpp,kpp_sample,fkm,fkm_sample",
                   help="comma-separated algorithm list")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--replications", type=int, default=1)
    p.add_argument("--budget-ref", choices=bench.BUDGET_REFS, default="inckpp_sample")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--p", dest="percent", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--repeats", type=int,
                   help="fixed run count per row instead of the time budget")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--name", help="dataset name for the report")
    _out_arg(p)

    p = sub.add_parser("oracle", help="exact optimum by exhaustive enumeration")
    _data_args(p)
    p.add_argument("--k", type=int, required=True)
    _out_arg(p)

    p = sub.add_parser("gen", help="generate a labelled Gaussian mixture")
    p.add_argument("--clusters", required=True, help='e.g. "0,0:1:2000;10,10:1:100"')
    p.add_argument("--seed", type=int)
    _out_arg(p)
    return parser


def _dataset(args):
    if args.data and (args.manifest or args.dataset):
        raise ConfigError("use either --data or --manifest/--dataset")
    if args.data:
        ds = load(args.data, label_column=args.label_column)
    elif args.manifest and args.dataset:
        ds = load_from_manifest(args.manifest, args.dataset)
    else:
        raise ConfigError("a dataset is required: --data FILE or --manifest FILE --dataset ID")
    return normalize_min_max(ds) if args.normalize else ds


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _write_fields(fh, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("field", "index", "value"))
    writer.writerows(rows)


def _fmt(x):
    return repr(float(x))


def _need_seed(args):
    if args.seed is None:
        raise ConfigError(f"--seed is required for {args.algo}")


def cmd_cluster(args):
    if args.lam is not None and args.algo != "inckm":
        raise ConfigError("--lambda applies only to --algo inckm")
    if args.percent is not None and not args.algo.endswith("_sample"):
        raise ConfigError("--p applies only to the sampled variants")
    if args.algo in RANDOMIZED:
        _need_seed(args)
    ds = _dataset(args)
    problem = bench.Problem.from_dataset(ds, metric=args.metric)
    percent = None
    if args.algo.endswith("_sample"):
        percent = bench.DEFAULT_PERCENT if args.percent is None else args.percent
    spec = bench.BenchSpec(args.algo, args.k, lam=args.lam, percent=percent)
    res = bench.run_once(problem, spec, args.seed)
    rows = [("se", "", _fmt(res.se)), ("iterations", "", res.iterations)]
    rows += [("medoid", j, i) for j, i in enumerate(res.medoids)]
    rows += [("owner", i, int(o)) for i, o in enumerate(res.owner)]
    with _output(args.out) as fh:
        _write_fields(fh, rows)


def cmd_seed(args):
    if args.lam is not None and args.algo != "inckm":
        raise ConfigError("--lambda applies only to --algo inckm")
    if args.algo != "inckm":
        _need_seed(args)
    ds = _dataset(args)
    m = build_dissimilarity(ds, args.metric)
    if args.algo == "kpp":
        seeds = alg.kpp_seed(m, args.k, args.seed)
    elif args.algo == "random":
        seeds = alg.random_medoids(m.shape[0], args.k, args.seed)
    else:
        seeds = alg.inckm_seed(ds, m, args.k, 2.0 if args.lam is None else args.lam, args.metric)
    with _output(args.out) as fh:
        _write_fields(fh, [("medoid", j, i) for j, i in enumerate(seeds)])


def cmd_oracle(args):
    ds = _dataset(args)
    res = exhaustive_kmedoids(build_dissimilarity(ds, args.metric), args.k)
    rows = [("best_se", "", _fmt(res.best_se)), ("enumerated", "", res.enumerated)]
    rows += [("optimum", j, " ".join(str(i) for i in opt)) for j, opt in enumerate(res.best_medoids)]
    with _output(args.out) as fh:
        _write_fields(fh, rows)


def cmd_gen(args):
    if args.seed is None:
        raise ConfigError("--seed is required for gen")
    ds = generate(GeneratorSpec(parse_clusters(args.clusters), args.seed))
    if args.out is None:
        for row, label in zip(ds.points, ds.labels):
            sys.stdout.write(",".join([repr(float(x)) for x in row] + [str(label)]) + "\n")
    else:
        write(ds, args.out)


def cmd_bench(args):
    if args.seed is None:
        raise ConfigError("--seed is required for bench")
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    if not algos:
        raise ConfigError("--algos is empty")
    sampled = [a for a in algos if a in bench.SAMPLED]
    if args.percent is not None and not sampled and args.budget_ref != "inckpp_sample":
        raise ConfigError("--p applies only to the sampled variants")
    if args.lam is not None and "inckm" not in algos and args.budget_ref != "inckm":
        raise ConfigError("--lambda applies only to inckm")
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    ds = _dataset(args)
    name = args.name or args.dataset or "data"
    problem = bench.Problem.from_dataset(ds, name, args.metric)
    percent = bench.DEFAULT_PERCENT if args.percent is None else args.percent
    specs = [bench.BenchSpec(a, args.k, name, args.seed, args.replications,
                             lam=args.lam if a == "inckm" else None,
                             percent=percent if a in bench.SAMPLED else None)
             for a in algos]
    reference = bench.Reference(args.budget_ref, args.N, percent, args.lam)
    rows = bench.compare(problem, specs, reference, fixed_repeats=args.repeats, jobs=args.jobs)
    with _output(args.out) as fh:
        bench.write_report(rows, fh)


COMMANDS = {"cluster": cmd_cluster, "seed": cmd_seed, "bench": cmd_bench,
            "oracle": cmd_oracle, "gen": cmd_gen}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except KMedoidsError as exc:
        print(f"inckpp {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        print(f"inckpp {args.command}: unexpected error: {exc!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
