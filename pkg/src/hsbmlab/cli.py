"""Command-line interface.

Subcommands: generate, classify, recover, bench-spectral, montecarlo,
table1.  Configurations come either from a JSON file (--config, schema
{"n": int, "q": float, "gamma": float, "clusters": [[size, p], ...]}) or
from a preset (--example ID --n N, constants via repeated
--constant NAME=VALUE).

Exit codes: 0 on success, 2 for infeasible configurations or failed
recovery, 3 when the convex solver does not converge.
"""

from __future__ import annotations

import argparse
import json
import sys

from .convex import SolverOptions, recover_convex
from .counting import recover_counting
from .exhaustive import local_search, solve_exhaustive
from .generate import sample_adjacency, sample_observed
from .graphio import read_graph, write_adjacency, write_observed
from .harness import (
    ALGORITHMS,
    ExperimentSpec,
    run_monte_carlo,
    run_table1,
    write_results,
    write_table1,
)
from .model import ConfigError, ModelConfig
from .presets import EXAMPLE_IDS, example_config
from .regimes import classify, csv_header, csv_row

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_NONCONVERGENCE = 3


def _parse_constant(text: str) -> tuple[str, float]:
    name, _, value = text.partition("=")
    if not _ or not name:
        raise argparse.ArgumentTypeError(
            f"constants are NAME=VALUE, got {text!r}"
        )
    return name, float(value)


def _add_common(parser: argparse.ArgumentParser, config_source: bool = True) -> None:
    parser.add_argument("--seed", type=int, default=0, help="base random seed")
    parser.add_argument("--constant-C", type=float, default=1.0, dest="constant_c",
                        help="proportionality constant for the scaled conditions")
    parser.add_argument("--eta", type=float, default=2.0,
                        help="exponent margin of the search-recovery condition")
    parser.add_argument("--gamma", type=float, default=None,
                        help="override the observation rate")
    parser.add_argument("--out", type=str, default=None, help="output file path")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output file format")
    if config_source:
        parser.add_argument("--config", type=str, default=None,
                            help="JSON model configuration file")
        parser.add_argument("--example", type=int, default=None,
                            choices=EXAMPLE_IDS, help="preset family id")
        parser.add_argument("--n", type=int, default=None,
                            help="number of nodes for --example")
        parser.add_argument("--constant", action="append", default=[],
                            type=_parse_constant, metavar="NAME=VALUE",
                            help="preset constant override (repeatable)")


def load_config_file(path: str) -> ModelConfig:
    with open(path) as fh:
        return ModelConfig.from_dict(json.load(fh))


def _config_from_args(args) -> ModelConfig:
    if (args.config is None) == (args.example is None):
        raise ConfigError("exactly one of --config or --example is required")
    if args.config is not None:
        config = load_config_file(args.config)
    else:
        if args.n is None:
            raise ConfigError("--example requires --n")
        config = example_config(args.example, args.n, dict(args.constant))
    if args.gamma is not None:
        config = ModelConfig.from_arrays(
            config.n, config.sizes, config.probs, config.q, args.gamma
        )
    return config


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        print(text)
    else:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def cmd_generate(args) -> int:
    config = _config_from_args(args)
    partition = config.planted_partition()
    if args.out is None:
        raise ConfigError("generate requires --out")
    if config.gamma < 1.0:
        write_observed(args.out, sample_observed(config, partition, args.seed))
    else:
        write_adjacency(args.out, sample_adjacency(config, partition, args.seed))
    print(f"wrote {args.out} (n={config.n}, gamma={config.gamma:g}, seed={args.seed})")
    return EXIT_OK


def cmd_classify(args) -> int:
    config = _config_from_args(args)
    report = classify(config, C=args.constant_c, eta=args.eta)
    if args.format == "json":
        payload = report.to_json()
    else:
        header = ",".join(csv_header(report))
        payload = header + "\n" + ",".join(csv_row(report))
    _write_or_print(payload, args.out)
    if args.out is not None:
        print(f"regime={report.regime}")
    return EXIT_OK


def cmd_recover(args) -> int:
    config = _config_from_args(args)
    graph = read_graph(args.adjacency)
    if hasattr(graph, "to_adjacency"):
        adjacency = graph.to_adjacency(unobserved_as=0)
        work_config = config.collapsed()
    else:
        adjacency = graph
        work_config = config if config.gamma >= 1.0 else config.collapsed()
    solver = SolverOptions(max_iter=args.max_iter, step=args.step,
                           rounding_threshold=args.threshold)

    exit_code = EXIT_OK
    detail = ""
    partition = None
    if args.algorithm == "convex":
        rec = recover_convex(adjacency, work_config, solver)
        partition = rec.partition
        if rec.failure is not None:
            detail = f"{rec.failure.kind}: {rec.failure.detail}"
            exit_code = (EXIT_NONCONVERGENCE if rec.failure.kind == "nonconvergence"
                         else EXIT_INFEASIBLE)
    elif args.algorithm == "exhaustive":
        res = solve_exhaustive(adjacency, work_config)
        partition = res.partition
        if res.tie_count > 1:
            detail = f"tie: {res.tie_count} maximizers"
    elif args.algorithm == "counting":
        rec = recover_counting(adjacency, work_config)
        partition = rec.partition
        if rec.failure is not None:
            detail = f"{rec.failure.kind}: {rec.failure.detail}"
            exit_code = EXIT_INFEASIBLE
    else:
        res = local_search(adjacency, work_config, seed=args.seed,
                           restarts=args.restarts)
        partition = res.partition

    if partition is not None:
        labels = partition.labels.tolist()
        if args.format == "json":
            payload = json.dumps({"algorithm": args.algorithm, "labels": labels},
                                 indent=2, sort_keys=True)
        else:
            lines = ["node,label"] + [f"{i},{lab}" for i, lab in enumerate(labels)]
            payload = "\n".join(lines)
        _write_or_print(payload, args.out)
    if detail:
        print(detail, file=sys.stderr)
    return exit_code


def cmd_bench_spectral(args) -> int:
    from .spectral import concentration_experiment

    config = _config_from_args(args)
    stats = concentration_experiment(config, trials=args.trials, seed=args.seed)
    rows = stats.rows()
    if args.format == "json":
        payload = json.dumps(rows, indent=2, sort_keys=True)
    else:
        lines = ["trial,norm,bound,ratio"]
        lines += [f"{r['trial']},{r['norm']!r},{r['bound']!r},{r['ratio']!r}"
                  for r in rows]
        payload = "\n".join(lines)
    _write_or_print(payload, args.out)
    print(f"ratios: min={stats.min_ratio:.4f} mean={stats.mean_ratio:.4f} "
          f"max={stats.max_ratio:.4f}")
    return EXIT_OK


def _spec_from_file(path: str, args) -> ExperimentSpec:
    with open(path) as fh:
        raw = json.load(fh)
    if "example" in raw:
        ex = raw["example"]
        config = example_config(ex["id"], ex["n"], ex.get("constants"))
    elif "config" in raw:
        config = ModelConfig.from_dict(raw["config"])
    else:
        raise ConfigError("spec file needs a 'config' or 'example' entry")
    if args.gamma is not None:
        config = ModelConfig.from_arrays(
            config.n, config.sizes, config.probs, config.q, args.gamma
        )
    solver = None
    if "solver" in raw:
        solver = SolverOptions(**raw["solver"])
    return ExperimentSpec(
        config=config,
        algorithms=tuple(raw.get("algorithms", ["convex"])),
        trials=int(raw.get("trials", 10)),
        base_seed=int(raw.get("base_seed", args.seed)),
        config_id=str(raw.get("config_id", "config")),
        solver_options=solver,
        restarts=int(raw.get("restarts", 10)),
    )


def cmd_montecarlo(args) -> int:
    spec = _spec_from_file(args.spec, args)
    result = run_monte_carlo(spec, workers=args.workers)
    if args.out is not None:
        write_results(result.rows, args.out, fmt=args.format,
                      include_timings=args.timings)
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_table1(args) -> int:
    n_grid = [int(float(tok)) for tok in args.n_grid.split(",") if tok]
    example_ids = tuple(int(tok) for tok in args.examples.split(",") if tok)
    rows = run_table1(n_grid, C=args.constant_c, eta=args.eta,
                      example_ids=example_ids)
    if args.out is None:
        for row in rows:
            print(row)
    else:
        write_table1(rows, args.out, fmt=args.format)
        print(f"wrote {args.out} ({len(rows)} rows)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsbmlab",
        description="Laboratory for exact cluster recovery in heterogeneous "
                    "planted-partition graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a graph and write it to a file")
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("classify", help="evaluate recoverability conditions")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("recover", help="recover the partition from a graph file")
    _add_common(p)
    p.add_argument("--adjacency", type=str, required=True, help="graph file")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="convex")
    p.add_argument("--max-iter", type=int, default=SolverOptions().max_iter)
    p.add_argument("--step", type=float, default=SolverOptions().step)
    p.add_argument("--threshold", type=float,
                   default=SolverOptions().rounding_threshold)
    p.add_argument("--restarts", type=int, default=10)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("bench-spectral",
                       help="sample centered adjacencies and report "
                            "norm-to-bound ratios")
    _add_common(p)
    p.add_argument("--trials", type=int, default=50)
    p.set_defaults(func=cmd_bench_spectral)

    p = sub.add_parser("montecarlo", help="run a Monte Carlo experiment spec")
    _add_common(p, config_source=False)
    p.add_argument("--spec", type=str, required=True, help="JSON experiment spec")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timings", action="store_true",
                   help="include wall-clock column (breaks byte-level "
                        "reproducibility)")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("table1", help="classification margins across presets and n")
    _add_common(p, config_source=False)
    p.add_argument("--n-grid", type=str, default="1e4,1e5,1e6,1e7",
                   help="comma-separated n values")
    p.add_argument("--examples", type=str, default="1,2,3,4,5,6",
                   help="comma-separated preset ids")
    p.set_defaults(func=cmd_table1)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
