"""Command-line entry point: ``rlfs {select,sweep-epsilon,rank,synth}``."""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import baselines, reporting
from .agent import run_search
from .config import ConfigError, RunConfig, read_config_file, resolve
from .dataset import DatasetError, generate_synthetic, load_csv, write_csv
from .evaluator import SubsetEvaluator

log = logging.getLogger("rlfs")


class Outputs:
    """Tracks files written by a command so a failure leaves nothing half-written."""

    def __init__(self, out_dir):
        self.dir = Path(out_dir)
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.dir / name
        self.written.append(p)
        return p

    def __enter__(self):
        self.dir.mkdir(parents=True, exist_ok=True)
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            for p in self.written:
                p.unlink(missing_ok=True)
        return False


def _load(config: RunConfig):
    if not config.data:
        raise ConfigError("--data is required")
    return load_csv(config.data, config.label_column)


def _evaluator(config: RunConfig, data) -> SubsetEvaluator:
    return SubsetEvaluator(data, config.folds, config.svm_config(), seed=config.seed)


def cmd_select(config: RunConfig) -> int:
    data = _load(config)
    result = run_search(config.agent_config(), data, _evaluator(config, data))
    with Outputs(config.out_dir) as out:
        reporting.write_json(out.path("config.json"), config.echo())
        reporting.write_json(out.path("report.json"), reporting.search_report(result, data, config.echo()))
        reporting.write_rows(out.path("curves.csv"), ["episode", "max_value", "max_accuracy", "states_visited"],
                             reporting.curve_rows(result))
    if result.best is None:
        print("no episodes run; no subset selected")
    else:
        names = [data.feature_names[i] for i in result.best.subset.indices()]
        print(f"best subset ({len(names)} features): {', '.join(names)}")
        print(f"cv accuracy: {result.best.mean_accuracy:.4f} +- {result.best.std_accuracy:.4f}")
        print(f"states visited: {result.states_visited}")
    return 0


def _sweep_seed(config: RunConfig, data, seed: int) -> list[tuple]:
    """All epsilon cells for one seed; they share the seed's evaluation cache."""
    cell = resolve(config.echo() | {"seed": seed})
    evaluator = _evaluator(cell, data)
    rows = []
    for eps in config.epsilons:
        result = run_search(cell.agent_config(epsilon=eps), data, evaluator)
        best = result.best.mean_accuracy if result.best is not None else float("nan")
        rows.append((eps, seed, result.states_visited, best))
        log.info("epsilon=%s seed=%d states=%d best=%.4f", eps, seed, result.states_visited, best)
    return rows


def cmd_sweep_epsilon(config: RunConfig, jobs: int = 1) -> int:
    data = _load(config)
    seeds = [config.seed + i for i in range(config.seeds_per_point)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            per_seed = list(pool.map(_sweep_seed, [config] * len(seeds), [data] * len(seeds), seeds))
    else:
        per_seed = [_sweep_seed(config, data, s) for s in seeds]
    cells = sorted((row for rows in per_seed for row in rows), key=lambda r: (config.epsilons.index(r[0]), r[1]))
    summary = []
    for eps in config.epsilons:
        mine = [r for r in cells if r[0] == eps]
        summary.append((eps, "mean", float(np.mean([r[2] for r in mine])), float(np.mean([r[3] for r in mine]))))
    with Outputs(config.out_dir) as out:
        reporting.write_json(out.path("config.json"), config.echo())
        reporting.write_rows(out.path("sweep.csv"), ["epsilon", "seed", "states_visited", "best_accuracy"],
                             cells + summary)
    for eps, _, states, acc in summary:
        print(f"epsilon={eps:<5} mean states visited={states:.1f} mean best accuracy={acc:.4f}")
    return 0


def cmd_rank(config: RunConfig) -> int:
    data = _load(config)
    evaluator = _evaluator(config, data)
    k_max = config.k_max or data.n_features
    if k_max > data.n_features:
        raise ConfigError(f"k_max={k_max} exceeds the {data.n_features} available features")
    rankings = []
    for method in config.methods:
        if method == "rl-aor":
            result = run_search(config.agent_config(), data, evaluator)
            rankings.append(baselines.ranking_from_aor(result.aor))
        else:
            rankings.append(baselines.FILTERS[method](data))
    rank_rows, curve_rows = [], []
    for ranking in rankings:
        for pos, f in enumerate(ranking.order, 1):
            rank_rows.append((ranking.method, pos, f, data.feature_names[f], float(ranking.scores[f])))
        for k, e in baselines.evaluate_topk_curve(data, ranking, k_max, evaluator):
            curve_rows.append((ranking.method, k, e.mean_accuracy, e.std_accuracy))
    with Outputs(config.out_dir) as out:
        reporting.write_json(out.path("config.json"), config.echo())
        reporting.write_rows(out.path("rankings.csv"), ["method", "rank", "feature_index", "feature_name", "score"],
                             rank_rows)
        reporting.write_rows(out.path("topk_curves.csv"), ["method", "k", "mean_accuracy", "std_accuracy"],
                             curve_rows)
    for ranking in rankings:
        top = ", ".join(data.feature_names[f] for f in ranking.order[:5])
        print(f"{ranking.method:>7}: {top}")
    return 0


def cmd_synth(config: RunConfig, name: str = "synthetic") -> int:
    data = generate_synthetic(config.n_samples, config.n_informative, config.n_noise, config.seed)
    with Outputs(config.out_dir) as out:
        csv_path = out.path(f"{name}.csv")
        write_csv(data, csv_path)
        reporting.write_json(out.path(f"{name}.informative.json"), {
            "informative": list(range(config.n_informative)),
            "config": config.echo(),
        })
    print(f"wrote {csv_path} ({data.n_samples} rows, {data.n_features} features)")
    return 0


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run configuration (flags override --config)")
    g.add_argument("--config", help="JSON or key = value file; emitted config.json/report.json also work")
    g.add_argument("--data", help="CSV file with a header row")
    g.add_argument("--label-column", help="label column name, or 'last' (default)")
    g.add_argument("--alpha", type=float, help="TD learning rate (default 0.1)")
    g.add_argument("--gamma", type=float, help="discount factor (default 0.9)")
    g.add_argument("--epsilon", type=float, help="exploration probability (default 0.5)")
    g.add_argument("--episodes", type=int, help="number of episodes (default 100)")
    g.add_argument("--start-mode", choices=["empty", "random-subset"])
    g.add_argument("--max-subset-size", type=int, help="stop episodes at this many features")
    g.add_argument("--folds", type=int, help="cross-validation folds (default 5)")
    g.add_argument("--svm-c", type=float, help="SVM penalty C (default 1.0)")
    g.add_argument("--svm-gamma", help="RBF width, or 'auto' = 1/n_features (default)")
    g.add_argument("--seed", type=int, help="root random seed (default 0)")
    g.add_argument("--out-dir", help="output directory (default ./out)")
    g.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rlfs", description="Reinforcement-learning wrapper feature selection.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="run the TD(0) search and report the best subset")
    _common(p)

    p = sub.add_parser("sweep-epsilon", help="states visited and best accuracy across epsilon values")
    _common(p)
    p.add_argument("--epsilons", help="comma-separated values in [0, 1]")
    p.add_argument("--seeds-per-point", type=int, help="seeds per epsilon, counting up from --seed (default 20)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (one seed per task)")

    p = sub.add_parser("rank", help="feature rankings and their top-k accuracy curves")
    _common(p)
    p.add_argument("--methods", help="comma-separated subset of rl-aor,pearson,fisher,ttest")
    p.add_argument("--k-max", type=int, help="longest top-k prefix to evaluate (default: all features)")

    p = sub.add_parser("synth", help="write a synthetic dataset with known informative features")
    _common(p)
    p.add_argument("--n-samples", type=int)
    p.add_argument("--n-informative", type=int)
    p.add_argument("--n-noise", type=int)
    p.add_argument("--name", default="synthetic", help="output file stem (default 'synthetic')")
    return parser


_NOT_CONFIG = {"command", "config", "verbose", "jobs", "name"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        file_values = read_config_file(args.config) if args.config else {}
        flags = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
        config = resolve(file_values, flags)
        if args.command == "select":
            return cmd_select(config)
        if args.command == "sweep-epsilon":
            return cmd_sweep_epsilon(config, jobs=args.jobs)
        if args.command == "rank":
            return cmd_rank(config)
        return cmd_synth(config, name=args.name)
    except (ConfigError, DatasetError, FileNotFoundError, ValueError, IndexError) as exc:
        print(f"rlfs {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
