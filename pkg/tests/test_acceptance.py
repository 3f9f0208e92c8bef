"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line (printed in the terminal summary) and then
asserts, so a miss shows up both in the summary block and as a test failure.
Run only these with ``pytest -m acceptance``.
"""

import csv
import json
import time
from pathlib import Path

import numpy as np
import pytest

import test_agent
import test_evaluator
import test_subset
import test_svm
from conftest import record
from rlfs.agent import AgentConfig, run_search
from rlfs.cli import main
from rlfs.dataset import generate_synthetic

pytestmark = pytest.mark.acceptance

DATASETS = Path(__file__).resolve().parent.parent / "datasets"

BENCHMARKS = {
    # name: (extra flags, accuracy floor, time limit in seconds)
    "australian": ([], 0.82, 600),
    "wpbc": (["--episodes", "150"], 0.72, 900),
    "sonar": (["--episodes", "200", "--max-subset-size", "30"], 0.68, 1200),
}


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def benchmark_runs(tmp_path_factory):
    runs = {}
    for name, (flags, _, _) in BENCHMARKS.items():
        out = tmp_path_factory.mktemp(name)
        start = time.perf_counter()
        code = main(["select", "--data", str(DATASETS / f"{name}.csv"), *flags, "--out-dir", str(out)])
        elapsed = time.perf_counter() - start
        runs[name] = (code, out, elapsed)
    return runs


@pytest.mark.parametrize("number, name", [(1, "australian"), (2, "wpbc"), (3, "sonar")])
def test_benchmark_accuracy(benchmark_runs, number, name):
    code, out, elapsed = benchmark_runs[name]
    _, floor, limit = BENCHMARKS[name]
    acc = json.loads((out / "report.json").read_text())["best_accuracy"] if code == 0 else float("nan")
    ok = code == 0 and acc >= floor and elapsed <= limit
    record(f"{number}. {name} best-subset accuracy", ok,
           f"{acc:.4f} (floor {floor}), {elapsed:.0f} s (limit {limit} s)")
    assert ok


def test_running_max_value_non_decreasing(benchmark_runs):
    details, ok = [], True
    for name, (code, out, _) in benchmark_runs.items():
        curve = [float(r["max_value"]) for r in _rows(out / "curves.csv")]
        report = json.loads((out / "report.json").read_text())
        mono = all(b >= a for a, b in zip(curve, curve[1:])) and curve == report["max_value_curve"]
        ok &= code == 0 and mono
        details.append(f"{name} {len(curve)} episodes, final {curve[-1]:.4f}")
    record("4. running-max state value non-decreasing", ok, "; ".join(details))
    assert ok


def test_exploration_increases_states_visited(tmp_path):
    assert main(["synth", "--seed", "1", "--out-dir", str(tmp_path)]) == 0
    out = tmp_path / "sweep"
    assert main(["sweep-epsilon", "--data", str(tmp_path / "synthetic.csv"), "--epsilons", "0,0.25,0.5,0.75,1",
                 "--seeds-per-point", "20", "--out-dir", str(out)]) == 0
    summary = [r for r in _rows(out / "sweep.csv") if r["seed"] == "mean"]
    means = [float(r["states_visited"]) for r in summary]
    drops = [(a - b) / a for a, b in zip(means, means[1:]) if b < a]
    ok = len(drops) <= 1 and all(d <= 0.02 for d in drops)
    record("5. mean states visited vs epsilon", ok,
           " <= ".join(f"{m:.1f}" for m in means) + f" ({len(drops)} adjacent drop(s))")
    assert ok


def test_informative_features_recovered():
    hits = 0
    for seed in range(20):
        data = generate_synthetic(200, 3, 7, seed=seed)
        result = run_search(AgentConfig(epsilon=0.5, episodes=150, seed=seed), data)
        hits += set(result.ranking()[:3]) == {0, 1, 2}
    ok = hits >= 16
    record("6. top-3 AOR equals informative set", ok, f"{hits}/20 seeds (need 16)")
    assert ok


PROPERTY_SUITES = {
    "AOR incremental mean (1000 sequences)": [test_agent.test_aor_matches_brute_force_mean],
    "TD(0) 4-state chain": [test_agent.test_td_chain_converges_to_discounted_returns],
    "SMO vs dense QP (200 problems)": [lambda: test_svm.test_smo_matches_dense_qp(0),
                                       lambda: test_svm.test_smo_matches_dense_qp(1)],
    "evaluation-cache transparency": [test_evaluator.test_cache_transparency],
    "subset canonicalization": [test_subset.test_insertion_order_does_not_matter,
                                test_evaluator.test_insertion_order_shares_cache_entry],
}


@pytest.mark.parametrize("suite", list(PROPERTY_SUITES))
def test_property_suite(suite):
    start = time.perf_counter()
    try:
        for fn in PROPERTY_SUITES[suite]:
            fn()
        passed, why = True, ""
    except AssertionError as exc:
        passed, why = False, f" ({exc})"
    elapsed = time.perf_counter() - start
    ok = passed and elapsed < 60
    record(f"7. property suite: {suite}", ok, f"{'green' if passed else 'failed'}{why} in {elapsed:.1f} s")
    assert ok


def _tree(path):
    return {p.relative_to(path).as_posix(): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def test_rerun_from_emitted_config_is_byte_identical(tmp_path):
    assert main(["synth", "--seed", "3", "--n-samples", "80", "--out-dir", str(tmp_path / "data")]) == 0
    data = tmp_path / "data" / "synthetic.csv"
    commands = {
        "synth": (["synth", "--seed", "3", "--n-samples", "80"], "synthetic.informative.json"),
        "select": (["select", "--data", str(data), "--episodes", "20", "--seed", "3"], "config.json"),
        "sweep-epsilon": (["sweep-epsilon", "--data", str(data), "--episodes", "10", "--epsilons", "0,0.5,1",
                           "--seeds-per-point", "3", "--seed", "3"], "config.json"),
        "rank": (["rank", "--data", str(data), "--episodes", "20", "--seed", "3"], "config.json"),
    }
    failures = []
    for name, (argv, emitted) in commands.items():
        first, again = tmp_path / f"{name}-1", tmp_path / f"{name}-2"
        main([*argv, "--out-dir", str(first)])
        main([name, "--config", str(first / emitted), "--out-dir", str(again)])
        if not _tree(first) or _tree(first) != _tree(again):
            failures.append(name)
    ok = not failures
    record("8. byte-identical rerun from emitted config", ok,
           f"{len(commands) - len(failures)}/{len(commands)} commands" + (f"; differ: {failures}" if failures else ""))
    assert ok
