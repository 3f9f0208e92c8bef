import csv
import json

import numpy as np
import pytest

from rlfs.cli import Outputs, main
from rlfs.dataset import Dataset, generate_synthetic, write_csv


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture
def toy(tmp_path):
    """Three features; the first is a copy of the label."""
    rng = np.random.default_rng(0)
    y = np.repeat([-1, 1], 10)
    x = np.column_stack([y, rng.normal(size=20), rng.normal(size=20)]).astype(float)
    path = tmp_path / "toy.csv"
    write_csv(Dataset(x, y, ["copy", "n1", "n2"]), path)
    return path


@pytest.fixture(scope="module")
def synthetic(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--n-samples", "200", "--n-informative", "3", "--n-noise", "7", "--seed", "1",
                 "--out-dir", str(out)]) == 0
    return out


def test_synth_shape_and_sidecar(synthetic):
    rows = _rows(synthetic / "synthetic.csv")
    assert len(rows) == 201 and {len(r) for r in rows} == {11}
    sidecar = json.loads((synthetic / "synthetic.informative.json").read_text())
    assert sidecar["informative"] == [0, 1, 2]
    assert sidecar["config"]["seed"] == 1


def test_synth_is_repeatable(synthetic, tmp_path):
    main(["synth", "--seed", "1", "--out-dir", str(tmp_path)])
    for name in ("synthetic.csv", "synthetic.informative.json"):
        assert (tmp_path / name).read_bytes() == (synthetic / name).read_bytes()


def test_synth_rejects_bad_parameters(tmp_path, capsys):
    assert main(["synth", "--n-informative", "0", "--out-dir", str(tmp_path)]) != 0
    assert "error" in capsys.readouterr().err
    assert not list(tmp_path.iterdir())


def test_select_outputs(toy, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["select", "--data", str(toy), "--episodes", "1", "--out-dir", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["states_visited"] <= 4
    assert report["episodes"] == 1
    assert report["config"]["episodes"] == 1
    assert report["best_subset"]["names"]
    assert _rows(out / "curves.csv")[0] == ["episode", "max_value", "max_accuracy", "states_visited"]
    assert "best subset" in capsys.readouterr().out


def test_select_zero_episodes(toy, tmp_path):
    assert main(["select", "--data", str(toy), "--episodes", "0", "--out-dir", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["best_subset"] is None and report["states_visited"] == 0


def test_unreadable_path(tmp_path, capsys):
    missing = tmp_path / "missing.csv"
    assert main(["select", "--data", str(missing), "--out-dir", str(tmp_path / "o")]) != 0
    assert str(missing) in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_data_required(capsys):
    assert main(["select"]) == 2
    assert "--data" in capsys.readouterr().err


def test_invalid_epsilon_rejected_before_running(toy, tmp_path, capsys):
    assert main(["sweep-epsilon", "--data", str(toy), "--epsilons", "0,1.5", "--out-dir", str(tmp_path)]) == 2
    assert "1.5" in capsys.readouterr().err
    assert not (tmp_path / "sweep.csv").exists()


def test_sweep_shape(toy, tmp_path):
    assert main(["sweep-epsilon", "--data", str(toy), "--epsilons", "0,0.5,1", "--seeds-per-point", "20",
                 "--episodes", "3", "--out-dir", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "sweep.csv")
    assert rows[0] == ["epsilon", "seed", "states_visited", "best_accuracy"]
    data = [r for r in rows[1:] if r[1] != "mean"]
    summary = [r for r in rows[1:] if r[1] == "mean"]
    assert len(data) == 60 and len(summary) == 3
    for eps, _, states, acc in summary:
        mine = [r for r in data if r[0] == eps]
        assert float(states) == pytest.approx(np.mean([int(r[2]) for r in mine]))
        assert float(acc) == pytest.approx(np.mean([float(r[3]) for r in mine]))


def test_sweep_cell_matches_select(toy, tmp_path):
    args = ["--data", str(toy), "--episodes", "4", "--epsilon", "0.25", "--seed", "3"]
    main(["select", *args, "--out-dir", str(tmp_path / "s")])
    main(["sweep-epsilon", *args, "--epsilons", "0.25", "--seeds-per-point", "1", "--out-dir", str(tmp_path / "w")])
    report = json.loads((tmp_path / "s" / "report.json").read_text())
    cell = _rows(tmp_path / "w" / "sweep.csv")[1]
    assert int(cell[2]) == report["states_visited"]
    assert float(cell[3]) == report["best_accuracy"]


def test_sweep_parallel_matches_serial(toy, tmp_path):
    args = ["sweep-epsilon", "--data", str(toy), "--epsilons", "0,1", "--seeds-per-point", "3", "--episodes", "2"]
    main([*args, "--out-dir", str(tmp_path / "a")])
    main([*args, "--jobs", "2", "--out-dir", str(tmp_path / "b")])
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()


def test_rank_label_copy_first(toy, tmp_path):
    assert main(["rank", "--data", str(toy), "--methods", "pearson", "--out-dir", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "rankings.csv")
    assert rows[0] == ["method", "rank", "feature_index", "feature_name", "score"]
    assert rows[1][:4] == ["pearson", "1", "0", "copy"]
    curves = _rows(tmp_path / "topk_curves.csv")
    assert curves[0] == ["method", "k", "mean_accuracy", "std_accuracy"]
    assert len(curves) == 1 + 3


def test_rank_all_methods(synthetic, tmp_path):
    assert main(["rank", "--data", str(synthetic / "synthetic.csv"), "--episodes", "10", "--k-max", "3",
                 "--out-dir", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "rankings.csv")[1:]
    assert len(rows) == 40
    assert {r[0] for r in rows} == {"rl-aor", "pearson", "fisher", "ttest"}
    assert len(_rows(tmp_path / "topk_curves.csv")) == 1 + 4 * 3


def test_rank_unknown_method(toy, tmp_path, capsys):
    assert main(["rank", "--data", str(toy), "--methods", "lasso", "--out-dir", str(tmp_path)]) == 2
    assert "lasso" in capsys.readouterr().err


def test_rank_k_max_too_large(toy, tmp_path):
    assert main(["rank", "--data", str(toy), "--methods", "fisher", "--k-max", "4", "--out-dir", str(tmp_path)]) == 2


def test_flags_override_config_file(toy, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"data = {toy}\nepisodes = 5\nseed = 2\n")
    main(["select", "--config", str(cfg), "--episodes", "2", "--out-dir", str(tmp_path / "o")])
    echoed = json.loads((tmp_path / "o" / "config.json").read_text())
    assert (echoed["episodes"], echoed["seed"]) == (2, 2)


@pytest.mark.parametrize("command, extra, files", [
    ("select", ["--episodes", "3"], ["config.json", "report.json", "curves.csv"]),
    ("sweep-epsilon", ["--episodes", "2", "--epsilons", "0,1", "--seeds-per-point", "2"],
     ["config.json", "sweep.csv"]),
    ("rank", ["--episodes", "2"], ["config.json", "rankings.csv", "topk_curves.csv"]),
])
def test_rerun_from_emitted_config_is_byte_identical(toy, tmp_path, command, extra, files):
    before = toy.read_bytes()
    first = tmp_path / "first"
    assert main([command, "--data", str(toy), "--seed", "5", *extra, "--out-dir", str(first)]) == 0
    for source in ("config.json", "report.json") if command == "select" else ("config.json",):
        again = tmp_path / f"again-{source}"
        assert main([command, "--config", str(first / source), "--out-dir", str(again)]) == 0
        for name in files:
            assert (again / name).read_bytes() == (first / name).read_bytes(), name
    assert toy.read_bytes() == before


def test_outputs_removed_on_failure(tmp_path):
    with pytest.raises(RuntimeError):
        with Outputs(tmp_path) as out:
            out.path("a.txt").write_text("partial")
            raise RuntimeError("boom")
    assert not (tmp_path / "a.txt").exists()


def test_label_column_flag(tmp_path):
    path = tmp_path / "lab.csv"
    data = generate_synthetic(20, 1, 1, seed=0)
    text = "y,f0,f1\n" + "".join(f"{int(l)},{float(a)!r},{float(b)!r}\n" for l, (a, b) in zip(data.labels, data.features))
    path.write_text(text)
    assert main(["select", "--data", str(path), "--label-column", "y", "--episodes", "1",
                 "--folds", "2", "--out-dir", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["dataset"]["n_features"] == 2
