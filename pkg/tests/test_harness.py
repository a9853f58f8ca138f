import copy
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from distopt.errors import ConfigurationError
from distopt.harness import SCHEMA, export, fit_slope, load_config, read_json, run_experiment, sweep, trace_csv, validate
from distopt.harness.cli import main
from distopt.harness.export import trace_from_dict, trace_to_dict
from distopt.harness.runner import ALGORITHMS, repeat_seeds
from distopt.harness.sweep import expand_grid, metric
from distopt.trace import CSV_COLUMNS, RunTrace

ROOT = Path(__file__).resolve().parents[1]
DATA = Path(__file__).resolve().parent / "data"

SGD = {
    "version": 1,
    "seed": 5,
    "record": 10,
    "problem": {"kind": "random_quadratic", "nodes": 2, "dim": 4, "L": 2.0, "mu": 0.5,
                "noise": {"kind": "gaussian", "sigma2": 1.0}},
    "algorithm": {"name": "sgd", "params": {"schedule": {"kind": "constant", "h": 0.1}}},
    "budget": {"max_iterations": 50},
}

AGD = {
    "version": 1,
    "seed": 5,
    "problem": {"kind": "random_quadratic", "dim": 4, "L": 2.0, "mu": 0.5},
    "algorithm": {"name": "accelerated_gradient"},
    "budget": {"max_iterations": 20},
}


def with_(config, **changes):
    out = copy.deepcopy(config)
    out.update(changes)
    return out


# -- schema ------------------------------------------------------------------------


def test_schema_accepts_shipped_configs():
    validate(load_config(ROOT / "configs" / "sgd_quadratic.json"))
    validate(load_config(ROOT / "configs" / "decentralized_ring.json"))
    spec = json.loads((ROOT / "configs" / "consensus_rings.json").read_text())
    for cfg in expand_grid(spec):
        validate(cfg)


def test_schema_rejects_unknown_keys():
    with pytest.raises(ConfigurationError):
        validate(with_(SGD, colour="blue"))
    bad = copy.deepcopy(SGD)
    bad["problem"]["flavour"] = 1
    with pytest.raises(ConfigurationError):
        validate(bad)


def test_schema_requires_seed_and_version():
    for key in ("seed", "version", "algorithm", "budget"):
        cfg = copy.deepcopy(SGD)
        del cfg[key]
        with pytest.raises(ConfigurationError):
            validate(cfg)
    with pytest.raises(ConfigurationError):
        validate(with_(SGD, version=2))
    with pytest.raises(ConfigurationError):
        validate(with_(SGD, budget={}))


def test_schema_lists_every_algorithm():
    names = SCHEMA["properties"]["algorithm"]["properties"]["name"]["enum"]
    assert set(names) == set(ALGORITHMS)


def test_unknown_algorithm_parameter_raises():
    cfg = copy.deepcopy(AGD)
    cfg["algorithm"]["params"] = {"momentum": 0.9}
    with pytest.raises(ConfigurationError):
        run_experiment(cfg)


# -- run_experiment ----------------------------------------------------------------


def test_identical_config_gives_identical_csv_bytes(tmp_path):
    a = export(run_experiment(copy.deepcopy(SGD)), tmp_path / "a")
    b = export(run_experiment(copy.deepcopy(SGD)), tmp_path / "b")
    assert [Path(p).name for p in a] == [Path(p).name for p in b]
    for pa, pb in zip(a, b):
        assert Path(pa).read_bytes() == Path(pb).read_bytes()


def test_seed_change_affects_only_stochastic_runs():
    s1 = run_experiment(copy.deepcopy(SGD)).trace
    s2 = run_experiment(with_(SGD, seed=6)).trace
    assert trace_csv(s1) != trace_csv(s2)
    # the algorithm seed alone: keep the problem, change the repeat seeds
    rep = run_experiment(with_(SGD, repeats=2))
    assert trace_csv(rep.traces[0]) != trace_csv(rep.traces[1])
    det = run_experiment(with_(AGD, repeats=2))
    assert trace_csv(det.traces[0]) == trace_csv(det.traces[1])


def test_zero_budget_gives_single_record():
    tr = run_experiment(with_(AGD, budget={"max_iterations": 0})).trace
    assert len(tr) == 1 and tr.final.round == 0
    tr = run_experiment(with_(SGD, budget={"max_iterations": 0})).trace
    assert len(tr) == 1


def test_repeats_and_aggregate():
    res = run_experiment(with_(SGD, repeats=3))
    assert res.seeds == repeat_seeds(5, 3)
    assert len(set(res.seeds)) == 3
    assert repeat_seeds(5, 1) == [5]
    expected = np.mean([tr.column("subopt") for tr in res.traces], axis=0)
    np.testing.assert_allclose(res.aggregate["subopt_mean"], expected, rtol=1e-15)
    assert res.aggregate["round"].tolist() == res.trace.column("round").tolist()


ALL_CONFIGS = {
    "consensus": {"topology": {"kind": "ring", "m": 8}, "algorithm": {"name": "consensus", "params": {"tol": 1e-3}},
                  "budget": {"max_iterations": 10_000}},
    "sgd": {"problem": {"kind": "logistic", "dim": 3, "samples": 10, "components": 4, "noise": {"kind": "subsample"}},
            "algorithm": {"name": "sgd", "params": {"schedule": {"kind": "constant", "h": 0.1}}},
            "budget": {"max_iterations": 20}},
    "accelerated_gradient": AGD,
    "variance_reduced": {"problem": {"kind": "random_quadratic", "components": 5, "dim": 3, "mu": 0.2},
                         "algorithm": {"name": "variance_reduced"}, "budget": {"max_iterations": 20}},
    "gradient_sliding": {"problem": {"kind": "quadratic", "A": [[1, 0], [0, 1]], "b": [1, 0.05]},
                         "algorithm": {"name": "gradient_sliding",
                                       "params": {"term": {"kind": "l1", "weight": 0.1}, "eps": 1e-2}},
                         "budget": {"max_iterations": 1000}},
    "decentralized_sgd": {"problem": {"kind": "random_quadratic", "nodes": 4, "dim": 3},
                          "topology": {"kind": "ring", "m": 4}, "compressor": {"kind": "randk_scaled", "k": 1},
                          "algorithm": {"name": "decentralized_sgd"}, "budget": {"max_iterations": 20}},
    "decentralized_accelerated": {"problem": {"kind": "random_quadratic", "nodes": 4, "dim": 3, "mu": 0.5},
                                  "topology": {"kind": "erdos_renyi", "m": 4, "p": 0.6, "schedule": "random"},
                                  "algorithm": {"name": "decentralized_accelerated"},
                                  "budget": {"target_eps": 1e-6, "max_iterations": 500}},
    "local_sgd": {"problem": {"kind": "random_quadratic", "dim": 3, "noise": {"kind": "gaussian", "sigma2": 1.0}},
                  "algorithm": {"name": "local_sgd", "params": {"K": 3, "T": 4}}, "budget": {"max_iterations": 3}},
    "compressed_distributed_sgd": {"problem": {"kind": "random_quadratic", "nodes": 3, "dim": 4,
                                               "noise": {"kind": "gaussian", "sigma2": 0.1}},
                                   "compressor": {"kind": "simplex_vertex"},
                                   "algorithm": {"name": "compressed_distributed_sgd"},
                                   "budget": {"max_iterations": 20}},
    "zo_sgd": {"problem": {"kind": "random_quadratic", "dim": 3},
               "algorithm": {"name": "zo_sgd", "params": {"tau": 1e-5}}, "budget": {"max_iterations": 20}},
    "gradient_free_sliding": {"problem": {"kind": "quadratic", "A": [[1, 0], [0, 1]], "b": [1, 0.05]},
                              "algorithm": {"name": "gradient_free_sliding",
                                            "params": {"term": {"kind": "l1", "weight": 0.1}, "eps": 1e-1}},
                              "budget": {"max_iterations": 1000}},
}


@pytest.mark.parametrize("name", sorted(ALL_CONFIGS))
def test_every_algorithm_runs_from_config(name, tmp_path):
    cfg = {"version": 1, "seed": 1, **copy.deepcopy(ALL_CONFIGS[name])}
    res = run_experiment(cfg)
    assert res.trace.algorithm in (name, "accelerated", "variance_reduced") or name in res.trace.algorithm
    paths = export(res, tmp_path)
    header = Path(paths[0]).read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)


def test_missing_pieces_raise():
    with pytest.raises(ConfigurationError):
        run_experiment({"version": 1, "seed": 0, "algorithm": {"name": "sgd"}, "budget": {"max_iterations": 1}})
    cfg = {"version": 1, "seed": 0, "problem": {"kind": "random_quadratic", "nodes": 2, "dim": 2},
           "algorithm": {"name": "decentralized_sgd"}, "budget": {"max_iterations": 1}}
    with pytest.raises(ConfigurationError):
        run_experiment(cfg)


# -- export ------------------------------------------------------------------------


def test_empty_trace_is_header_only():
    assert trace_csv(RunTrace("empty")) == ",".join(CSV_COLUMNS) + "\n"


def test_csv_header_matches_golden_file():
    golden = (DATA / "golden_header.csv").read_text()
    assert trace_csv(RunTrace("empty")) == golden


def test_json_round_trip(tmp_path):
    res = run_experiment(copy.deepcopy(SGD))
    paths = export(res, tmp_path, formats=("json",))
    trace, config = read_json(paths[0])
    assert config == SGD
    assert trace_to_dict(trace) == trace_to_dict(res.trace)
    again = trace_from_dict(json.loads(json.dumps(trace_to_dict(res.trace, SGD))))
    assert trace_csv(again) == trace_csv(res.trace)


def test_json_rows_mirror_csv_columns(tmp_path):
    res = run_experiment(copy.deepcopy(AGD))
    data = trace_to_dict(res.trace, AGD)
    assert data["columns"] == list(CSV_COLUMNS)
    assert data["config"] == AGD


# -- sweeps and fits ----------------------------------------------------------------


def test_fit_exact_power_law():
    x = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    fit = fit_slope(x, x**2, "x", "y")
    assert abs(fit.slope - 2.0) <= 1e-9
    assert fit.stderr <= 1e-9
    assert fit.points == 5


def test_fit_needs_three_positive_points():
    with pytest.raises(ConfigurationError):
        fit_slope([1.0, 2.0], [1.0, 4.0])
    with pytest.raises(ConfigurationError):
        fit_slope([1.0, 2.0, 3.0], [1.0, -4.0, 9.0])


def test_single_cell_grid_has_no_fit():
    spec = {"base": copy.deepcopy(AGD), "fits": [{"x": "config.seed", "y": "final.subopt"}]}
    res = sweep(spec)
    assert len(res.cells) == 1 and len(res.traces) == 1
    assert res.fits == []
    assert res.skipped


def test_failed_cell_is_recorded_and_sweep_continues(tmp_path):
    spec = {"base": copy.deepcopy(AGD), "vary": {"problem.mu": [0.5, 5.0, 0.1]}}
    res = sweep(spec)
    assert [c.error is None for c in res.cells] == [True, False, True]
    export(res, tmp_path)
    assert (tmp_path / "cell_001" / "error.txt").exists()
    assert (tmp_path / "cell_000" / "trace_000.csv").exists()


def test_consensus_sweep_reproduces_rate_separation():
    spec = json.loads((ROOT / "configs" / "consensus_rings.json").read_text())
    plain = sweep(spec)
    cheb_spec = copy.deepcopy(spec)
    cheb_spec["base"]["algorithm"]["params"]["method"] = "plain"
    slow = sweep(cheb_spec)
    assert plain.fits[0].within(0.5, 0.15)
    assert slow.fits[0].within(1.0, 0.15)


def test_sweep_threads_give_same_results(monkeypatch):
    spec = {"base": copy.deepcopy(SGD), "vary": {"seed": [1, 2, 3, 4]},
            "fits": [{"x": "config.seed", "y": "final.subopt"}]}
    serial = sweep(spec)
    monkeypatch.setenv("DISTOPT_THREADS", "4")
    parallel = sweep(spec)
    assert [trace_csv(t) for t in serial.traces] == [trace_csv(t) for t in parallel.traces]
    assert serial.fits == parallel.fits


def test_metrics():
    res = run_experiment(copy.deepcopy(AGD))
    assert metric(res, "final.round") == 20
    assert metric(res, "config.problem.mu") == 0.5
    assert metric(res, "meta.L") == pytest.approx(2.0)
    assert metric(res, "reach.round@1e300") == 0
    with pytest.raises(ConfigurationError):
        metric(res, "reach.round@1e-300")
    with pytest.raises(ConfigurationError):
        metric(res, "median.subopt")


# -- command line --------------------------------------------------------------------


def test_cli_run_and_report(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--config", str(ROOT / "configs" / "sgd_quadratic.json"), "--out", str(out)]) == 0
    assert (out / "trace_000.csv").exists() and (out / "aggregate.csv").exists()
    assert main(["report", "--in", str(out)]) == 0
    assert "sgd" in capsys.readouterr().out


def test_cli_sweep_prints_slope_table(tmp_path, capsys):
    spec = {"base": copy.deepcopy(AGD), "vary": {"problem.L": [2.0, 4.0, 8.0]},
            "fits": [{"x": "config.problem.L", "y": "meta.L"}]}
    cfg = tmp_path / "grid.json"
    cfg.write_text(json.dumps(spec))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "grid")]) == 0
    capsys.readouterr()
    assert main(["report", "--in", str(tmp_path / "grid")]) == 0
    assert "1.0000" in capsys.readouterr().out


def test_cli_errors_exit_nonzero(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(with_(SGD, colour="blue")))
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 2
    assert main(["report", "--in", str(tmp_path / "nothing")]) == 1


def test_cli_assert_mode_exit_code(tmp_path, monkeypatch):
    from distopt.harness import cli

    cfg = tmp_path / "agd.json"
    cfg.write_text(json.dumps(AGD))
    monkeypatch.setattr(cli, "_acceptance", lambda only=None: False)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--assert"]) == 1
    monkeypatch.setattr(cli, "_acceptance", lambda only=None: True)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--assert"]) == 0


def test_module_entry_point(tmp_path):
    cfg = tmp_path / "agd.json"
    cfg.write_text(json.dumps(AGD))
    out = subprocess.run([sys.executable, "-m", "distopt", "run", "--config", str(cfg), "--out", str(tmp_path / "o")],
                         capture_output=True, text=True, env={**os.environ})
    assert out.returncode == 0, out.stderr
    assert "accelerated_gradient" in out.stdout
