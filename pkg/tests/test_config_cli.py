import json

import pytest

from tbrw import cli, config
from tbrw.config import ConfigError, derive_seed, parse_config
from tbrw.experiments import run_experiment


def test_parse_minimal_speed_curve():
    cfg = parse_config({"experiment": "speed-curve", "seed": 1,
                        "params": {"p_grid": [round(0.1 * k, 1)
                                              for k in range(1, 11)]}})
    assert cfg.experiment == "speed-curve"
    assert cfg.replicas == 1
    assert len(cfg.params["p_grid"]) == 10


def test_parse_rejects_zero_replicas():
    with pytest.raises(ConfigError, match="replicas"):
        parse_config({"experiment": "simulate", "seed": 1, "replicas": 0})


def test_parse_rejects_unknown_experiment():
    with pytest.raises(ConfigError) as err:
        parse_config({"experiment": "frobnicate", "seed": 1})
    assert "speed-curve" in str(err.value)
    assert "coupling-grand" in str(err.value)


def test_parse_requires_seed():
    with pytest.raises(ConfigError, match="seed"):
        parse_config({"experiment": "simulate"})


def test_parse_rejects_bad_schedule():
    with pytest.raises(ConfigError, match="schedule"):
        parse_config({"experiment": "simulate", "seed": 1,
                      "schedule": {"kind": "iid", "support": [0], "probs": [0.7]}})


def test_overrides_win():
    cfg = parse_config({"experiment": "tail", "seed": 1, "horizon": 10},
                       overrides={"horizon": 99, "seed": 5})
    assert cfg.horizon == 99
    assert cfg.master_seed == 5


def test_seed_derivation_stable_and_distinct():
    a = derive_seed(7, "tail", 0)
    assert a == derive_seed(7, "tail", 0)
    assert a != derive_seed(7, "tail", 1)
    assert a != derive_seed(7, "clt", 0)
    assert a != derive_seed(8, "tail", 0)


def test_config_hash_depends_on_content():
    c1 = parse_config({"experiment": "tail", "seed": 1})
    c2 = parse_config({"experiment": "tail", "seed": 2})
    assert c1.hash() != c2.hash()
    assert c1.hash() == parse_config({"experiment": "tail", "seed": 1}).hash()


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


def test_simulate_deterministic_outputs(tmp_path):
    base = {"experiment": "simulate", "seed": 11, "horizon": 40,
            "schedule": {"kind": "bernoulli", "p": 0.5}}
    cfg1 = parse_config({**base, "out": str(tmp_path / "a")})
    cfg2 = parse_config({**base, "out": str(tmp_path / "b")})
    run_experiment(cfg1)
    run_experiment(cfg2)
    for name in ("trajectory.csv", "renewals.csv", "summary.json"):
        assert _read(tmp_path / "a" / name) == _read(tmp_path / "b" / name)


def test_parallel_serial_equivalence(tmp_path):
    base = {"experiment": "renewal-stats", "seed": 3, "horizon": 600,
            "replicas": 6, "schedule": {"kind": "bernoulli", "p": 0.8}}
    cfg1 = parse_config({**base, "out": str(tmp_path / "serial"), "workers": 1})
    cfg2 = parse_config({**base, "out": str(tmp_path / "par"), "workers": 2})
    run_experiment(cfg1)
    run_experiment(cfg2)
    assert _read(tmp_path / "serial" / "renewals.csv") == \
        _read(tmp_path / "par" / "renewals.csv")
    assert _read(tmp_path / "serial" / "summary.json") == \
        _read(tmp_path / "par" / "summary.json")


def test_manifest_contents(tmp_path):
    cfg = parse_config({"experiment": "simulate", "seed": 4, "horizon": 12,
                        "schedule": {"kind": "bernoulli", "p": 1.0},
                        "out": str(tmp_path)})
    manifest = run_experiment(cfg)
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk["config_hash"] == cfg.hash() == manifest.config_hash
    assert on_disk["engine_version"] == "0.1.0"
    assert on_disk["replica_seeds"] == [derive_seed(4, "simulate", 0, "run")]
    assert set(on_disk["outputs"]) <= {"trajectory.csv", "trajectory.json",
                                       "renewals.csv", "summary.json"}


def test_cli_simulate_delta0(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "experiment": "simulate", "seed": 1, "horizon": 10,
        "schedule": {"kind": "iid", "support": [0], "probs": [1.0]},
        "out": str(tmp_path / "run")}))
    rc = cli.main(["simulate", "--config", str(cfg_path)])
    assert rc == 0
    rows = (tmp_path / "run" / "trajectory.csv").read_text().splitlines()
    depths = [int(r.split(",")[2]) for r in rows[1:]]
    assert depths == [1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1]


def test_cli_error_is_machine_readable(tmp_path, capsys):
    rc = cli.main(["simulate", "--config", str(tmp_path / "missing.json")])
    assert rc != 0
    err = capsys.readouterr().err.strip()
    payload = json.loads(err)
    assert "error" in payload and "message" in payload


def test_cli_flag_overrides(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "experiment": "simulate", "seed": 1, "horizon": 10,
        "schedule": {"kind": "bernoulli", "p": 0.3},
        "out": str(tmp_path / "x")}))
    rc = cli.main(["simulate", "--config", str(cfg_path), "--horizon", "25",
                   "--out", str(tmp_path / "y")])
    assert rc == 0
    rows = (tmp_path / "y" / "trajectory.csv").read_text().splitlines()
    assert len(rows) == 27


def test_replica_failure_reported(tmp_path):
    # horizon 1 with an explicit single-vertex tree and a schedule that never
    # adds leaves leaves the walker isolated: the failure must carry the index
    cfg = parse_config({
        "experiment": "renewal-stats", "seed": 5, "horizon": 3, "replicas": 2,
        "schedule": {"kind": "iid", "support": [0], "probs": [1.0]},
        "params": {"initial": {"parents": [None], "walker": 0}},
        "out": str(tmp_path)})
    from tbrw.experiments import ReplicaError
    with pytest.raises(ReplicaError) as err:
        run_experiment(cfg)
    assert "replica 0" in str(err.value)
