import csv
import dataclasses

import numpy as np
import pytest

from dkaczmarz.analysis import exchange_count, flops_bdk, flops_sdk
from dkaczmarz.harness import (CSV_HEADER, SimConfig, cycle_profile, run_experiment,
                               run_trial, sweep, write_csv)
from dkaczmarz.numerics import InvalidArgumentError

SMALL = SimConfig(receiver="sdk", M=16, K=4, snr_db=0.0, trials=300, seed=3, chunk_size=64)


def test_high_snr_zf_is_error_free():
    res = run_experiment(SimConfig(receiver="zf", snr_db=60.0, trials=1000, seed=1))
    assert res.ber_mean < 1e-3


def test_noiseless_sdk_converges():
    cfg = SimConfig(receiver="sdk", lam="constant:1", M=32, K=4, T=200, noiseless=True,
                    trials=20, seed=2)
    for i in range(cfg.trials):
        assert run_trial(cfg, i) == (0, 16)


def test_trial_deterministic():
    assert run_trial(SMALL, 5) == run_trial(SMALL, 5)


def test_run_trial_matches_experiment():
    cfg = dataclasses.replace(SMALL, trials=10, snr_db=-5.0)
    total = sum(run_trial(cfg, i)[0] for i in range(cfg.trials))
    assert total == run_experiment(cfg).bit_errors


def test_experiment_deterministic_and_worker_independent():
    a = run_experiment(SMALL)
    b = run_experiment(SMALL)
    c = run_experiment(SMALL, workers=2)
    assert a == b == c


def test_zero_trials_rejected():
    with pytest.raises(InvalidArgumentError):
        SimConfig(trials=0)


@pytest.mark.parametrize("kwargs", [
    dict(receiver="mmse"), dict(D=0), dict(D=20), dict(T=0), dict(lam="fast"),
    dict(receiver="bdk", noiseless=True), dict(topology="tree:4x32", random_root=True),
])
def test_invalid_configs(kwargs):
    with pytest.raises(InvalidArgumentError):
        SimConfig(**kwargs)


def test_cost_columns_follow_formulas():
    for receiver, fn in (("sdk", flops_sdk), ("bdk", flops_bdk), ("src", flops_sdk)):
        res = run_experiment(dataclasses.replace(SMALL, receiver=receiver, T=3, trials=4))
        assert res.cost.flops_per_node == fn(4, 3)
        assert res.cost.exchange_per_link == exchange_count(4, 3)


def test_every_receiver_runs():
    for receiver in ("zf", "rzf", "sdk", "bdk", "src"):
        res = run_experiment(dataclasses.replace(SMALL, receiver=receiver, trials=50))
        assert 0.0 <= res.ber_mean <= 1.0 and res.ber_ci95 >= 0


def test_nonstationary_tree_and_random_root_run():
    cfg = dataclasses.replace(SMALL, D=2, trials=40, T=2)
    assert run_experiment(dataclasses.replace(cfg, topology="tree:4x4")).trials == 40
    assert run_experiment(dataclasses.replace(cfg, random_root=True)).trials == 40


def test_cycle_profile_matches_separate_runs():
    cfg = dataclasses.replace(SMALL, snr_db=-5.0, trials=100)
    prof = cycle_profile(cfg, [1, 2, 4])
    for res in prof:
        assert res == run_experiment(dataclasses.replace(cfg, T=res.config.T))


def test_sweep_rows_and_csv(tmp_path):
    results = sweep(SMALL, "snr", [0.0])
    assert len(results) == 1
    results = sweep(dataclasses.replace(SMALL, trials=50), "D", [2, 4])
    path = tmp_path / "out.csv"
    write_csv(results, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    rows = list(csv.DictReader(open(path)))
    assert [r["D"] for r in rows] == ["2", "4"]
    with pytest.raises(InvalidArgumentError):
        sweep(SMALL, "M", [8])
    with pytest.raises(InvalidArgumentError):
        sweep(SMALL, "snr", [])


def test_ber_stable_under_trial_doubling():
    cfg = dataclasses.replace(SMALL, snr_db=-5.0, trials=2000, chunk_size=1024)
    a = run_experiment(cfg)
    b = run_experiment(dataclasses.replace(cfg, trials=4000, seed=4))
    assert abs(a.ber_mean - b.ber_mean) <= a.ber_ci95 + b.ber_ci95
