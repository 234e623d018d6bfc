from dataclasses import replace

import numpy as np
import pytest

from tsdlearn.intervals import window_stream
from tsdlearn.rules import RULES, TsdParams, TsdRule, make_rule, tsd_update
from tsdlearn.spikes import SpikeTrain, TimeGrid, correlation_c, generate_poisson_train
from tsdlearn.srm import InputDrive, Network, simulate
from tsdlearn.trainer import (
    BestTracker,
    ExperimentConfig,
    draw_patterns,
    run_epoch,
    train,
    tune_lr,
)

SMALL = ExperimentConfig(n_inputs=30, duration=60.0, max_epochs=40, eta=0.01)


def random_setup(rng, n=20, T=60.0):
    grid = TimeGrid(0.1, T)
    inputs = [generate_poisson_train(80, grid, int(rng.integers(1 << 31))) for _ in range(n)]
    return grid, inputs, rng.uniform(0, 0.6, n)


def test_eta_zero_leaves_weights_unchanged():
    rng = np.random.default_rng(0)
    grid, inputs, w = random_setup(rng)
    desired = SpikeTrain([7.0, 21.5, 40.0])
    plain = simulate(Network(w), inputs, grid).output
    for name in RULES:
        net = Network(w.copy())
        actual, after = run_epoch(net, inputs, desired, make_rule(name, eta=0.0), grid)
        assert actual == plain
        np.testing.assert_array_equal(after, w)


@pytest.mark.parametrize("name", sorted(RULES))
def test_fixed_point_when_actual_equals_desired(name):
    rng = np.random.default_rng(1)
    for _ in range(10):
        grid, inputs, w = random_setup(rng)
        desired = simulate(Network(w), inputs, grid).output
        net = Network(w.copy())
        rule = make_rule(name, eta=0.05)
        for _ in range(3):
            actual, after = run_epoch(net, inputs, desired, rule, grid)
            assert actual == desired
            np.testing.assert_array_equal(after, w)
            assert correlation_c(actual, desired, 2.0, grid) == pytest.approx(1.0, abs=1e-12)


def test_single_event_hand_trace():
    grid = TimeGrid(0.1, 30.0)
    inputs = [SpikeTrain([4.0]), SpikeTrain([15.0]), SpikeTrain()]
    net = Network([0.1, 0.1, 0.1])
    desired = SpikeTrain([10.0])
    rule = TsdRule(TsdParams(eta=0.01))
    _, after = run_epoch(net, inputs, desired, rule, grid)
    want = tsd_update(10.0, 1, 0.0, [4.0], rule.params)
    assert want > 0
    np.testing.assert_allclose(after, [0.1 + want, 0.1, 0.1], rtol=0, atol=1e-15)


def test_trainer_event_stream_matches_window_stream():
    rng = np.random.default_rng(2)
    for _ in range(10):
        grid, inputs, w = random_setup(rng, n=1)
        w = np.array([2.5])
        desired = SpikeTrain.from_ticks(np.sort(rng.choice(grid.n_ticks, 4, replace=False)), 0.1)
        events = []
        actual, _ = run_epoch(Network(w), inputs, desired, TsdRule(TsdParams(eta=0.0)), grid, events)
        steps = window_stream(inputs[0], actual, desired)
        assert [(round(t, 6), s, round(p, 6)) for t, s, p in events] == [
            (round(st.t_cur, 6), st.sign, round(st.t_prev, 6)) for st in steps]


def test_best_tracker_rule():
    b = BestTracker()
    b.update(1, 0.5)
    assert not b.update(2, 0.4)
    assert b.update(3, 0.6)
    # gain of 5e-6 per epoch is too small
    assert not b.update(13, 0.6 + 5e-5)
    assert b.update(14, 0.7)
    assert (b.best_c, b.best_epoch) == (0.7, 14)


def test_empty_desired_and_silent_neuron_converges_at_once():
    cfg = replace(SMALL, desired_rate=0.0, weight_init=(0.0, 0.0))
    res = train(cfg)
    assert res.best_c == 1.0 and res.converged
    assert len(res.records) == 1


def test_eta_zero_gives_flat_curve():
    res = train(replace(SMALL, eta=0.0, max_epochs=5))
    assert len({r.c_value for r in res.records}) == 1
    assert all(r.weight_delta_l1 == 0 for r in res.records)


def test_training_is_deterministic():
    a, b = train(SMALL), train(SMALL)
    assert a.records == b.records
    np.testing.assert_array_equal(a.final_weights, b.final_weights)
    c = train(replace(SMALL, seed=1))
    assert c.records != a.records


def test_best_c_non_decreasing_and_training_helps():
    res = train(replace(SMALL, max_epochs=80))
    assert res.best_c >= res.records[0].c_value
    assert res.best_c > 0.8


def test_patterns_fixed_and_thinned():
    cfg = ExperimentConfig(n_inputs=5, duration=300.0, desired_rate=400.0)
    inputs, desired = draw_patterns(cfg)
    assert np.min(np.diff(desired.times)) >= 1.0 - 1e-9
    again = draw_patterns(cfg)
    assert desired == again[1] and all(x == y for x, y in zip(inputs, again[0]))


def test_tune_lr_grid_rules():
    cfg = replace(SMALL, max_epochs=15)
    lr, res = tune_lr(cfg, [0.02])
    assert lr == 0.02 and res.config.eta == 0.02
    lr, _ = tune_lr(cfg, [0.02, 0.0])
    assert lr == 0.02
    with pytest.raises(ValueError):
        tune_lr(cfg, [])


def test_tune_lr_tie_goes_to_smaller_rate():
    cfg = replace(SMALL, desired_rate=0.0, weight_init=(0.0, 0.0), max_epochs=3)
    lr, _ = tune_lr(cfg, [0.5, 0.05, 0.005])
    assert lr == 0.005


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(n_inputs=0)
    with pytest.raises(ValueError):
        ExperimentConfig(weight_init=(1.0, 0.0))
    with pytest.raises(ValueError):
        ExperimentConfig(eta=-1.0)


def test_drive_reuse_matches_fresh_inputs():
    rng = np.random.default_rng(5)
    grid, inputs, w = random_setup(rng)
    drive = InputDrive(inputs, grid, Network(w).params)
    desired = SpikeTrain([12.0, 30.0])
    a = run_epoch(Network(w.copy()), inputs, desired, make_rule("tsd", eta=0.02), grid)
    b = run_epoch(Network(w.copy()), drive, desired, make_rule("tsd", eta=0.02), grid)
    assert a[0] == b[0]
    np.testing.assert_array_equal(a[1], b[1])
