import math

import numpy as np
import pytest

from monolat.network import CalibrationLayer, EnsembleLayer, LinearLayer, NetworkSpec, build
from monolat.trainer import (
    AdamState,
    TrainConfig,
    TrainingDiverged,
    adam_step,
    evaluate,
    initialize,
    loss_and_grad,
    train,
)


def test_logistic_loss_examples():
    loss, g = loss_and_grad("logistic", 0.0, 1.0)
    assert loss == pytest.approx(math.log(2))
    assert g == pytest.approx(-0.5)
    loss, g = loss_and_grad("logistic", 50.0, 1.0)
    assert 0 <= loss < 1e-20
    loss, g = loss_and_grad("logistic", -800.0, 1.0)
    assert loss == pytest.approx(800.0) and g == pytest.approx(-1.0)
    assert np.isfinite(loss_and_grad("logistic", 800.0, 0.0)[0])


def test_squared_loss_examples():
    assert loss_and_grad("squared", 2.0, 2.0) == (0.0, 0.0)
    loss, g = loss_and_grad("squared", 3.0, 1.0)
    assert (loss, g) == (4.0, 4.0)


def test_loss_errors():
    with pytest.raises(ValueError):
        loss_and_grad("logistic", 0.0, 0.5)
    with pytest.raises(ValueError):
        loss_and_grad("hinge", 0.0, 1.0)


def test_logistic_gradient_is_sigmoid_minus_label(rng):
    s = rng.normal(scale=5, size=50)
    y = (rng.random(50) < 0.5).astype(float)
    _, g = loss_and_grad("logistic", s, y)
    np.testing.assert_allclose(g, 1 / (1 + np.exp(-s)) - y, atol=1e-15)


def test_config_validation():
    for bad in ({"step_size": 0}, {"beta1": 1.0}, {"beta2": 0.0}, {"batch_size": 0},
                {"epsilon": 0}, {"loss": "hinge"}, {"num_steps": -1}, {"projection_tol": 0}):
        with pytest.raises(ValueError):
            TrainConfig(**bad)


def test_adam_first_step():
    cfg = TrainConfig(step_size=0.01)
    state = AdamState.zeros_like([np.zeros(1)])
    (delta,) = adam_step(state, [np.ones(1)], cfg)
    assert delta[0] == pytest.approx(-0.01, rel=1e-6)
    assert state.step == 1


def test_adam_zero_gradient_and_symmetry():
    cfg = TrainConfig()
    state = AdamState.zeros_like([np.zeros(3)])
    assert not np.any(adam_step(state, [np.zeros(3)], cfg)[0])
    state = AdamState.zeros_like([np.zeros(2)])
    for g in (0.3, -1.2, 0.8):
        d = adam_step(state, [np.array([g, g])], cfg)[0]
        assert d[0] == d[1]
    assert np.all(state.v[0] >= 0)


def test_adam_shape_mismatch():
    state = AdamState.zeros_like([np.zeros(2)])
    with pytest.raises(ValueError):
        adam_step(state, [np.zeros(3)], TrainConfig())
    with pytest.raises(ValueError):
        adam_step(state, [np.zeros(2), np.zeros(1)], TrainConfig())


def test_initialize_values():
    net = build(NetworkSpec("cal:3 - lin:4/2m - lat:4", 2, [0]), lattice_noise=False)
    cal, lin, ens = net.layers
    np.testing.assert_allclose(cal.params["b"], [[0, 0.5, 1]] * 2)
    np.testing.assert_array_equal(lin.params["bias"], -2.0)
    net2 = build(NetworkSpec("lat:2", 2, [0, 1]), lattice_noise=False)
    np.testing.assert_allclose(net2.layers[0].params["theta"][0], [0, 0.5, 0.5, 1])


def test_initialize_weight_statistics():
    net = build(NetworkSpec("lin:100/50m - lin:1", 200, list(range(100))), seed=0)
    initialize(net, seed=5, lattice_noise=True)
    lin = net.layers[0]
    # clipping W_mono at zero only touches values more than 2 sigma below the mean
    W = np.concatenate([lin.params["W_free"].ravel(), lin.params["W_cross"].ravel()])
    assert W.size >= 10_000
    assert abs(W.mean() - 2.0) < 0.05
    assert net.constraint_violation() <= 1e-7


def test_evaluate_examples(rng):
    class Fixed:
        def __init__(self, out):
            self.out = out

        def predict(self, X):
            return self.out

    y = np.array([0, 1, 1, 0], float)
    assert evaluate(Fixed(np.array([-1.0, 2.0, 0.5, -3.0])), np.zeros((4, 1)), y) == 1.0
    assert evaluate(Fixed(np.array([0.0, 0.0])), np.zeros((2, 1)), np.array([0.0, 1.0])) == 0.5
    t = rng.normal(size=100)
    assert evaluate(Fixed(np.full(100, t.mean())), np.zeros((100, 1)), t, "mse") == pytest.approx(t.var())
    with pytest.raises(ValueError):
        evaluate(Fixed(np.zeros(0)), np.zeros((0, 1)), np.zeros(0))


def test_regression_smoke():
    rng = np.random.default_rng(0)
    X = rng.random((500, 1))
    net = build(NetworkSpec("cal:20 @[0,1] - lin:1", 1, [0]), seed=0)
    train(net, X, X[:, 0], TrainConfig(step_size=0.01, num_steps=2000, batch_size=32, loss="squared"))
    assert evaluate(net, X, X[:, 0], "mse") < 0.01


def test_logistic_progress_on_separable_data():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(1000, 3))
    y = (X[:, 0] + X[:, 1] > 0).astype(float)
    net = build(NetworkSpec("cal:10 @[-3,3] - lin:4/2m - lat:4", 3, [0, 1]), seed=0)
    log = train(net, X, y, TrainConfig(step_size=0.01, num_steps=3000, batch_size=64))
    assert np.mean(log.losses[-100:]) < 0.2


def test_zero_steps_leaves_parameters():
    net = build(NetworkSpec("cal:4 - lin:1", 2, [0]), seed=0)
    before = net.get_flat_params()
    log = train(net, np.zeros((5, 2)), np.zeros(5), TrainConfig(num_steps=0))
    np.testing.assert_array_equal(net.get_flat_params(), before)
    assert log.steps == []


def _run(seed):
    rng = np.random.default_rng(7)
    X = rng.normal(size=(300, 4))
    y = (X[:, 0] - X[:, 3] > 0).astype(float)
    net = build(NetworkSpec("cal:6 @[-3,3] - lin:6/3m - ens:2x3 - lin:1", 4, [0]), seed=seed)
    log = train(net, X[:200], y[:200], TrainConfig(step_size=0.01, num_steps=120, batch_size=32, seed=seed),
                X[200:], y[200:], eval_every=40)
    return net, log


def test_determinism():
    (a, la), (b, lb) = _run(3), _run(3)
    assert la.to_csv() == lb.to_csv()
    np.testing.assert_array_equal(a.get_flat_params(), b.get_flat_params())
    _, lc = _run(4)
    assert lc.to_csv() != la.to_csv()


def test_log_format():
    _, log = _run(0)
    lines = log.to_csv().splitlines()
    assert lines[0] == "step,loss,val_metric"
    assert len(lines) == 121
    assert lines[40].startswith("40,") and not lines[40].endswith(",")
    assert lines[41].endswith(",")


def test_feasible_after_every_step():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(300, 5)) * 50
    y = (X[:, 0] > 0).astype(float)
    net = build(NetworkSpec("cal:8 - lin:9/3m - cal:5 - ens:3x3 - cal:5 - lin:1/1m", 5, [0, 2]), seed=0)
    seen = []

    def spot_check(step, model):
        for layer in model.layers:
            v = layer.constraint_violation()
            if isinstance(layer, (LinearLayer, CalibrationLayer)):
                assert v == 0.0
            elif isinstance(layer, EnsembleLayer):
                assert v <= 1e-7
        seen.append(step)

    train(net, X, y, TrainConfig(step_size=0.05, num_steps=300, batch_size=32), callback=spot_check)
    assert seen == list(range(1, 301))


def test_select_best_restores_checkpoint():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(400, 2))
    y = (X[:, 0] > 0).astype(float)
    net = build(NetworkSpec("cal:5 @[-3,3] - lin:1", 2, [0]), seed=0)
    snaps = {}
    log = train(net, X[:300], y[:300], TrainConfig(step_size=0.05, num_steps=100, batch_size=16),
                X[300:], y[300:], eval_every=10, select_best=True,
                callback=lambda s, m: snaps.__setitem__(s, m.get_flat_params()))
    np.testing.assert_array_equal(net.get_flat_params(), snaps[log.best_step])
    assert log.best_metric == max(log.val_metrics)
    assert evaluate(net, X[300:], y[300:]) == log.best_metric


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_detected():
    net = build(NetworkSpec("lin:1", 1, []), seed=0)
    X = np.full((10, 1), 1e200)
    with pytest.raises((TrainingDiverged, FloatingPointError)):
        train(net, X, np.ones(10), TrainConfig(step_size=1e300, num_steps=5, loss="squared"))


def test_input_validation():
    net = build(NetworkSpec("lin:1", 2, []), seed=0)
    with pytest.raises(ValueError):
        train(net, np.zeros((3, 3)), np.zeros(3), TrainConfig())
    with pytest.raises(ValueError):
        train(net, np.zeros((3, 2)), np.zeros(2), TrainConfig())
    with pytest.raises(ValueError):
        train(net, np.zeros((3, 2)), np.full(3, 2.0), TrainConfig())


def test_clipping_warning(caplog):
    net = build(NetworkSpec("cal:4 @[0,1] - lin:1", 1, [0]), seed=0)
    X = np.full((20, 1), 5.0)
    with caplog.at_level("WARNING"):
        train(net, X, np.ones(20), TrainConfig(num_steps=3, batch_size=10))
    assert sum("clip" in r.message for r in caplog.records) == 1
