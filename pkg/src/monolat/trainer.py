"""Projected minibatch ADAM training for monotone models."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .network import CalibrationLayer, Network, init_params

logger = logging.getLogger(__name__)

LOSSES = ("logistic", "squared")
METRICS = ("accuracy", "mse")


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class TrainConfig:
    step_size: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 256
    num_steps: int = 1000
    projection_tol: float = 1e-7
    seed: int = 0
    loss: str = "logistic"
    project_every_n: int = 1
    clip_warning_fraction: float = 0.5

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        for name in ("beta1", "beta2"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be a positive integer")
        if self.num_steps < 0:
            raise ValueError("num_steps must be non-negative")
        if not self.projection_tol > 0:
            raise ValueError("projection_tol must be positive")
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}, got {self.loss!r}")
        if self.project_every_n < 1:
            raise ValueError("project_every_n must be at least 1")

    def to_dict(self) -> dict:
        return asdict(self)


def loss_and_grad(kind: str, y_pred, y_true):
    """Per-example loss and its derivative in the prediction.

    ``logistic`` treats ``y_pred`` as a logit and requires labels in {0, 1};
    ``squared`` is ``(y_pred - y_true)**2``.
    """
    y_pred = np.asarray(y_pred, dtype=float)
    y_true = np.asarray(y_true, dtype=float)
    if kind == "logistic":
        if not np.all((y_true == 0) | (y_true == 1)):
            raise ValueError("logistic loss needs labels in {0, 1}")
        # log(1 + exp(-s)) with s = +/- logit, stable for large |s|
        s = np.where(y_true == 1, y_pred, -y_pred)
        loss = np.logaddexp(0.0, -s)
        prob = np.exp(-np.logaddexp(0.0, -y_pred))
        return loss, prob - y_true
    if kind == "squared":
        r = y_pred - y_true
        return r * r, 2.0 * r
    raise ValueError(f"unknown loss {kind!r}")


@dataclass
class AdamState:
    m: list
    v: list
    step: int = 0

    @classmethod
    def zeros_like(cls, params) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_step(state: AdamState, grads, config: TrainConfig) -> list[np.ndarray]:
    """Advance ``state`` in place and return the bias-corrected ADAM deltas."""
    if len(grads) != len(state.m):
        raise ValueError("gradient list does not match optimizer state")
    state.step += 1
    b1, b2, lr, eps = config.beta1, config.beta2, config.step_size, config.epsilon
    c1 = 1.0 - b1**state.step
    c2 = 1.0 - b2**state.step
    deltas = []
    for i, g in enumerate(grads):
        if g.shape != state.m[i].shape:
            raise ValueError(f"gradient {i} has shape {g.shape}, expected {state.m[i].shape}")
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * (g * g)
        deltas.append(-lr * (state.m[i] / c1) / (np.sqrt(state.v[i] / c2) + eps))
    return deltas


def initialize(net: Network, seed: int = 0, lattice_noise: bool = True) -> None:
    """Re-initialize a DLN's parameters and project them onto the constraints.

    Linear weights ~ N(2, 1), biases ``-D_t``; lattices span [0, 1] linearly
    plus N(0, 1/S^2) noise; calibrators are ramps from 0 to 1.
    """
    init_params(net, np.random.default_rng(seed), lattice_noise)


def evaluate(model, X, y, metric: str = "accuracy") -> float:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    pred = model.predict(X)
    if metric == "accuracy":
        return float(np.mean((pred >= 0.0) == (y == 1)))
    if metric == "mse":
        return float(np.mean((pred - y) ** 2))
    raise ValueError(f"unknown metric {metric!r}")


def batch_loss_and_grads(model, X, y, loss: str):
    """Mean loss over a batch and the matching list of parameter gradients."""
    pred, cache = model.forward(X)
    losses, dl = loss_and_grad(loss, pred, y)
    grads = model.flat_grads(model.backward(cache, dl / len(y)))
    return float(np.mean(losses)), grads, cache


@dataclass
class TrainingLog:
    steps: list = field(default_factory=list)
    losses: list = field(default_factory=list)
    val_steps: list = field(default_factory=list)
    val_metrics: list = field(default_factory=list)
    best_step: int | None = None
    best_metric: float | None = None

    def records(self):
        val = dict(zip(self.val_steps, self.val_metrics))
        for s, l in zip(self.steps, self.losses):
            yield (s, l, val.get(s))

    def to_csv(self) -> str:
        lines = ["step,loss,val_metric"]
        for s, l, v in self.records():
            lines.append(f"{s},{l!r}," + ("" if v is None else repr(v)))
        return "\n".join(lines) + "\n"


class _BatchSampler:
    """Epoch shuffling: each pass visits every row once in a fresh seeded order."""

    def __init__(self, n: int, batch_size: int, rng: np.random.Generator):
        self.n, self.batch_size, self.rng = n, min(batch_size, n), rng
        self.order = rng.permutation(n)
        self.pos = 0

    def next(self) -> np.ndarray:
        if self.pos + self.batch_size > self.n:
            self.order = self.rng.permutation(self.n)
            self.pos = 0
        idx = self.order[self.pos : self.pos + self.batch_size]
        self.pos += self.batch_size
        return idx


def train(
    model,
    X,
    y,
    config: TrainConfig,
    X_val=None,
    y_val=None,
    eval_every: int = 0,
    select_best: bool = False,
    metric: str | None = None,
    callback=None,
) -> TrainingLog:
    """Minimize the configured loss with ADAM, projecting after every update.

    With validation data and ``eval_every > 0`` the validation metric is
    recorded periodically; ``select_best`` restores the parameters from the
    best validation checkpoint at the end, so the number of training steps is
    chosen on validation data.  ``callback(step, model)`` runs after each
    update and projection.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.num_inputs:
        raise ValueError(f"dataset has {X.shape[-1]} features, model expects {model.num_inputs}")
    if len(X) != len(y) or len(X) == 0:
        raise ValueError("need a non-empty dataset with one label per row")
    if config.loss == "logistic" and not np.all((y == 0) | (y == 1)):
        raise ValueError("logistic loss needs labels in {0, 1}")
    metric = metric or ("accuracy" if config.loss == "logistic" else "mse")
    higher_better = metric == "accuracy"
    use_val = X_val is not None and eval_every > 0

    rng = np.random.default_rng(config.seed)
    sampler = _BatchSampler(len(X), config.batch_size, rng)
    state = AdamState.zeros_like(model.parameters())
    log = TrainingLog()
    best_params = None
    warned: set[int] = set()

    def checkpoint(step):
        nonlocal best_params
        value = evaluate(model, X_val, y_val, metric)
        log.val_steps.append(step)
        log.val_metrics.append(value)
        better = log.best_metric is None or (value > log.best_metric if higher_better else value < log.best_metric)
        if better:
            log.best_metric, log.best_step = value, step
            if select_best:
                best_params = model.get_flat_params()

    for step in range(1, config.num_steps + 1):
        idx = sampler.next()
        loss, grads, cache = batch_loss_and_grads(model, X[idx], y[idx], config.loss)
        if not np.isfinite(loss):
            raise TrainingDiverged(f"non-finite loss at step {step}")
        _warn_on_clipping(model, cache, config.clip_warning_fraction, warned)
        model.apply_update(adam_step(state, grads, config))
        if step % config.project_every_n == 0 or step == config.num_steps:
            model.project(config.projection_tol)
        log.steps.append(step)
        log.losses.append(loss)
        if callback is not None:
            callback(step, model)
        if use_val and (step % eval_every == 0 or step == config.num_steps):
            checkpoint(step)

    if select_best and best_params is not None and log.best_step != config.num_steps:
        model.set_flat_params(best_params)
    return log


def _warn_on_clipping(model, cache, fraction, warned):
    layers = getattr(model, "layers", None)
    if not layers:
        return
    for i, layer in enumerate(layers):
        if isinstance(layer, CalibrationLayer) and i not in warned:
            clipped = 1.0 - np.mean(cache.layer_caches[i][2], axis=0)
            if np.any(clipped > fraction):
                warned.add(i)
                logger.warning(
                    "calibration layer %d: %d wire(s) clip more than %.0f%% of a batch; "
                    "their gradients are zero outside the input range",
                    i, int(np.sum(clipped > fraction)), 100 * fraction,
                )
