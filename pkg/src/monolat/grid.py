"""Validation-set hyperparameter search."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, fields

import numpy as np

from .estimators import make_model
from .projection import ProjectionError
from .trainer import TrainConfig, TrainingDiverged, evaluate, train

logger = logging.getLogger(__name__)

_CONFIG_KEYS = {f.name for f in fields(TrainConfig)}
_MODEL_KEYS = {"arch", "num_groups", "group_size", "hidden", "all_calibrators_monotone"}


@dataclass
class GridEntry:
    params: dict
    val_metric: float | None
    best_step: int | None
    diverged: bool = False


@dataclass
class GridResult:
    metric: str
    entries: list[GridEntry] = field(default_factory=list)
    best_index: int | None = None
    best_model: object = None
    best_log: object = None

    @property
    def best(self) -> GridEntry:
        return self.entries[self.best_index]

    def report(self) -> str:
        lines = []
        for i, e in enumerate(self.entries):
            mark = "*" if i == self.best_index else " "
            value = "diverged" if e.diverged else f"{e.val_metric:.6f} (step {e.best_step})"
            lines.append(f"{mark} {e.params} -> {self.metric} {value}")
        return "\n".join(lines)


def expand_grid(grid: dict) -> list[dict]:
    if not grid:
        raise ValueError("empty hyperparameter grid")
    keys = sorted(grid)
    for k in keys:
        if k not in _CONFIG_KEYS | _MODEL_KEYS:
            raise ValueError(f"unknown grid key {k!r}")
        if not isinstance(grid[k], (list, tuple)) or len(grid[k]) == 0:
            raise ValueError(f"grid entry {k!r} must be a non-empty list")
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def fit_one(model_type, train_ds, val_ds, params: dict, eval_every: int = 500, model_kwargs=None):
    """Train one configuration; step count is chosen on ``val_ds`` when given."""
    model_kwargs = dict(model_kwargs or {})
    config_kwargs = {k: v for k, v in params.items() if k in _CONFIG_KEYS}
    model_kwargs.update({k: v for k, v in params.items() if k in _MODEL_KEYS})
    config = TrainConfig(**config_kwargs)
    model = make_model(
        model_type, train_ds.num_features, train_ds.monotone, seed=config.seed,
        input_ranges=train_ds.input_ranges, X_fit=train_ds.X, **model_kwargs,
    )
    has_val = val_ds is not None and len(val_ds) > 0
    log = train(
        model, train_ds.X, train_ds.y, config,
        val_ds.X if has_val else None, val_ds.y if has_val else None,
        eval_every=eval_every if has_val else 0, select_best=has_val,
    )
    return model, log, config


def grid_search(model_type, train_ds, val_ds, grid: dict, base: dict | None = None,
                eval_every: int = 500, model_kwargs=None) -> GridResult:
    """Train every combination in ``grid`` and keep the best by validation metric.

    Runs that diverge (non-finite loss or activations, failed projection) are
    reported and never selected.  The test set is not involved.
    """
    combos = expand_grid(grid)
    if val_ds is None or len(val_ds) == 0:
        raise ValueError("grid search needs a validation set")
    base = dict(base or {})
    loss = base.get("loss", "logistic")
    metric = "accuracy" if loss == "logistic" else "mse"
    result = GridResult(metric)
    best_value = None
    for combo in combos:
        params = {**base, **combo}
        try:
            model, log, _ = fit_one(model_type, train_ds, val_ds, params, eval_every, model_kwargs)
            value = evaluate(model, val_ds.X, val_ds.y, metric)
        except (TrainingDiverged, FloatingPointError, ProjectionError) as exc:
            logger.warning("configuration %s diverged: %s", combo, exc)
            result.entries.append(GridEntry(combo, None, None, diverged=True))
            continue
        if not np.isfinite(value):
            result.entries.append(GridEntry(combo, None, None, diverged=True))
            continue
        result.entries.append(GridEntry(combo, value, log.best_step))
        better = best_value is None or (value > best_value if metric == "accuracy" else value < best_value)
        if better:
            best_value = value
            result.best_index = len(result.entries) - 1
            result.best_model, result.best_log = model, log
    if result.best_index is None:
        raise TrainingDiverged("every configuration in the grid diverged")
    return result
