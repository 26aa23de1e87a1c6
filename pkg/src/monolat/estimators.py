"""scikit-learn compatible estimators wrapping the monotone models."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .baselines import MinMaxNet, MonotonicDNN
from .network import DEFAULT_RANGE, NetworkSpec, build
from .trainer import TrainConfig, train

DEFAULT_ARCH = "cal:100 - lin:350/70m - cal:100 - ens:70x5 - cal:100 - lin:1/1m"
MODEL_TYPES = ("dln", "minmax", "mono-dnn")


def monotone_mask(monotonic_features, n_features: int) -> np.ndarray:
    """Normalize indices or a boolean mask into a boolean mask of length ``n_features``."""
    mask = np.zeros(n_features, dtype=bool)
    if monotonic_features is None:
        return mask
    given = np.asarray(monotonic_features)
    if given.dtype == bool:
        if given.shape != (n_features,):
            raise ValueError(f"monotone mask has shape {given.shape}, expected ({n_features},)")
        return given.copy()
    idx = given.astype(np.int64).ravel()
    if np.any((idx < 0) | (idx >= n_features)):
        raise ValueError(f"monotonic feature indices {idx.tolist()} out of range for {n_features} features")
    mask[idx] = True
    return mask


def make_model(
    model_type: str,
    num_inputs: int,
    monotone,
    seed: int = 0,
    arch: str = DEFAULT_ARCH,
    input_ranges=None,
    all_calibrators_monotone: bool = False,
    num_groups: int = 70,
    group_size: int = 9,
    hidden=(100,),
    X_fit=None,
):
    """Build an initialized, feasible model of the requested type.

    Baselines standardize inputs using ``X_fit`` when it is given.
    """
    mono = monotone_mask(monotone, num_inputs)
    if model_type == "dln":
        ranges = None
        if input_ranges is not None:
            ranges = np.asarray(input_ranges, dtype=float).copy()
            if ranges.ndim == 1:
                ranges = np.tile(ranges, (num_inputs, 1))
            missing = np.isnan(ranges).any(axis=1)
            ranges[missing] = DEFAULT_RANGE
        spec = NetworkSpec(arch, num_inputs, mono, all_calibrators_monotone, ranges)
        return build(spec, seed=seed)
    if model_type == "minmax":
        model = MinMaxNet(num_inputs, num_groups, group_size, mono, seed=seed)
    elif model_type == "mono-dnn":
        if not mono.all():
            raise ValueError("the monotonic DNN is monotone in every input; mark all features monotone")
        model = MonotonicDNN(num_inputs, hidden, seed=seed)
    else:
        raise ValueError(f"unknown model type {model_type!r}; expected one of {MODEL_TYPES}")
    if X_fit is not None:
        model.fit_input_scaling(X_fit)
    model.project()
    return model


class _MonotoneModelBase(BaseEstimator):
    _loss = "logistic"

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            step_size=self.step_size,
            batch_size=self.batch_size,
            num_steps=self.num_steps,
            projection_tol=self.projection_tol,
            seed=self.random_state,
            loss=self._loss,
        )

    def _build(self, X):
        raise NotImplementedError

    def _fit(self, X, y, eval_set=None):
        config = self._train_config()
        self.model_ = self._build(X)
        X_val = y_val = None
        if eval_set is not None:
            X_val, y_val = eval_set
            X_val = check_array(X_val)
            y_val = self._encode_target(np.asarray(y_val))
        self.training_log_ = train(
            self.model_, X, y, config, X_val, y_val,
            eval_every=self.eval_every if eval_set is not None else 0,
            select_best=eval_set is not None,
        )
        self.n_features_in_ = X.shape[1]
        return self

    def _encode_target(self, y):
        return np.asarray(y, dtype=float)

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return self.model_.predict(X)


class _ClassifierBase(ClassifierMixin, _MonotoneModelBase):
    _loss = "logistic"

    def fit(self, X, y, eval_set=None):
        """Fit on binary labels; ``eval_set=(X_val, y_val)`` selects the step count on validation accuracy."""
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        if len(self.classes_) != 2:
            raise ValueError(f"binary classification needs exactly 2 classes, got {len(self.classes_)}")
        return self._fit(X, self._encode_target(y), eval_set)

    def _encode_target(self, y):
        return (y == self.classes_[1]).astype(float)

    def predict_proba(self, X):
        p = 1.0 / (1.0 + np.exp(-self.decision_function(X)))
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return self.classes_[(self.decision_function(X) >= 0.0).astype(int)]


class _RegressorBase(RegressorMixin, _MonotoneModelBase):
    _loss = "squared"

    def fit(self, X, y, eval_set=None):
        X, y = check_X_y(X, y, y_numeric=True)
        return self._fit(X, np.asarray(y, dtype=float), eval_set)

    def predict(self, X):
        return self.decision_function(X)


class _DLNParams:
    def __init__(
        self,
        arch=DEFAULT_ARCH,
        monotonic_features=None,
        input_ranges=None,
        all_calibrators_monotone=False,
        step_size=3e-3,
        batch_size=256,
        num_steps=3000,
        projection_tol=1e-7,
        eval_every=500,
        random_state=0,
    ):
        self.arch = arch
        self.monotonic_features = monotonic_features
        self.input_ranges = input_ranges
        self.all_calibrators_monotone = all_calibrators_monotone
        self.step_size = step_size
        self.batch_size = batch_size
        self.num_steps = num_steps
        self.projection_tol = projection_tol
        self.eval_every = eval_every
        self.random_state = random_state

    def _build(self, X):
        return make_model(
            "dln", X.shape[1], self.monotonic_features, self.random_state, arch=self.arch,
            input_ranges=self.input_ranges, all_calibrators_monotone=self.all_calibrators_monotone,
        )


class DLNClassifier(_DLNParams, _ClassifierBase):
    """Deep lattice network classifier, monotone in ``monotonic_features``.

    The network output is a logit; ``predict_proba`` applies the sigmoid.
    """


class DLNRegressor(_DLNParams, _RegressorBase):
    """Deep lattice network trained with squared error."""


class _MinMaxParams:
    def __init__(
        self,
        n_groups=70,
        group_size=9,
        monotonic_features=None,
        step_size=3e-3,
        batch_size=256,
        num_steps=3000,
        eval_every=500,
        random_state=0,
    ):
        self.n_groups = n_groups
        self.group_size = group_size
        self.monotonic_features = monotonic_features
        self.step_size = step_size
        self.batch_size = batch_size
        self.num_steps = num_steps
        self.eval_every = eval_every
        self.random_state = random_state

    projection_tol = 1e-7

    def _build(self, X):
        return make_model(
            "minmax", X.shape[1], self.monotonic_features, self.random_state,
            num_groups=self.n_groups, group_size=self.group_size, X_fit=X,
        )


class MinMaxNetClassifier(_MinMaxParams, _ClassifierBase):
    """Max-of-min network of linear units (non-negative weights on monotone features)."""


class MinMaxNetRegressor(_MinMaxParams, _RegressorBase):
    pass


class _MonoDNNParams:
    def __init__(
        self,
        hidden_layer_sizes=(100,),
        step_size=3e-3,
        batch_size=256,
        num_steps=3000,
        eval_every=500,
        random_state=0,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.step_size = step_size
        self.batch_size = batch_size
        self.num_steps = num_steps
        self.eval_every = eval_every
        self.random_state = random_state

    projection_tol = 1e-7

    def _build(self, X):
        return make_model(
            "mono-dnn", X.shape[1], np.ones(X.shape[1], dtype=bool), self.random_state,
            hidden=self.hidden_layer_sizes, X_fit=X,
        )


class MonotonicDNNClassifier(_MonoDNNParams, _ClassifierBase):
    """ReLU network with non-negative weights, monotone in every feature."""


class MonotonicDNNRegressor(_MonoDNNParams, _RegressorBase):
    pass
