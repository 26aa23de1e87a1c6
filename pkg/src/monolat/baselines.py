"""Comparison models trained with the same projected-ADAM loop as the DLN.

Both expose the model surface the trainer relies on: ``parameters``,
``forward``/``backward``, ``apply_update``, ``project``, ``predict`` and
``monotone_inputs``.  Inputs are standardized by a fixed affine map with a
positive scale (set from training data before fitting), which preserves the
direction of monotonicity.
"""

from __future__ import annotations

import numpy as np

from .network import StaleCacheError


class _AffineInputModel:
    model_type = ""
    param_names: tuple[str, ...] = ()

    def __init__(self, num_inputs: int, monotone_inputs, seed: int | None = None):
        self.num_inputs = int(num_inputs)
        mono = np.zeros(self.num_inputs, dtype=bool)
        if monotone_inputs is not None:
            given = np.asarray(monotone_inputs)
            if given.dtype == bool:
                mono = given.copy()
            else:
                mono[given.astype(np.int64)] = True
        self.monotone_inputs = mono
        self.seed = seed
        self.input_shift = np.zeros(self.num_inputs)
        self.input_scale = np.ones(self.num_inputs)
        self.params: dict[str, np.ndarray] = {}
        self._version = 0

    def fit_input_scaling(self, X) -> None:
        X = np.asarray(X, dtype=float)
        std = X.std(axis=0)
        self.input_shift = X.mean(axis=0)
        self.input_scale = np.where(std > 1e-12, std, 1.0)

    def _scale(self, X):
        return (X - self.input_shift) / self.input_scale

    def input_box(self):
        return self.input_shift - 3 * self.input_scale, self.input_shift + 3 * self.input_scale

    def parameters(self):
        return [self.params[n] for n in self.param_names]

    def num_params(self):
        return sum(p.size for p in self.parameters())

    def get_flat_params(self):
        return np.concatenate([p.ravel() for p in self.parameters()])

    def set_flat_params(self, flat):
        pos = 0
        for p in self.parameters():
            p[...] = np.asarray(flat[pos : pos + p.size]).reshape(p.shape)
            pos += p.size
        self._version += 1

    def apply_update(self, deltas):
        for p, d in zip(self.parameters(), deltas):
            p += d
        self._version += 1

    def flat_grads(self, grads):
        return [grads[n] for n in self.param_names]

    def predict(self, X, chunk: int = 8192):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            return np.array([self.forward(X)[0]])
        return np.concatenate([self.forward(X[i : i + chunk])[0] for i in range(0, len(X), chunk)])

    def _prep(self, x):
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.shape[1] != self.num_inputs:
            raise ValueError(f"expected inputs with {self.num_inputs} features, got shape {np.shape(x)}")
        return X, single

    def _check_cache(self, cache):
        if cache["version"] != self._version:
            raise StaleCacheError("forward cache was computed with different parameters")


class MinMaxNet(_AffineInputModel):
    """``y = max_g min_s (w_gs . x + beta_gs)`` with ``w_gs[d] >= 0`` on monotone features.

    Ties in the min and max are resolved to the first attaining index, which
    fixes the subgradient used by :meth:`backward`.
    """

    model_type = "minmax"
    param_names = ("W", "beta")

    def __init__(self, num_inputs, num_groups, group_size, monotone_inputs=None, seed=0):
        super().__init__(num_inputs, monotone_inputs, seed)
        self.num_groups = int(num_groups)
        self.group_size = int(group_size)
        units = self.num_groups * self.group_size
        rng = np.random.default_rng(seed)
        W = rng.normal(0.0, 1.0 / np.sqrt(self.num_inputs), size=(units, self.num_inputs))
        W[:, self.monotone_inputs] = np.abs(W[:, self.monotone_inputs])
        self.params = {"W": W, "beta": rng.normal(0.0, 0.5, size=units)}

    def forward(self, x):
        X, single = self._prep(x)
        Z = (self._scale(X) @ self.params["W"].T + self.params["beta"]).reshape(
            -1, self.num_groups, self.group_size
        )
        s_idx = np.argmin(Z, axis=2)
        mins = np.take_along_axis(Z, s_idx[:, :, None], axis=2)[:, :, 0]
        g_idx = np.argmax(mins, axis=1)
        y = mins[np.arange(len(X)), g_idx]
        cache = {"version": self._version, "X": X, "unit": g_idx * self.group_size + s_idx[np.arange(len(X)), g_idx]}
        return (float(y[0]) if single else y), cache

    def backward(self, cache, dy):
        self._check_cache(cache)
        dy = np.asarray(dy, dtype=float).ravel()
        Xs = self._scale(cache["X"])
        units = self.num_groups * self.group_size
        dW = np.zeros((units, self.num_inputs))
        np.add.at(dW, cache["unit"], dy[:, None] * Xs)
        dbeta = np.bincount(cache["unit"], weights=dy, minlength=units)
        return {"W": dW, "beta": dbeta}

    def project(self, tol: float = 0.0):
        W = self.params["W"]
        W[:, self.monotone_inputs] = np.maximum(W[:, self.monotone_inputs], 0.0)
        self._version += 1

    def constraint_violation(self):
        return max(0.0, float(np.max(-self.params["W"][:, self.monotone_inputs], initial=0.0)))


class MonotonicDNN(_AffineInputModel):
    """Feed-forward ReLU network with every weight matrix non-negative.

    Monotone non-decreasing in every input; intended for problems where all
    features are monotone.
    """

    model_type = "mono-dnn"

    def __init__(self, num_inputs, hidden=(100,), seed=0):
        super().__init__(num_inputs, np.ones(num_inputs, dtype=bool), seed)
        self.hidden = tuple(int(h) for h in hidden)
        rng = np.random.default_rng(seed)
        widths = (self.num_inputs,) + self.hidden + (1,)
        names = []
        for i, (a, b) in enumerate(zip(widths[:-1], widths[1:])):
            self.params[f"W{i}"] = np.abs(rng.normal(0.0, 1.0 / np.sqrt(a), size=(b, a)))
            self.params[f"b{i}"] = np.zeros(b) if i + 1 < len(widths) - 1 else np.zeros(1)
            names += [f"W{i}", f"b{i}"]
        self.param_names = tuple(names)
        self.num_layers = len(widths) - 1

    def forward(self, x):
        X, single = self._prep(x)
        h = self._scale(X)
        acts = [h]
        for i in range(self.num_layers):
            z = h @ self.params[f"W{i}"].T + self.params[f"b{i}"]
            h = np.maximum(z, 0.0) if i + 1 < self.num_layers else z
            acts.append(h)
        y = h[:, 0]
        return (float(y[0]) if single else y), {"version": self._version, "acts": acts}

    def backward(self, cache, dy):
        self._check_cache(cache)
        acts = cache["acts"]
        d = np.asarray(dy, dtype=float).reshape(-1, 1)
        grads = {}
        for i in range(self.num_layers - 1, -1, -1):
            if i + 1 < self.num_layers:
                d = d * (acts[i + 1] > 0)
            grads[f"W{i}"] = d.T @ acts[i]
            grads[f"b{i}"] = d.sum(axis=0)
            d = d @ self.params[f"W{i}"]
        return grads

    def project(self, tol: float = 0.0):
        for i in range(self.num_layers):
            W = self.params[f"W{i}"]
            W[...] = np.maximum(W, 0.0)
        self._version += 1

    def constraint_violation(self):
        return max(max(0.0, float(np.max(-self.params[f"W{i}"]))) for i in range(self.num_layers))


def minmax_forward(m: MinMaxNet, x):
    return m.forward(x)[0]


def mono_dnn_forward(m: MonotonicDNN, x):
    return m.forward(x)[0]
