"""Deep lattice network: layer types, architecture parsing and composition.

Each layer keeps a boolean monotone flag per input wire and per output wire.
Flags are propagated at build time: calibrators keep the flag of their
wire, a linear embedding flags its leading ``mono_out`` outputs, and a lattice
output is monotone iff at least one of its inputs is.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .calibrator import segment_position
from .lattice import (
    Lattice,
    _product_weights,
    monotonicity_edges,
    multilinear_slopes,
    simplex_weights,
    vertex_bits,
)
from .projection import clip_nonnegative, pav, project_lattices_admm

DEFAULT_RANGE = (-100.0, 100.0)


# --------------------------------------------------------------------------
# layer specs and the architecture grammar


@dataclass(frozen=True)
class Calibration:
    num_keypoints: int = 100
    input_range: tuple[float, float] | None = None

    def __str__(self):
        s = f"cal:{self.num_keypoints}"
        if self.input_range is not None:
            s += f" @[{self.input_range[0]:g},{self.input_range[1]:g}]"
        return s


@dataclass(frozen=True)
class Linear:
    out_dim: int
    mono_out_dim: int | None = None
    cross: bool = True

    def __str__(self):
        s = f"lin:{self.out_dim}"
        if self.mono_out_dim is not None:
            s += f"/{self.mono_out_dim}m"
        if not self.cross:
            s += ":block"
        return s


@dataclass(frozen=True)
class Ensemble:
    num_lattices: int
    lattice_dim: int

    def __str__(self):
        return f"ens:{self.num_lattices}x{self.lattice_dim}"


@dataclass(frozen=True)
class SingleLattice:
    lattice_dim: int

    def __str__(self):
        return f"lat:{self.lattice_dim}"


LayerSpec = Calibration | Linear | Ensemble | SingleLattice

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_CAL = re.compile(rf"^cal:(\d+)(?:\s*@\s*\[\s*({_NUM})\s*,\s*({_NUM})\s*\])?$")
_LIN = re.compile(r"^lin:(\d+)(?:/(\d+)m)?(:block)?$")
_ENS = re.compile(r"^ens:(\d+)x(\d+)$")
_LAT = re.compile(r"^lat:(\d+)$")


def _split_layers(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "-" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_arch(text: str) -> list[LayerSpec]:
    """Parse an architecture string such as
    ``"cal:100 @[-100,100] - lin:350/350m - cal:100 - ens:70x5 - cal:100 - lin:1/1m"``.

    ``lin:OUT/MONOm`` splits monotone and free outputs; without ``/MONOm`` all
    outputs are monotone when the layer has a monotone input.  ``:block``
    disables the free-to-monotone cross weights.
    """
    layers: list[LayerSpec] = []
    for tok in _split_layers(text):
        if m := _CAL.match(tok):
            rng = (float(m[2]), float(m[3])) if m[2] is not None else None
            layers.append(Calibration(int(m[1]), rng))
        elif m := _LIN.match(tok):
            mono = int(m[2]) if m[2] is not None else None
            layers.append(Linear(int(m[1]), mono, cross=m[3] is None))
        elif m := _ENS.match(tok):
            layers.append(Ensemble(int(m[1]), int(m[2])))
        elif m := _LAT.match(tok):
            layers.append(SingleLattice(int(m[1])))
        else:
            raise ValueError(f"cannot parse layer {tok!r} in architecture {text!r}")
    if not layers:
        raise ValueError("empty architecture")
    return layers


def format_arch(layers: Sequence[LayerSpec]) -> str:
    return " - ".join(str(layer) for layer in layers)


@dataclass
class NetworkSpec:
    layers: list[LayerSpec]
    num_inputs: int
    monotone_inputs: np.ndarray = field(default=None)
    all_calibrators_monotone: bool = False
    input_ranges: np.ndarray | None = None  # per-feature override for a leading calibration layer

    def __post_init__(self):
        if isinstance(self.layers, str):
            self.layers = parse_arch(self.layers)
        mono = np.zeros(self.num_inputs, dtype=bool)
        if self.monotone_inputs is not None:
            given = np.asarray(self.monotone_inputs)
            if given.dtype == bool:
                if given.shape != (self.num_inputs,):
                    raise ValueError("monotone flag vector must have one entry per input")
                mono = given.copy()
            else:
                idx = given.astype(np.int64).ravel()
                if np.any((idx < 0) | (idx >= self.num_inputs)):
                    raise ValueError(f"monotone input indices {idx.tolist()} out of range")
                mono[idx] = True
        self.monotone_inputs = mono

    @property
    def arch(self) -> str:
        return format_arch(self.layers)


# --------------------------------------------------------------------------
# layers


class Layer:
    kind = ""
    param_names: tuple[str, ...] = ()

    def __init__(self, in_mono: np.ndarray):
        self.in_mono = np.asarray(in_mono, dtype=bool)
        self.in_dim = self.in_mono.size
        self.out_mono = self.in_mono
        self.params: dict[str, np.ndarray] = {}

    @property
    def out_dim(self) -> int:
        return self.out_mono.size

    def init_params(self, rng: np.random.Generator, noise: bool = True) -> None:
        raise NotImplementedError

    def forward(self, X: np.ndarray):
        raise NotImplementedError

    def backward(self, cache, dY: np.ndarray):
        raise NotImplementedError

    def project(self, tol: float) -> None:
        pass

    def constraint_violation(self) -> float:
        return 0.0


class CalibrationLayer(Layer):
    """One calibrator per wire; outputs lie in ``[0, 1]``."""

    kind = "cal"
    param_names = ("b",)

    def __init__(self, in_mono, num_keypoints=100, input_range=DEFAULT_RANGE, all_monotone=False):
        super().__init__(in_mono)
        if num_keypoints < 2:
            raise ValueError("calibrators need at least 2 keypoints")
        self.num_keypoints = int(num_keypoints)
        lo, hi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in _range_pair(input_range)))
        self.a_min = np.broadcast_to(lo, (self.in_dim,)).astype(float)
        self.a_max = np.broadcast_to(hi, (self.in_dim,)).astype(float)
        if np.any(self.a_min >= self.a_max):
            raise ValueError("calibrator input ranges need a_min < a_max")
        self.monotone = self.in_mono | bool(all_monotone)
        self.params = {"b": np.zeros((self.in_dim, self.num_keypoints))}

    def init_params(self, rng, noise=True):
        self.params["b"][...] = np.linspace(0.0, 1.0, self.num_keypoints)

    def forward(self, X):
        k, frac, inside = segment_position(X, self.a_min, self.a_max, self.num_keypoints)
        B = self.params["b"]
        cols = np.arange(self.in_dim)
        Y = B[cols, k] * (1.0 - frac) + B[cols, k + 1] * frac
        return Y, (k, frac, inside)

    def backward(self, cache, dY):
        k, frac, inside = cache
        B = self.params["b"]
        D, K = B.shape
        flat = np.arange(D) * K + k
        dB = np.bincount(flat.ravel(), weights=(dY * (1.0 - frac)).ravel(), minlength=D * K)
        dB += np.bincount((flat + 1).ravel(), weights=(dY * frac).ravel(), minlength=D * K)
        slope = (B[np.arange(D), k + 1] - B[np.arange(D), k]) * ((K - 1) / (self.a_max - self.a_min))
        dX = np.where(inside, dY * slope, 0.0)
        return dX, {"b": dB.reshape(D, K)}

    def project(self, tol):
        B = self.params["b"]
        for d in np.flatnonzero(self.monotone):
            B[d] = pav(B[d])
        np.clip(B, 0.0, 1.0, out=B)

    def constraint_violation(self):
        B = self.params["b"]
        worst = max(0.0, float(np.max(-B)), float(np.max(B - 1.0)))
        if self.monotone.any():
            worst = max(worst, float(np.max(-np.diff(B[self.monotone], axis=1), initial=0.0)))
        return worst

    def clip_fraction(self, cache) -> float:
        return float(1.0 - np.mean(cache[2]))


def _range_pair(r):
    if r is None:
        return DEFAULT_RANGE
    r = np.asarray(r, dtype=float)
    if r.ndim == 2:
        return r[:, 0], r[:, 1]
    return r[0], r[1]


class LinearLayer(Layer):
    """Linear embedding with a non-negative block on monotone wires.

    Monotone outputs are ``W_mono @ x_mono (+ W_cross @ x_free) + bias``; free
    outputs are ``W_free @ x_free + bias``.  Only ``W_mono`` is constrained.
    """

    kind = "lin"
    param_names = ("W_mono", "W_free", "W_cross", "bias")

    def __init__(self, in_mono, out_dim, mono_out_dim=None, cross=True):
        super().__init__(in_mono)
        n_mono_in = int(self.in_mono.sum())
        n_free_in = self.in_dim - n_mono_in
        if mono_out_dim is None:
            mono_out_dim = out_dim if n_mono_in else 0
        if not 0 <= mono_out_dim <= out_dim:
            raise ValueError(f"lin:{out_dim}/{mono_out_dim}m has more monotone outputs than outputs")
        if n_mono_in and mono_out_dim == 0:
            raise ValueError("linear layer with monotone inputs needs at least one monotone output")
        if n_free_in == 0 and mono_out_dim != out_dim:
            raise ValueError(
                f"lin:{out_dim}/{mono_out_dim}m: all inputs are monotone, so every output must be monotone"
            )
        self.mono_idx = np.flatnonzero(self.in_mono)
        self.free_idx = np.flatnonzero(~self.in_mono)
        self.cross = bool(cross)
        self.mono_out_dim = int(mono_out_dim)
        self.out_mono = np.arange(out_dim) < mono_out_dim
        n_free_out = out_dim - mono_out_dim
        self.params = {
            "W_mono": np.zeros((mono_out_dim, n_mono_in)),
            "W_free": np.zeros((n_free_out, n_free_in)),
            "W_cross": np.zeros((mono_out_dim if cross else 0, n_free_in)),
            "bias": np.zeros(out_dim),
        }

    def init_params(self, rng, noise=True):
        for name in ("W_mono", "W_free", "W_cross"):
            W = self.params[name]
            W[...] = rng.normal(2.0, 1.0, size=W.shape)
        self.params["bias"][...] = -float(self.in_dim)

    def forward(self, X):
        p = self.params
        xm = X[:, self.mono_idx]
        xf = X[:, self.free_idx]
        Y = np.empty((X.shape[0], self.out_dim))
        m = self.mono_out_dim
        Y[:, :m] = xm @ p["W_mono"].T
        if self.cross:
            Y[:, :m] += xf @ p["W_cross"].T
        Y[:, m:] = xf @ p["W_free"].T
        Y += p["bias"]
        return Y, (xm, xf)

    def backward(self, cache, dY):
        xm, xf = cache
        p = self.params
        m = self.mono_out_dim
        dm, df = dY[:, :m], dY[:, m:]
        grads = {
            "W_mono": dm.T @ xm,
            "W_free": df.T @ xf,
            "W_cross": dm.T @ xf if self.cross else np.zeros((0, xf.shape[1])),
            "bias": dY.sum(axis=0),
        }
        dX = np.zeros((dY.shape[0], self.in_dim))
        dX[:, self.mono_idx] = dm @ p["W_mono"]
        dX[:, self.free_idx] = df @ p["W_free"]
        if self.cross:
            dX[:, self.free_idx] += dm @ p["W_cross"]
        return dX, grads

    def project(self, tol):
        W = self.params["W_mono"]
        W[...] = clip_nonnegative(W)

    def constraint_violation(self):
        return max(0.0, float(np.max(-self.params["W_mono"], initial=0.0)))


class EnsembleLayer(Layer):
    """``G`` lattices of ``S`` inputs each, fed by a fixed permutation of the wires."""

    kind = "ens"
    param_names = ("theta",)

    def __init__(self, in_mono, num_lattices, lattice_dim, permutation, interpolation="multilinear"):
        super().__init__(in_mono)
        G, S = int(num_lattices), int(lattice_dim)
        if G * S != self.in_dim:
            raise ValueError(f"ens:{G}x{S} needs {G * S} inputs but the previous layer has {self.in_dim}")
        perm = np.asarray(permutation, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.in_dim)):
            raise ValueError("ensemble wiring must be a permutation of the input wires")
        self.num_lattices, self.lattice_dim = G, S
        self.permutation = perm
        self.interpolation = interpolation
        wire_mono = self.in_mono[perm].reshape(G, S)
        self.lattice_mono = [frozenset(np.flatnonzero(row).tolist()) for row in wire_mono]
        self.edges = [monotonicity_edges(S, dims) for dims in self.lattice_mono]
        self.out_mono = wire_mono.any(axis=1)
        self.params = {"theta": np.zeros((G, 2**S))}

    def init_params(self, rng, noise=True):
        S = self.lattice_dim
        base = vertex_bits(S).sum(axis=1) / S
        theta = np.tile(base, (self.num_lattices, 1))
        if noise:
            theta += rng.normal(0.0, 1.0 / S, size=theta.shape)
        self.params["theta"][...] = theta

    def lattice(self, g: int) -> Lattice:
        return Lattice(self.lattice_dim, self.params["theta"][g], self.lattice_mono[g])

    def forward(self, X):
        n = X.shape[0]
        raw = X[:, self.permutation].reshape(n, self.num_lattices, self.lattice_dim)
        Xp = np.clip(raw, 0.0, 1.0)
        theta = self.params["theta"]
        if self.interpolation == "simplex":
            W = simplex_weights(Xp.reshape(-1, self.lattice_dim)).reshape(n, self.num_lattices, -1)
        else:
            W = _product_weights(Xp)
        Y = np.einsum("ngj,gj->ng", W, theta)
        return Y, (raw, Xp, W)

    def backward(self, cache, dY):
        if self.interpolation != "multilinear":
            raise NotImplementedError("gradients are only available for multilinear interpolation")
        raw, Xp, W = cache
        theta = self.params["theta"]
        dtheta = np.einsum("ng,ngj->gj", dY, W)
        dXp = dY[:, :, None] * multilinear_slopes(Xp, theta)
        dXp = np.where((raw < 0.0) | (raw > 1.0), 0.0, dXp)
        dX = np.empty((dY.shape[0], self.in_dim))
        dX[:, self.permutation] = dXp.reshape(dY.shape[0], -1)
        return dX, {"theta": dtheta}

    def project(self, tol):
        theta = self.params["theta"]
        theta[...] = project_lattices_admm(theta, self.edges, tol=tol)

    def constraint_violation(self):
        theta = self.params["theta"]
        worst = 0.0
        for g, edges in enumerate(self.edges):
            if edges:
                e = np.asarray(edges)
                worst = max(worst, float(np.max(theta[g, e[:, 0]] - theta[g, e[:, 1]])))
        return worst


# --------------------------------------------------------------------------
# network


class StaleCacheError(RuntimeError):
    pass


@dataclass
class ForwardCache:
    version: int
    inputs: list
    layer_caches: list


class Network:
    """A stack of layers with per-wire monotone flags.

    Parameters are mutated only through :meth:`apply_update`,
    :meth:`set_flat_params` and :meth:`project`, which bump an internal
    version so a stale :class:`ForwardCache` is rejected by :meth:`backward`.
    """

    model_type = "dln"

    def __init__(self, spec: NetworkSpec, layers: list[Layer], seed: int | None = None):
        self.spec = spec
        self.layers = layers
        self.seed = seed
        self._version = 0

    # -- bookkeeping -------------------------------------------------------

    @property
    def arch(self) -> str:
        return self.spec.arch

    @property
    def num_inputs(self) -> int:
        return self.spec.num_inputs

    @property
    def monotone_inputs(self) -> np.ndarray:
        return self.spec.monotone_inputs

    @property
    def output_monotone(self) -> bool:
        return bool(self.layers[-1].out_mono[0])

    def parameters(self) -> list[np.ndarray]:
        return [layer.params[name] for layer in self.layers for name in layer.param_names]

    def num_params(self) -> int:
        return sum(p.size for p in self.parameters())

    def get_flat_params(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.parameters()])

    def set_flat_params(self, flat) -> None:
        flat = np.asarray(flat, dtype=float)
        pos = 0
        for p in self.parameters():
            p[...] = flat[pos : pos + p.size].reshape(p.shape)
            pos += p.size
        self._version += 1

    def apply_update(self, deltas: Sequence[np.ndarray]) -> None:
        for p, d in zip(self.parameters(), deltas):
            p += d
        self._version += 1

    def set_interpolation(self, kind: str) -> None:
        if kind not in ("multilinear", "simplex"):
            raise ValueError(f"unknown interpolation {kind!r}")
        for layer in self.layers:
            if isinstance(layer, EnsembleLayer):
                layer.interpolation = kind
        self._version += 1

    def input_box(self) -> tuple[np.ndarray, np.ndarray]:
        """A box covering the input calibrators' ranges, used for sampling."""
        first = self.layers[0]
        if isinstance(first, CalibrationLayer):
            return first.a_min.copy(), first.a_max.copy()
        return np.zeros(self.num_inputs), np.ones(self.num_inputs)

    # -- evaluation --------------------------------------------------------

    def forward(self, x):
        """Evaluate the network. Returns ``(y, cache)``.

        ``x`` may be a single input vector (``y`` is then a float) or an
        ``(n, D)`` batch (``y`` has shape ``(n,)``).
        """
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.num_inputs:
            raise ValueError(f"expected inputs with {self.num_inputs} features, got shape {np.shape(x)}")
        if not np.all(np.isfinite(X)):
            raise ValueError("network input must be finite")
        inputs, caches = [], []
        h = X
        for i, layer in enumerate(self.layers):
            inputs.append(h)
            h, c = layer.forward(h)
            caches.append(c)
            if not np.all(np.isfinite(h)):
                raise FloatingPointError(f"non-finite output from layer {i} ({layer.kind})")
        y = h[:, 0]
        cache = ForwardCache(self._version, inputs, caches)
        return (float(y[0]) if single else y), cache

    def predict(self, X, chunk: int = 4096) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            return np.array([self.forward(X)[0]])
        return np.concatenate([self.forward(X[i : i + chunk])[0] for i in range(0, len(X), chunk)] or [np.zeros(0)])

    def backward(self, cache: ForwardCache, dy) -> list[dict[str, np.ndarray]]:
        """Gradients of ``sum(dy * y)`` for every parameter, one dict per layer."""
        if cache.version != self._version:
            raise StaleCacheError("forward cache was computed with different parameters")
        dY = np.asarray(dy, dtype=float).reshape(-1, 1)
        grads = [None] * len(self.layers)
        for i in range(len(self.layers) - 1, -1, -1):
            dY, grads[i] = self.layers[i].backward(cache.layer_caches[i], dY)
        return grads

    def flat_grads(self, grads) -> list[np.ndarray]:
        return [g[name] for layer, g in zip(self.layers, grads) for name in layer.param_names]

    # -- constraints -------------------------------------------------------

    def project(self, tol: float = 1e-7) -> None:
        """Clip linear weights, then PAV+box each calibrator, then project each lattice."""
        for kind in ("lin", "cal", "ens"):
            for layer in self.layers:
                if layer.kind == kind:
                    layer.project(tol)
        self._version += 1

    def constraint_violation(self) -> float:
        return max(layer.constraint_violation() for layer in self.layers)


def build(spec: NetworkSpec, seed: int = 0, lattice_noise: bool = True) -> Network:
    """Construct and initialize a network; the initial model is projected to be feasible."""
    rng = np.random.default_rng(seed)
    mono = spec.monotone_inputs.copy()
    layers: list[Layer] = []
    for i, ls in enumerate(spec.layers):
        if isinstance(ls, Calibration):
            rng_range = ls.input_range
            if i == 0 and spec.input_ranges is not None:
                rng_range = np.asarray(spec.input_ranges, dtype=float)
            layer = CalibrationLayer(mono, ls.num_keypoints, rng_range, spec.all_calibrators_monotone)
        elif isinstance(ls, Linear):
            layer = LinearLayer(mono, ls.out_dim, ls.mono_out_dim, ls.cross)
        elif isinstance(ls, (Ensemble, SingleLattice)):
            G = ls.num_lattices if isinstance(ls, Ensemble) else 1
            perm = rng.permutation(mono.size)
            layer = EnsembleLayer(mono, G, ls.lattice_dim, perm)
        else:
            raise TypeError(f"unknown layer spec {ls!r}")
        layers.append(layer)
        mono = layer.out_mono
    if layers[-1].out_dim != 1:
        raise ValueError(f"the last layer must have a single output, got {layers[-1].out_dim}")
    net = Network(spec, layers, seed)
    init_params(net, rng, lattice_noise)
    return net


def init_params(net: Network, rng: np.random.Generator, lattice_noise: bool = True) -> None:
    for layer in net.layers:
        layer.init_params(rng, lattice_noise)
    net.project()


# --------------------------------------------------------------------------
# monotonicity audit and lattice cascades


@dataclass
class MonotonicityReport:
    num_pairs: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self):
        return len(self.violations)

    @property
    def worst(self) -> float:
        return max((v["drop"] for v in self.violations), default=0.0)


def check_monotonicity(
    model,
    num_pairs: int = 10000,
    seed: int = 0,
    X: np.ndarray | None = None,
    low: np.ndarray | None = None,
    high: np.ndarray | None = None,
    features: Sequence[int] | None = None,
    threshold: float = 1e-9,
    chunk: int = 4096,
) -> MonotonicityReport:
    """Sample input pairs that differ by a positive step in one monotone feature.

    Base points are rows of ``X`` when given, otherwise uniform in
    ``[low, high]`` (default: ``model.input_box()`` widened by 10% so that
    clipped regions are covered).  A pair with ``y2 < y1 - threshold`` is a
    violation.
    """
    report = MonotonicityReport(num_pairs)
    if features is None:
        features = np.flatnonzero(model.monotone_inputs)
    features = np.asarray(features, dtype=np.int64)
    if features.size == 0 or num_pairs <= 0:
        return report
    rng = np.random.default_rng(seed)
    if X is not None:
        X = np.asarray(X, dtype=float)
        lo, hi = X.min(axis=0), X.max(axis=0)
    else:
        blo, bhi = model.input_box()
        pad = 0.1 * (bhi - blo)
        lo = blo - pad if low is None else np.asarray(low, dtype=float)
        hi = bhi + pad if high is None else np.asarray(high, dtype=float)
    span = np.where(hi > lo, hi - lo, 1.0)
    for start in range(0, num_pairs, chunk):
        n = min(chunk, num_pairs - start)
        if X is not None:
            base = X[rng.integers(0, len(X), size=n)]
        else:
            base = rng.uniform(lo, hi, size=(n, lo.size))
        feat = features[rng.integers(0, features.size, size=n)]
        delta = rng.uniform(0.0, 1.0, size=n) * span[feat]
        moved = base.copy()
        moved[np.arange(n), feat] += delta
        y1 = model.predict(base)
        y2 = model.predict(moved)
        for i in np.flatnonzero(y2 < y1 - threshold):
            report.violations.append(
                {"x": base[i], "feature": int(feat[i]), "delta": float(delta[i]),
                 "y1": float(y1[i]), "y2": float(y2[i]), "drop": float(y1[i] - y2[i])}
            )
    return report


def collapse_cascade(net: Network) -> Lattice:
    """Collapse a network made only of multilinear lattice layers into one lattice.

    The result has one vertex per corner of ``[0, 1]^D`` holding the network
    value there; for multilinear cascades with disjoint wiring it reproduces
    the network everywhere on the cube.
    """
    if not all(isinstance(layer, EnsembleLayer) for layer in net.layers):
        raise ValueError("collapse_cascade needs a network made only of lattice layers")
    if any(layer.interpolation != "multilinear" for layer in net.layers):
        raise ValueError("collapse_cascade needs multilinear interpolation")
    D = net.num_inputs
    if D > 16:
        raise ValueError(f"collapse_cascade supports at most 16 inputs, got {D}")
    verts = vertex_bits(D).astype(float)
    values = net.predict(verts)
    return Lattice(D, values, frozenset(np.flatnonzero(net.monotone_inputs).tolist()))
