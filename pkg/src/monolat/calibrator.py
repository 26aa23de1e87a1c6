"""One-dimensional piecewise-linear calibrators with fixed uniform keypoints."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Positions within this distance of a keypoint (in units of keypoint spacing)
# are snapped onto it so calibrate(a[k]) returns b[k] exactly.
_SNAP = 1e-9


def segment_position(x, a_min, a_max, num_keypoints: int):
    """Locate ``x`` on the uniform keypoint grid.

    Returns ``(k, frac, inside)``: the left keypoint index of the active
    segment, the fractional position within it, and a mask of inputs that
    were not clipped.  Broadcasts over arrays; ``a_min``/``a_max`` may be
    per-column arrays.
    """
    x = np.asarray(x, dtype=float)
    a_min = np.asarray(a_min, dtype=float)
    a_max = np.asarray(a_max, dtype=float)
    inside = (x >= a_min) & (x <= a_max)
    xc = np.clip(x, a_min, a_max)
    t = (xc - a_min) * ((num_keypoints - 1) / (a_max - a_min))
    near = np.rint(t)
    t = np.where(np.abs(t - near) < _SNAP, near, t)
    k = np.clip(np.floor(t), 0, num_keypoints - 2).astype(np.int64)
    frac = t - k
    return k, frac, inside


@dataclass(frozen=True)
class Calibrator:
    """Piecewise-linear map with ``K`` uniform input keypoints on ``[a_min, a_max]``."""

    keypoints_out: np.ndarray
    input_range: tuple[float, float] = (-100.0, 100.0)
    monotone: bool = False

    def __post_init__(self):
        b = np.asarray(self.keypoints_out, dtype=float).copy()
        if b.ndim != 1 or b.size < 2:
            raise ValueError("a calibrator needs at least 2 keypoints")
        lo, hi = (float(v) for v in self.input_range)
        if not lo < hi:
            raise ValueError(f"invalid input range {self.input_range}")
        b.setflags(write=False)
        object.__setattr__(self, "keypoints_out", b)
        object.__setattr__(self, "input_range", (lo, hi))

    @property
    def num_keypoints(self) -> int:
        return self.keypoints_out.size

    @property
    def keypoints_in(self) -> np.ndarray:
        return np.linspace(self.input_range[0], self.input_range[1], self.num_keypoints)

    @property
    def spacing(self) -> float:
        lo, hi = self.input_range
        return (hi - lo) / (self.num_keypoints - 1)

    @classmethod
    def linear(cls, num_keypoints: int, input_range=(-100.0, 100.0), monotone=False) -> "Calibrator":
        return cls(np.linspace(0.0, 1.0, num_keypoints), input_range, monotone)


def _check_finite(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("calibrator input must be finite")
    return x


def calibrate(c: Calibrator, x):
    """Clip ``x`` to the input range and interpolate between keypoints."""
    x = _check_finite(x)
    k, frac, _ = segment_position(x, *c.input_range, c.num_keypoints)
    b = c.keypoints_out
    return b[k] * (1.0 - frac) + b[k + 1] * frac


def calibrate_grads(c: Calibrator, x: float) -> tuple[dict[int, float], float]:
    """Gradient of :func:`calibrate` at a scalar ``x``.

    Returns ``(db, dx)`` where ``db`` maps keypoint index to weight (at most
    two nonzero entries) and ``dx`` is the active segment slope, zero when
    ``x`` is clipped.
    """
    x = float(_check_finite(x))
    k, frac, inside = segment_position(x, *c.input_range, c.num_keypoints)
    k, frac = int(k), float(frac)
    db = {}
    if 1.0 - frac != 0.0:
        db[k] = 1.0 - frac
    if frac != 0.0:
        db[k + 1] = frac
    b = c.keypoints_out
    dx = (b[k + 1] - b[k]) / c.spacing if inside else 0.0
    return db, float(dx)


def to_relu_form(c: Calibrator) -> tuple[np.ndarray, float]:
    """Weights ``alpha`` and offset such that
    ``sum_k alpha[k] * relu(x - a[k]) + offset == calibrate(c, x)`` on the input range.
    """
    a, b = c.keypoints_in, c.keypoints_out
    slopes = np.diff(b) / np.diff(a)
    alpha = np.empty_like(b)
    alpha[0] = slopes[0]
    alpha[1:-1] = np.diff(slopes)
    alpha[-1] = -slopes[-1]
    return alpha, float(b[0])


def relu_form_eval(alpha: np.ndarray, offset: float, keypoints_in: np.ndarray, x):
    x = np.asarray(x, dtype=float)
    return np.maximum(x[..., None] - keypoints_in, 0.0) @ alpha + offset
