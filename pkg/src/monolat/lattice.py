"""Lattice (interpolated look-up table) kernels over the unit hypercube.

Vertex indexing: index ``j`` enumerates binary vectors with dimension 0 as the
most significant bit, so for ``S = 2`` the vertices are ordered
``(0,0), (0,1), (1,0), (1,1)``.  The same convention is used by the
constraint enumeration, the network layers and the model file format.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

VERTEX_INDEXING = "msb-dim0"


def vertex_bits(dim: int) -> np.ndarray:
    """Return the ``(2**dim, dim)`` 0/1 matrix whose row ``j`` is vertex ``v_j``."""
    j = np.arange(2**dim)[:, None]
    shifts = dim - 1 - np.arange(dim)[None, :]
    return ((j >> shifts) & 1).astype(np.int64)


def vertex_index(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    return idx


def _as_points(x, dim: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x2 = x[None, :] if single else x
    if x2.ndim != 2 or x2.shape[-1] != dim:
        raise ValueError(f"expected input with {dim} coordinates, got shape {x.shape}")
    return np.clip(x2, 0.0, 1.0), single


def _product_weights(x: np.ndarray) -> np.ndarray:
    """Multilinear weights for points ``x`` of shape ``(..., S)`` -> ``(..., 2**S)``."""
    lead = x.shape[:-1]
    w = np.ones(lead + (1,))
    for d in range(x.shape[-1]):
        xd = x[..., d : d + 1]
        pair = np.stack([1.0 - xd, xd], axis=-1)  # (..., 1, 2)
        w = (w[..., :, None] * pair).reshape(lead + (-1,))
    return w


def multilinear_weights(x, dim: int | None = None) -> np.ndarray:
    """Interpolation weights ``psi(x)`` for one point or a batch of points.

    ``x`` is clamped to ``[0, 1]``.  Returns shape ``(2**S,)`` for a single
    point and ``(n, 2**S)`` for a batch.
    """
    x = np.asarray(x, dtype=float)
    if dim is None:
        dim = x.shape[-1]
    pts, single = _as_points(x, dim)
    w = _product_weights(pts)
    return w[0] if single else w


def multilinear_slopes(x: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Partial derivatives of multilinear interpolation in each coordinate.

    Broadcasting version used by both the scalar API and the ensemble layer.
    ``x`` has shape ``(..., S)`` (already clamped) and ``theta`` has shape
    ``(..., 2**S)`` broadcastable against the leading dimensions of ``x``.
    """
    S = x.shape[-1]
    lead = np.broadcast_shapes(x.shape[:-1], theta.shape[:-1])
    out = np.empty(lead + (S,))
    cube = theta.reshape(theta.shape[:-1] + (2,) * S)
    base = theta.ndim - 1
    for d in range(S):
        diff = np.take(cube, 1, axis=base + d) - np.take(cube, 0, axis=base + d)
        diff = diff.reshape(theta.shape[:-1] + (-1,))
        rest = np.delete(x, d, axis=-1)
        out[..., d] = np.sum(_product_weights(rest) * diff, axis=-1)
    return out


@dataclass(frozen=True)
class Lattice:
    """A lattice with ``2**dim`` vertex parameters.

    ``mono_dims`` lists the input dimensions along which the lattice is
    constrained to be non-decreasing.
    """

    dim: int
    params: np.ndarray
    mono_dims: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("lattice dimension must be positive")
        params = np.asarray(self.params, dtype=float).copy()
        if params.shape != (2**self.dim,):
            raise ValueError(
                f"lattice of dim {self.dim} needs {2**self.dim} params, got shape {params.shape}"
            )
        params.setflags(write=False)
        object.__setattr__(self, "params", params)
        mono = frozenset(int(d) for d in self.mono_dims)
        if any(d < 0 or d >= self.dim for d in mono):
            raise ValueError(f"monotone dims {sorted(mono)} out of range for dim {self.dim}")
        object.__setattr__(self, "mono_dims", mono)

    @classmethod
    def from_function(cls, fn, dim: int, mono_dims: Iterable[int] = ()) -> "Lattice":
        """Build a lattice whose vertex values are ``fn`` evaluated at each vertex."""
        verts = vertex_bits(dim).astype(float)
        return cls(dim, np.array([fn(v) for v in verts], dtype=float), frozenset(mono_dims))


def multilinear_eval(lat: Lattice, x) -> float | np.ndarray:
    """Multilinear interpolation ``psi(x) . theta``; vectorized over a batch."""
    return multilinear_weights(x, lat.dim) @ lat.params


def multilinear_grads(lat: Lattice, x) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of :func:`multilinear_eval` with respect to params and input.

    Returns ``(dtheta, dx)``.  For batched ``x`` both carry a leading batch axis.
    Inputs outside ``[0, 1]`` are clamped, so their ``dx`` is zero.
    """
    raw = np.asarray(x, dtype=float)
    pts, single = _as_points(raw, lat.dim)
    dtheta = _product_weights(pts)
    dx = multilinear_slopes(pts, lat.params)
    raw2 = raw[None, :] if single else raw
    dx = np.where((raw2 < 0.0) | (raw2 > 1.0), 0.0, dx)
    if single:
        return dtheta[0], dx[0]
    return dtheta, dx


def simplex_weights(x, dim: int | None = None) -> np.ndarray:
    """Simplex (Lovasz extension) interpolation weights.

    Coordinates are sorted in descending order, ties broken by ascending
    dimension index.
    """
    x = np.asarray(x, dtype=float)
    if dim is None:
        dim = x.shape[-1]
    pts, single = _as_points(x, dim)
    n = pts.shape[0]
    order = np.argsort(-pts, axis=1, kind="stable")
    xs = np.take_along_axis(pts, order, axis=1)
    w = np.zeros((n, 2**dim))
    rows = np.arange(n)
    # vertex index of the prefix set {pi_1..pi_k}
    idx = np.zeros(n, dtype=np.int64)
    w[rows, idx] += 1.0 - xs[:, 0]
    for k in range(dim):
        idx = idx | (1 << (dim - 1 - order[:, k]))
        coef = xs[:, k] - xs[:, k + 1] if k + 1 < dim else xs[:, k]
        w[rows, idx] += coef
    return w[0] if single else w


def simplex_eval(lat: Lattice, x) -> float | np.ndarray:
    return simplex_weights(x, lat.dim) @ lat.params


def monotonicity_edges(dim: int, mono_dims: Iterable[int]) -> list[tuple[int, int]]:
    """Hypercube edges ``(lo, hi)`` meaning ``theta[lo] <= theta[hi]``.

    One edge per vertex pair differing only in a monotone dimension, ordered
    by dimension and then by the lower vertex index.
    """
    mono = sorted(set(int(d) for d in mono_dims))
    if any(d < 0 or d >= dim for d in mono):
        raise ValueError(f"monotone dims {mono} out of range for dim {dim}")
    edges = []
    for d in mono:
        bit = 1 << (dim - 1 - d)
        edges.extend((j, j | bit) for j in range(2**dim) if not j & bit)
    return edges
