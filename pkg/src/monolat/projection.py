"""Euclidean projections onto the monotonicity constraint sets.

* linear weights: non-negative orthant (clip)
* calibrators: monotone sequences (pool adjacent violators) then a box clip
* lattices: the partial order given by hypercube edges (consensus ADMM),
  with an exact enumeration-based oracle for small lattices
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


class ProjectionError(RuntimeError):
    """Raised when the iterative lattice projection fails to converge."""

    def __init__(self, message: str, worst_violation: float):
        super().__init__(message)
        self.worst_violation = worst_violation


def clip_nonnegative(W):
    return np.maximum(np.asarray(W, dtype=float), 0.0)


def pav(y) -> np.ndarray:
    """Isotonic (non-decreasing) least-squares fit of a 1-D sequence."""
    y = np.asarray(y, dtype=float)
    n = y.size
    means = np.empty(n)
    sizes = np.empty(n, dtype=np.int64)
    top = -1
    for value in y:
        top += 1
        means[top] = value
        sizes[top] = 1
        while top > 0 and means[top - 1] > means[top]:
            total = sizes[top - 1] + sizes[top]
            means[top - 1] = (means[top - 1] * sizes[top - 1] + means[top] * sizes[top]) / total
            sizes[top - 1] = total
            top -= 1
    return np.repeat(means[: top + 1], sizes[: top + 1])


def pav_project(b, lower: float = 0.0, upper: float = 1.0) -> np.ndarray:
    """Project onto non-decreasing sequences, then clip to ``[lower, upper]``."""
    if not lower <= upper:
        raise ValueError(f"invalid box [{lower}, {upper}]")
    return np.clip(pav(b), lower, upper)


def max_violation(theta, edges) -> float:
    """Largest ``theta[lo] - theta[hi]`` over ``edges`` (0 when all hold)."""
    if len(edges) == 0:
        return 0.0
    e = np.asarray(edges, dtype=np.int64)
    theta = np.asarray(theta, dtype=float)
    return float(max(0.0, np.max(theta[..., e[:, 0]] - theta[..., e[:, 1]])))


def project_lattices_admm(
    thetas: np.ndarray,
    edge_lists: Sequence[Sequence[tuple[int, int]]],
    tol: float = 1e-7,
    rho: float = 1.0,
    max_iters: int = 10000,
) -> np.ndarray:
    """Project a stack of lattices ``(G, 2**S)`` with per-lattice edge sets.

    Consensus ADMM: every edge keeps a local copy of its two endpoint values
    constrained to ``lo <= hi``; the global variable averages the copies
    against the anchor ``thetas``.  A lattice stops updating once its primal
    and dual residual norms are below ``tol`` and its constraint violation is
    at most ``tol``, so each lattice's result does not depend on which other
    lattices share the batch.  Lattices that are already feasible are returned
    unchanged.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    thetas = np.asarray(thetas, dtype=float)
    G, V = thetas.shape
    out = thetas.copy()

    lo_parts, hi_parts, gid_parts = [], [], []
    for g, edges in enumerate(edge_lists):
        if len(edges) == 0:
            continue
        e = np.asarray(edges, dtype=np.int64)
        if np.any(thetas[g, e[:, 0]] > thetas[g, e[:, 1]]):
            lo_parts.append(g * V + e[:, 0])
            hi_parts.append(g * V + e[:, 1])
            gid_parts.append(np.full(len(e), g))
    if not lo_parts:
        return out

    lo = np.concatenate(lo_parts)
    hi = np.concatenate(hi_parts)
    gid = np.concatenate(gid_parts)
    size = G * V
    anchor = thetas.ravel()
    theta = anchor.copy()
    deg = np.bincount(lo, minlength=size) + np.bincount(hi, minlength=size)
    denom = 1.0 + rho * deg
    vertex_gid = np.repeat(np.arange(G), V)

    u_lo = np.zeros(lo.size)
    u_hi = np.zeros(hi.size)
    active = np.zeros(G, dtype=bool)
    active[np.unique(gid)] = True
    worst = np.inf
    for _ in range(max_iters):
        # local step: project (theta_lo - u_lo, theta_hi - u_hi) onto p <= q
        p = theta[lo] - u_lo
        q = theta[hi] - u_hi
        mid = 0.5 * (p + q)
        bad = p > q
        p = np.where(bad, mid, p)
        q = np.where(bad, mid, q)
        # global step
        acc = np.bincount(lo, weights=p + u_lo, minlength=size)
        acc += np.bincount(hi, weights=q + u_hi, minlength=size)
        new_theta = (anchor + rho * acc) / denom
        vmask = active[vertex_gid]
        new_theta = np.where(vmask, new_theta, theta)
        emask = active[gid]
        r_lo = p - new_theta[lo]
        r_hi = q - new_theta[hi]
        u_lo = np.where(emask, u_lo + r_lo, u_lo)
        u_hi = np.where(emask, u_hi + r_hi, u_hi)

        primal = np.sqrt(np.bincount(gid, weights=r_lo**2 + r_hi**2, minlength=G))
        dual = rho * np.sqrt(np.bincount(vertex_gid, weights=deg * (new_theta - theta) ** 2, minlength=G))
        viol = np.zeros(G)
        np.maximum.at(viol, gid, new_theta[lo] - new_theta[hi])
        theta = new_theta
        done = (primal < tol) & (dual < tol) & (viol <= tol)
        active &= ~done
        worst = float(viol.max())
        if not active.any():
            break
    else:
        raise ProjectionError(
            f"lattice projection did not converge in {max_iters} iterations "
            f"(worst violation {worst:.3g})",
            worst,
        )
    return theta.reshape(G, V)


def lattice_project_admm(theta, edges, tol: float = 1e-7, rho: float = 1.0, max_iters: int = 10000):
    """Approximate Euclidean projection of one lattice onto ``theta[lo] <= theta[hi]``."""
    theta = np.asarray(theta, dtype=float)
    return project_lattices_admm(theta[None, :], [edges], tol, rho, max_iters)[0]


def _components(n: int, edges: np.ndarray) -> list[np.ndarray]:
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in edges:
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(i) for i in range(n)])
    return [np.flatnonzero(roots == r) for r in np.unique(roots)]


def _lower_sets(size: int, local_edges: np.ndarray) -> np.ndarray:
    """All subsets closed downward under ``local_edges``, as a boolean matrix."""
    masks = np.arange(2**size)[:, None]
    member = ((masks >> np.arange(size)[None, :]) & 1).astype(bool)
    ok = np.ones(len(member), dtype=bool)
    for lo, hi in local_edges:
        ok &= ~member[:, hi] | member[:, lo]
    return member[ok]


MAX_ORACLE_VERTICES = 16


def exact_project_qp(theta, edges) -> np.ndarray:
    """Exact projection onto an edge partial order, for at most 16 vertices.

    Splits the order into connected components and, within each, evaluates
    the max-min formula over upper and lower sets:
    ``x*(v) = max_{U upper, v in U} min_{L lower, v in L} mean(theta[U & L])``.
    Every lower set is enumerated explicitly, so this is only meant as a
    test oracle.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.size
    if n > MAX_ORACLE_VERTICES:
        raise ValueError(f"exact projection supports at most {MAX_ORACLE_VERTICES} vertices, got {n}")
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    out = theta.copy()
    for comp in _components(n, e):
        if comp.size == 1:
            continue
        pos = {int(v): i for i, v in enumerate(comp)}
        local = np.array([(pos[a], pos[b]) for a, b in e if a in pos], dtype=np.int64)
        lower = _lower_sets(comp.size, local)
        upper = ~lower
        vals = theta[comp]
        counts = upper.astype(float) @ lower.T.astype(float)
        sums = (upper * vals).astype(float) @ lower.T.astype(float)
        with np.errstate(invalid="ignore", divide="ignore"):
            avg = sums / counts
        for i in range(comp.size):
            sub = avg[np.ix_(upper[:, i], lower[:, i])]
            out[comp[i]] = np.max(np.min(sub, axis=1))
    return out
