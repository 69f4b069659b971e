"""Brute-force reference implementations.

These are the independent baselines every optimized path is validated
against.  They favor transparency over speed: the conjugate is a literal
loop over dual nodes, and norms are estimated by maximizing over explicit
candidate clouds.  All direction sets are deterministic (fixed seed).
"""

from __future__ import annotations

import numpy as np

from ._directions import sign_patterns
from .numerics import FunctionSample, Grid, default_dual_grid
from .norms import conj_exponent, top_k_norm

__all__ = [
    "SEED",
    "naive_conjugate",
    "convex_envelope_2d",
    "support_function_bruteforce",
    "k_support_bruteforce",
    "default_direction_set",
]

SEED = 0x5EED


def naive_conjugate(f: FunctionSample, dual_grid: Grid) -> FunctionSample:
    """Reference discrete conjugate: for each dual node y, the max over all
    primal nodes x of ``<x, y> - f(x)`` with lower-addition rules.

    One dual node at a time; scores over primal nodes accumulate axis by
    axis in ascending order.  Optimized transforms must reproduce this
    output bit for bit.
    """
    pts = f.grid.nodes
    vals = f.values
    d = f.grid.dim
    if dual_grid.dim != d:
        raise ValueError(f"dual grid dimension {dual_grid.dim} != {d}")
    out = np.empty(dual_grid.node_count)
    for j in range(dual_grid.node_count):
        y = dual_grid.nodes[j]
        scores = pts[:, 0] * y[0]
        for k in range(1, d):
            scores = scores + pts[:, k] * y[k]
        # scores are finite, so scores - vals realizes the lower addition
        # low_add(<x,y>, -f(x)) including both infinite branches.
        out[j] = np.max(scores - vals)
    return FunctionSample(dual_grid, out)


def convex_envelope_2d(f: FunctionSample, dual_grid: Grid | None = None) -> FunctionSample:
    """Grid-restricted closed convex envelope: :func:`naive_conjugate` twice.

    Idempotent (to rounding) when re-applied with the same dual grid; the
    auto-selected grid depends on the value range, so pass ``dual_grid``
    explicitly when closure stability matters.
    """
    if f.grid.dim > 2:
        raise ValueError(
            f"dimension-too-large: envelope oracle supports d <= 2 (got {f.grid.dim})"
        )
    if dual_grid is None:
        finite = np.isfinite(f.values)
        scale = float(np.abs(f.values[finite]).max()) if finite.any() else 1.0
        dual_grid = default_dual_grid(f.grid.dim, scale)
    return naive_conjugate(naive_conjugate(f, dual_grid), f.grid)


def support_function_bruteforce(x, membership, candidates) -> float:
    """``max <x, y>`` over the candidates passing the membership predicate."""
    candidates = np.asarray(candidates, dtype=float)
    if candidates.ndim != 2 or candidates.shape[0] == 0:
        raise ValueError("no-member-found: candidate set is empty")
    x = np.asarray(x, dtype=float)
    best = None
    for y in candidates:
        if membership(y):
            v = float(np.dot(x, y))
            best = v if best is None else max(best, v)
    if best is None:
        raise ValueError("no-member-found: no candidate passed membership")
    return best


def default_direction_set(dim: int, count: int, seed: int = SEED) -> np.ndarray:
    """Seeded Gaussian directions plus every sign pattern in {-1,0,1}^dim.

    The sign patterns make polyhedral support maxima exact; the random bulk
    covers generic directions.  Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, dim))
    norms = np.linalg.norm(z, axis=1)
    norms[norms == 0.0] = 1.0
    return np.vstack([z / norms[:, None], sign_patterns(dim)])


def k_support_bruteforce(x, p: float, k: int, directions) -> float:
    """Lower estimate of the coordinate-k norm for an lp source by duality.

    Each direction y is rescaled onto the dual-ball boundary
    ``y / top_k_norm(y, q, k)`` and the pairing with x is maximized.  Never
    exceeds the true norm; converges from below with direction count.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    d = x.size
    if d > 6:
        raise ValueError(f"dimension-too-large: brute force supports d <= 6 (got {d})")
    if not 1 <= k <= d:
        raise ValueError(f"k-out-of-range: need 1 <= k <= {d} (got k={k})")
    q = conj_exponent(p)
    directions = np.asarray(directions, dtype=float)
    best = 0.0
    for y in directions:
        t = top_k_norm(y, q, k)
        if t > 0.0:
            best = max(best, float(np.dot(x, y)) / t)
    return best
