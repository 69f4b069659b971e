"""Tightest convex, positively 1-homogeneous, and norm lower approximations.

Three constructions for a 0-homogeneous f on the unit ball of a
normalization function nu:

* the tightest closed convex minorant, computed as the Fenchel conjugate of
  the Capra conjugate (equivalently, the biconjugate of f plus the ball
  indicator);
* the tightest closed convex positively 1-homogeneous minorant, the support
  function of the Capra subdifferential at 0;
* the tightest norm below ``phi(l0(.))``, characterized by its dual unit
  ball (an intersection of scaled dual coordinate-k balls).

The subset variants (arbitrary U instead of a ball) are the grid-level
primitives the ball constructions reduce to.
"""

from __future__ import annotations

import json
import math
from typing import Sequence

import numpy as np

from .conjugacy import (
    CouplingSpec,
    ZeroHomFnSpec,
    _analytic_applicable,
    _conjugate_values,
    capra_conjugate_l0_analytic_batch,
    capra_subdiff_at_zero,
    conjugate_at_points,
    fenchel_biconjugate,
)
from .norms import (
    NormalizationSpec,
    NormObject,
    PhiSpec,
    SourceNormSpec,
    best_norm_object,
    lp_gauge_collapses,
    lp_value,
    lp_value_batch,
)
from .numerics import FunctionSample, Grid, default_dual_grid

__all__ = [
    "BALL_TOL",
    "ball_box_grid",
    "tightest_convex_on_ball",
    "l0_envelope_linf",
    "tightest_pos_hom_on_ball",
    "tightest_norm_below_phi_l0",
    "monotone_ratio_check",
    "best_cvx_on_subset",
    "best_pos_hom_on_subset",
    "surface_summary",
    "write_surface_json",
]

# Relative slack of ball membership on grids; absorbs the <= 1-ulp rounding
# of node coordinates without ever admitting nodes a full cell outside.
BALL_TOL = 1e-9


def ball_box_grid(dim: int, count: int, radius: float = 1.0) -> Grid:
    """Symmetric grid over the unit-ball bounding box inflated by one cell.

    The step is ``2 * radius / (count - 3)``, so the sphere's axis points
    sit exactly one cell inside the box boundary and are grid nodes.
    """
    if count < 5 or count % 2 == 0:
        raise ValueError(f"ball grid needs an odd count >= 5 (got {count})")
    h = 2.0 * radius / (count - 3)
    half = (count - 1) // 2
    hi = half * h
    return Grid((-hi,) * dim, (hi,) * dim, (count,) * dim)


def _ball_mask(nu: NormalizationSpec, nodes: np.ndarray) -> np.ndarray:
    return nu.batch(nodes) <= 1.0 + BALL_TOL


def _hull_mask(nu: NormalizationSpec, grid: Grid, ball: np.ndarray,
               dual_grid: Grid) -> np.ndarray:
    """Nodes inside the closed convex hull of the unit ball of nu."""
    if nu.kind == "lp":
        if nu.p >= 1.0:
            return ball
        # For p < 1 the ball is star-shaped with the signed axes as extreme
        # points, so its closed convex hull is the l1 ball.
        return lp_value_batch(grid.nodes, 1.0) <= 1.0 + BALL_TOL
    indicator = np.where(ball, 0.0, math.inf)
    bic = fenchel_biconjugate(FunctionSample(grid, indicator), dual_grid)
    return bic.values <= 1e-7


def _phi_scale(f: ZeroHomFnSpec, fallback: float = 1.0) -> float:
    if f.kind == "phi_l0":
        finite = f.phi.values[np.isfinite(f.phi.values)]
        return float(np.abs(finite).max()) if finite.size else fallback
    return fallback


def tightest_convex_on_ball(f: ZeroHomFnSpec, nu: NormalizationSpec,
                            eval_grid: Grid, dual_grid: Grid | None = None,
                            route: str = "auto") -> FunctionSample:
    """Tightest closed convex function below the 0-homogeneous f on the unit
    ball of nu, sampled on ``eval_grid``.

    Computed as the Fenchel conjugate (over ``dual_grid``) of the Capra
    conjugate.  The Capra conjugate itself is analytic for phi∘l0 with an lp
    normalization (``route="analytic"``); otherwise it is the grid conjugate
    of f masked to the ball (``route="ball"``).  Nodes outside the closed
    convex hull of the ball are set to +inf by predicate.
    """
    nodes = eval_grid.nodes
    dim = eval_grid.dim
    ball = _ball_mask(nu, nodes)
    if route == "auto":
        route = "analytic" if _analytic_applicable(f, nu) else "ball"
    if dual_grid is None:
        if f.kind == "phi_l0":
            scale = _phi_scale(f)
        else:
            fb = f.batch(nodes[ball])
            finite = fb[np.isfinite(fb)]
            scale = float(np.abs(finite).max()) if finite.size else 1.0
        dual_grid = default_dual_grid(dim, scale)
    if route == "analytic":
        if not _analytic_applicable(f, nu):
            raise ValueError("analytic route requires phi∘l0 and an lp norm with p >= 1")
        src = SourceNormSpec.lp(nu.p, dim)
        conj_vals = capra_conjugate_l0_analytic_batch(dual_grid.nodes, f.phi, src)
    elif route == "ball":
        fvals = f.batch(nodes)
        conj_vals = _conjugate_values(nodes, np.where(ball, fvals, math.inf),
                                      dual_grid.nodes)
    else:
        raise ValueError(f"unknown route {route!r}")
    hull = _hull_mask(nu, eval_grid, ball, dual_grid)
    out = np.full(eval_grid.node_count, math.inf)
    out[hull] = _conjugate_values(dual_grid.nodes, conj_vals, nodes[hull])
    return FunctionSample(eval_grid, out)


def l0_envelope_linf(x, phi: PhiSpec | None = None) -> float:
    """Closed form of the convex envelope of ``phi(l0(.))`` on the linf unit
    ball: ``phi(1) * l1(x)`` inside the ball, +inf outside.

    The separable computation behind this identity needs phi proportional to
    the identity; other weight profiles are rejected (use
    :func:`tightest_convex_on_ball`).  Defaults to the identity, for which
    the envelope is exactly the l1 norm on the ball.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if phi is None:
        phi = PhiSpec.identity(x.size)
    if phi.dim != x.size:
        raise ValueError(f"invalid-phi: phi has dim {phi.dim}, point has dim {x.size}")
    c = phi(1)
    for l in range(1, phi.dim + 1):
        if not math.isfinite(phi(l)) or abs(phi(l) - c * l) > 1e-12 * max(1.0, c * l):
            raise ValueError(
                "closed form requires phi proportional to the identity; "
                "use tightest_convex_on_ball for general weights"
            )
    if lp_value(x, math.inf) <= 1.0:
        return c * lp_value(x, 1.0)
    return math.inf


def tightest_pos_hom_on_ball(f: ZeroHomFnSpec, nu: NormalizationSpec, x,
                             dual_candidates, **kwargs) -> float:
    """Tightest closed convex positively 1-homogeneous minorant of f on the
    unit ball of nu, evaluated at x as the support function of the Capra
    subdifferential at 0 over the candidate cloud.

    A lower bound of the true support function; exact when the accepted set
    is analytic and the candidates contain its extreme points.
    """
    accepted = capra_subdiff_at_zero(f, CouplingSpec(nu), dual_candidates, **kwargs)
    if accepted.shape[0] == 0:
        return -math.inf
    x = np.asarray(x, dtype=float)
    return float(np.max(accepted @ x))


def tightest_norm_below_phi_l0(phi: PhiSpec, source: SourceNormSpec,
                               **kwargs) -> NormObject:
    """Tightest norm below ``phi(l0(.))`` on the source unit ball."""
    return best_norm_object(phi, source, **kwargs)


def monotone_ratio_check(phi: PhiSpec, p: float) -> bool:
    """Gate for the l1 closed form of the best norm: phi nondecreasing for
    p = 1, or ``l -> phi(l)^q / l`` nondecreasing for p > 1."""
    if not (p >= 1.0 or p == math.inf):
        raise ValueError(f"monotone ratio check requires p in [1, inf] (got {p})")
    return lp_gauge_collapses(phi, p)


def _subset_mask(grid: Grid, subset) -> np.ndarray:
    if callable(subset):
        mask = np.fromiter((bool(subset(x)) for x in grid.nodes), dtype=bool,
                           count=grid.node_count)
    else:
        mask = np.asarray(subset, dtype=bool).reshape(-1)
        if mask.shape[0] != grid.node_count:
            raise ValueError("subset mask length does not match node count")
    return mask


def best_cvx_on_subset(f: FunctionSample, subset, dual_grid: Grid) -> FunctionSample:
    """Best closed convex lower approximation of f on the node subset U:
    the biconjugate of f plus the indicator of U.

    ``subset`` is a node predicate (callable on points) or a boolean mask.
    """
    mask = _subset_mask(f.grid, subset)
    if not mask.any():
        raise ValueError("empty-U: subset contains no grid node")
    masked = FunctionSample(f.grid, np.where(mask, f.values, math.inf))
    return fenchel_biconjugate(masked, dual_grid)


def best_pos_hom_on_subset(f: FunctionSample, subset, x, dual_candidates,
                           tol: float | None = None) -> float:
    """Best closed convex positively 1-homogeneous approximation of f on U,
    evaluated at x: the support function over candidates y accepted by the
    Fenchel-Young membership test ``(f + indicator_U)*(y) <= 0``.

    Requires 0 in U and f(0) = 0.  The default membership tolerance is
    ``5 h (1 + |y|)`` per candidate (grid conjugates under-estimate by a
    step times a Lipschitz factor).
    """
    mask = _subset_mask(f.grid, subset)
    if not mask.any():
        raise ValueError("empty-U: subset contains no grid node")
    zero_rows = np.flatnonzero(np.all(f.grid.nodes == 0.0, axis=1))
    if zero_rows.size == 0 or not mask[zero_rows[0]]:
        raise ValueError("zero-not-in-U: the origin must be a subset node")
    f0 = float(f.values[zero_rows[0]])
    if f0 != 0.0:
        raise ValueError(f"f-at-zero-nonzero: f(0) = {f0}")
    masked = FunctionSample(f.grid, np.where(mask, f.values, math.inf))
    candidates = np.atleast_2d(np.asarray(dual_candidates, dtype=float))
    conj = conjugate_at_points(masked, candidates)
    if tol is None:
        h = max(f.grid.steps)
        tol = 5.0 * h * (1.0 + np.linalg.norm(candidates, axis=1))
    accepted = candidates[conj <= tol]
    if accepted.shape[0] == 0:
        return -math.inf
    x = np.asarray(x, dtype=float)
    return float(np.max(accepted @ x))


def _json_value(v: float):
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return float(v)


def surface_summary(sample: FunctionSample, checkpoints: Sequence = ()) -> dict:
    """Summary dict of a surface sample with pinned checkpoint values."""
    vals = sample.values
    return {
        "min": _json_value(float(vals.min())),
        "max": _json_value(float(vals.max())),
        "values_at": [
            {"x": [float(c) for c in np.asarray(pt, dtype=float)],
             "v": _json_value(sample.value_near(pt))}
            for pt in checkpoints
        ],
    }


def write_surface_json(sample: FunctionSample, path, checkpoints: Sequence = ()) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(surface_summary(sample, checkpoints), fh, indent=2, sort_keys=True)
        fh.write("\n")
