"""Fenchel and Capra conjugation, biconjugation, and subdifferentials.

The coupling here is "constant along primal rays" (Capra): the scalar
product divided by a normalization function of the primal argument,
``<x, y> / nu(x)`` for x != 0 and 0 at x = 0.  For 0-homogeneous functions
the Capra conjugate coincides with the Fenchel conjugate of the function
restricted to the unit ball (equivalently, sphere-plus-origin) of nu, which
gives two independently computable routes to the same value.

Grid transforms evaluate output nodes independently and deterministically;
chunked evaluation reproduces the row-at-a-time oracle bit for bit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._directions import sign_patterns, unit_directions
from .norms import (
    NormalizationSpec,
    PhiSpec,
    SourceNormSpec,
    conj_exponent,
    top_k_norm_table,
)
from .numerics import FunctionSample, Grid, as_extreal, low_add

__all__ = [
    "CouplingSpec",
    "ZeroHomFnSpec",
    "capra_coupling",
    "fenchel_conjugate",
    "fenchel_biconjugate",
    "conjugate_at_points",
    "build_sphere_sample",
    "capra_conjugate",
    "capra_conjugate_direct",
    "capra_conjugate_l0_analytic",
    "capra_conjugate_l0_analytic_batch",
    "capra_subdiff_contains",
    "capra_subdiff_at_zero",
    "ANALYTIC_TOL",
]

ANALYTIC_TOL = 1e-9

# Work-array budget of the chunked transform (floats per chunk).
_CHUNK_FLOATS = 16_000_000


def _conjugate_values(points: np.ndarray, values: np.ndarray,
                      duals: np.ndarray) -> np.ndarray:
    """For each dual row y: max over i of ``<points[i], y> - values[i]``.

    The pairing is finite (points and duals are finite), so the subtraction
    realizes the lower addition for values of +-inf.  A value of -inf makes
    every output +inf; rows with value +inf never attain the max, and if no
    other row exists the output is -inf.  Accumulation is axis-ascending so
    chunked and row-at-a-time evaluation agree exactly.
    """
    duals = np.asarray(duals, dtype=float)
    if duals.ndim != 2:
        raise ValueError("expected a 2-d array of dual points")
    out = np.empty(duals.shape[0])
    if np.isneginf(values).any():
        out.fill(math.inf)
        return out
    keep = ~np.isposinf(values)
    pts = points[keep]
    vals = values[keep]
    if pts.shape[0] == 0:
        out.fill(-math.inf)
        return out
    d = pts.shape[1]
    chunk = max(1, _CHUNK_FLOATS // pts.shape[0])
    for start in range(0, duals.shape[0], chunk):
        yc = duals[start:start + chunk]
        scores = pts[:, 0, None] * yc[None, :, 0]
        for k in range(1, d):
            scores += pts[:, k, None] * yc[None, :, k]
        scores -= vals[:, None]
        out[start:start + chunk] = scores.max(axis=0)
    return out


def fenchel_conjugate(f: FunctionSample, dual_grid: Grid) -> FunctionSample:
    """Discrete Fenchel conjugate: ``f*(y) = max_x (<x, y> - f(x))`` with the
    max over the primal grid nodes and lower-addition rules for infinities.
    """
    if dual_grid.dim != f.grid.dim:
        raise ValueError(f"dual grid dimension {dual_grid.dim} != {f.grid.dim}")
    return FunctionSample(
        dual_grid, _conjugate_values(f.grid.nodes, f.values, dual_grid.nodes)
    )


def fenchel_biconjugate(f: FunctionSample, dual_grid: Grid) -> FunctionSample:
    """Conjugate twice through ``dual_grid``; result is <= f at every node and
    is the grid-restricted closed convex envelope of the samples (for dual
    grids covering the supporting slopes)."""
    return fenchel_conjugate(fenchel_conjugate(f, dual_grid), f.grid)


def conjugate_at_points(f: FunctionSample, points) -> np.ndarray:
    """Values of the discrete conjugate of ``f`` at arbitrary dual points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != f.grid.dim:
        raise ValueError(f"dual points must have dimension {f.grid.dim}")
    return _conjugate_values(f.grid.nodes, f.values, points)


@dataclass
class CouplingSpec:
    """Constant-along-primal-rays coupling generated by a normalization
    function: ``<x, y> / nu(x)`` for x != 0, and 0 at x = 0."""

    nu: NormalizationSpec


def capra_coupling(x, y, coupling: CouplingSpec) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.any(x != 0.0):
        return 0.0
    return float(np.dot(x, y)) / coupling.nu.value(x)


@dataclass
class ZeroHomFnSpec:
    """A 0-homogeneous function f (f(rho * x) = f(x) for rho != 0).

    The main family is ``phi_l0``: f(x) = phi(number of nonzeros of x).
    Custom callables are accepted; 0-homogeneity is the caller's contract
    and is spot-checked by the test suite.
    """

    kind: str
    phi: PhiSpec | None = None
    fn: Callable | None = None
    batch_fn: Callable | None = None
    label: str = ""

    @classmethod
    def l0(cls, dim: int) -> "ZeroHomFnSpec":
        return cls.phi_l0(PhiSpec.identity(dim))

    @classmethod
    def phi_l0(cls, phi: PhiSpec) -> "ZeroHomFnSpec":
        return cls(kind="phi_l0", phi=phi, label=f"phi∘l0(d={phi.dim})")

    @classmethod
    def constant_zero(cls) -> "ZeroHomFnSpec":
        return cls(
            kind="custom",
            fn=lambda x: 0.0,
            batch_fn=lambda X: np.zeros(X.shape[0]),
            label="0",
        )

    @classmethod
    def custom(cls, fn: Callable, batch: Callable | None = None,
               label: str = "custom") -> "ZeroHomFnSpec":
        return cls(kind="custom", fn=fn, batch_fn=batch, label=label)

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if self.kind == "phi_l0":
            return self.phi(int(np.count_nonzero(x)))
        return as_extreal(self.fn(x))

    def batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.kind == "phi_l0":
            counts = np.count_nonzero(X, axis=1)
            return self.phi.values[counts]
        if self.batch_fn is not None:
            return np.asarray(self.batch_fn(X), dtype=float)
        return np.array([self.value(row) for row in X])


def build_sphere_sample(nu: NormalizationSpec, dim: int,
                        count: int = 8192) -> np.ndarray:
    """Deterministic sample of the unit sphere of nu, plus the origin.

    Every sparse coordinate subspace is represented (signed axes exactly;
    low-discrepancy directions within larger supports), so functions whose
    level sets are tied to support size have all strata covered.  Directions
    are mapped to the sphere by the normalization mapping x -> x / nu(x).
    """
    rows = [np.zeros((1, dim))]
    for i in range(dim):
        for s in (1.0, -1.0):
            e = np.zeros((1, dim))
            e[0, i] = s
            rows.append(e / nu.value(e[0]))
    if dim >= 2:
        # Normalized sign patterns: for polyhedral spheres (l1, linf) the
        # per-stratum maxima of linear forms sit exactly at these points.
        corners = sign_patterns(dim)
        corners = corners[np.count_nonzero(corners, axis=1) >= 2]
        rows.append(corners / nu.batch(corners)[:, None])
    used = sum(r.shape[0] for r in rows)
    for m in range(2, dim + 1):
        subsets = list(itertools.combinations(range(dim), m))
        if m == dim:
            per = max(2 * dim, count - used)
        else:
            per = max(4 * m, 2 * int(round(count ** ((m - 1) / (dim - 1)))))
        used += per * len(subsets)
        dirs = unit_directions(per, m)
        for K in subsets:
            z = np.zeros((per, dim))
            z[:, list(K)] = dirs
            rows.append(z / nu.batch(z)[:, None])
    return np.vstack(rows)


def _check_sphere_sample(sample: np.ndarray, nu: NormalizationSpec) -> None:
    if sample.ndim != 2 or sample.shape[0] == 0:
        raise ValueError("empty-sample: sphere sample must be a nonempty 2-d array")
    nonzero = np.any(sample != 0.0, axis=1)
    if nonzero.all():
        raise ValueError("sphere sample must contain the origin")
    # Spot-check membership of the sphere on a few nonzero rows.
    idx = np.flatnonzero(nonzero)[:64]
    if idx.size:
        nv = nu.batch(sample[idx])
        if np.any(np.abs(nv - 1.0) > 1e-6):
            raise ValueError("sphere sample contains points off the unit sphere of nu")


def capra_conjugate(f: ZeroHomFnSpec, coupling: CouplingSpec, y,
                    sphere_sample: np.ndarray,
                    sample_values: np.ndarray | None = None) -> float:
    """Capra conjugate of a 0-homogeneous f at y, via the sphere route:
    ``max over sample points s of low_add(<s, y>, -f(s))``.

    The sample must lie on the unit sphere of the coupling's normalization
    function and contain the origin; with dense samples this converges to
    the Fenchel conjugate of f restricted to the unit ball.
    """
    sphere_sample = np.asarray(sphere_sample, dtype=float)
    _check_sphere_sample(sphere_sample, coupling.nu)
    y = np.asarray(y, dtype=float)
    if sample_values is None:
        sample_values = f.batch(sphere_sample)
    return float(_conjugate_values(sphere_sample, sample_values, y[None, :])[0])


def capra_conjugate_direct(f: ZeroHomFnSpec, coupling: CouplingSpec, y,
                           grid: Grid) -> float:
    """Capra conjugate at y straight from the definition: the max over grid
    nodes x of ``low_add(coupling(x, y), -f(x))``."""
    X = grid.nodes
    y = np.asarray(y, dtype=float)
    nuvals = coupling.nu.batch(X)
    Xn = np.where(nuvals[:, None] > 0.0, X / np.where(nuvals == 0.0, 1.0, nuvals)[:, None], 0.0)
    fvals = f.batch(X)
    return float(_conjugate_values(Xn, fvals, y[None, :])[0])


def _analytic_applicable(f: ZeroHomFnSpec, nu: NormalizationSpec) -> bool:
    return f.kind == "phi_l0" and nu.kind == "lp" and nu.p >= 1.0


def capra_conjugate_l0_analytic(y, phi: PhiSpec, source: SourceNormSpec) -> float:
    """Capra conjugate of ``phi(l0(.))`` for an lp source norm, p in [1, inf]:
    ``max over l in [0, d] of (top-(q, l)(y) - phi(l))`` with the l = 0 term
    equal to 0 and 1/p + 1/q = 1."""
    y = np.asarray(y, dtype=float).reshape(-1)
    return float(capra_conjugate_l0_analytic_batch(y[None, :], phi, source)[0])


def capra_conjugate_l0_analytic_batch(Y: np.ndarray, phi: PhiSpec,
                                      source: SourceNormSpec) -> np.ndarray:
    if source.kind != "lp":
        raise ValueError("analytic conjugate requires an lp source norm")
    Y = np.asarray(Y, dtype=float)
    if phi.dim != Y.shape[1]:
        raise ValueError(f"invalid-phi: phi has dim {phi.dim}, points have dim {Y.shape[1]}")
    table = top_k_norm_table(Y, conj_exponent(source.p))
    terms = table - phi.values[None, 1:]
    return np.maximum(0.0, terms.max(axis=1))


def _sample_route_tol(y, sample_count: int, dim: int) -> float:
    # Sup over a sample of the sphere misses the optimum by (coverage gap)
    # times a Lipschitz factor of order 1 + |y|.
    gap = 1.0 if dim <= 1 else float(sample_count) ** (-1.0 / (dim - 1))
    if dim <= 1:
        return ANALYTIC_TOL
    return 5.0 * gap * (1.0 + float(np.linalg.norm(y)))


def capra_subdiff_contains(y, x, f: ZeroHomFnSpec, coupling: CouplingSpec,
                           sphere_sample: np.ndarray | None = None,
                           tol: float | None = None) -> bool:
    """Membership of y in the Capra subdifferential of f at x: equality of
    the conjugate value with ``low_add(coupling(x, y), -f(x))``.

    With an analytic conjugate the default tolerance is 1e-9; with a sampled
    conjugate it scales like the sample coverage gap times (1 + |y|).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fx = f.value(x)
    if not math.isfinite(fx):
        raise ValueError(f"infinite-f-at-x: f(x) = {fx}")
    rhs = low_add(capra_coupling(x, y, coupling), -fx)
    if _analytic_applicable(f, coupling.nu):
        src = SourceNormSpec.lp(coupling.nu.p, x.size)
        lhs = capra_conjugate_l0_analytic(y, f.phi, src)
        if tol is None:
            tol = ANALYTIC_TOL
    else:
        if sphere_sample is None:
            sphere_sample = build_sphere_sample(coupling.nu, x.size)
        lhs = capra_conjugate(f, coupling, y, sphere_sample)
        if tol is None:
            tol = _sample_route_tol(y, sphere_sample.shape[0], x.size)
    return abs(lhs - rhs) <= tol


def capra_subdiff_at_zero(f: ZeroHomFnSpec, coupling: CouplingSpec, candidates,
                          sphere_sample: np.ndarray | None = None,
                          tol: float | None = None) -> np.ndarray:
    """Candidates belonging to the Capra subdifferential of f at 0, i.e.
    those with conjugate value <= 0 (up to the route tolerance).

    This is the Rockafellar-Moreau subdifferential at 0 of f plus the
    indicator of the unit ball of nu, filtered to the candidate set.
    """
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    dim = candidates.shape[1]
    f0 = f.value(np.zeros(dim))
    if f0 != 0.0:
        raise ValueError(f"f-at-zero-nonzero: f(0) = {f0}")
    if _analytic_applicable(f, coupling.nu):
        src = SourceNormSpec.lp(coupling.nu.p, dim)
        conj = capra_conjugate_l0_analytic_batch(candidates, f.phi, src)
        if tol is None:
            tol = ANALYTIC_TOL
    else:
        if sphere_sample is None:
            sphere_sample = build_sphere_sample(coupling.nu, dim)
        _check_sphere_sample(sphere_sample, coupling.nu)
        fvals = f.batch(sphere_sample)
        conj = _conjugate_values(sphere_sample, fvals, candidates)
        if tol is None:
            norms = np.linalg.norm(candidates, axis=1)
            gap = 1.0 if dim <= 1 else float(sphere_sample.shape[0]) ** (-1.0 / (dim - 1))
            tol = ANALYTIC_TOL if dim <= 1 else 5.0 * gap * (1.0 + norms)
    return candidates[conj <= tol]
