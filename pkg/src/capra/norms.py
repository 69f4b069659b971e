"""Norms and normalization functions for sparsity analysis.

Provides the lp family (p in (0, inf], with p < 1 admitted as a
normalization function rather than a norm), the top-(q,k) norms, the
k-support norms for lp sources, and gauges of intersected dual balls of the
form ``cap_l phi(l) * B_l`` together with their support-function norms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._directions import sign_patterns, unit_directions
from .numerics import as_extreal

__all__ = [
    "conj_exponent",
    "lp_value",
    "lp_value_batch",
    "NormalizationSpec",
    "normalize",
    "ball_contains",
    "sphere_contains",
    "SourceNormSpec",
    "PhiSpec",
    "top_k_norm",
    "top_k_norm_table",
    "k_support_norm",
    "dual_coordinate_k_norm",
    "phi_dual_gauge",
    "NormObject",
    "best_norm_object",
    "lp_gauge_collapses",
    "parse_config",
]

SPHERE_TOL = 1e-9


def conj_exponent(p: float) -> float:
    """Conjugate exponent q with 1/p + 1/q = 1 (q = inf for p = 1)."""
    if p == 1.0:
        return math.inf
    if p == math.inf:
        return 1.0
    if p <= 1.0:
        raise ValueError(f"conjugate exponent requires p >= 1 (got {p})")
    return p / (p - 1.0)


def lp_value(x, p: float) -> float:
    """``(sum |x_i|^p)^(1/p)`` for finite p, ``max |x_i|`` for p = inf.

    Any p > 0 is accepted; for p < 1 the result is the (non-subadditive)
    lp normalization function.
    """
    if not p > 0.0:
        raise ValueError(f"nonpositive-p: lp exponent must be > 0 (got {p})")
    a = np.abs(np.asarray(x, dtype=float).reshape(-1))
    if a.size == 0:
        raise ValueError("lp_value needs at least one coordinate")
    m = float(a.max())
    if p == math.inf or m == 0.0:
        return m
    return m * float(np.sum((a / m) ** p)) ** (1.0 / p)


def lp_value_batch(X: np.ndarray, p: float) -> np.ndarray:
    """Row-wise :func:`lp_value` of an (n, d) array."""
    if not p > 0.0:
        raise ValueError(f"nonpositive-p: lp exponent must be > 0 (got {p})")
    a = np.abs(np.asarray(X, dtype=float))
    if a.ndim != 2:
        raise ValueError("expected a 2-d array of row vectors")
    m = a.max(axis=1)
    if p == math.inf:
        return m
    out = np.zeros(a.shape[0])
    nz = m > 0.0
    if nz.any():
        scaled = a[nz] / m[nz, None]
        out[nz] = m[nz] * np.sum(scaled**p, axis=1) ** (1.0 / p)
    return out


@dataclass
class NormalizationSpec:
    """A normalization function: nonnegative, absolutely 1-homogeneous and
    vanishing only at 0 (a norm without the subadditivity requirement).

    Use :meth:`lp` for the lp family (any p > 0, including p < 1) or
    :meth:`custom` to wrap an arbitrary evaluator.
    """

    kind: str
    p: float | None = None
    fn: Callable | None = None
    batch_fn: Callable | None = None

    @classmethod
    def lp(cls, p: float) -> "NormalizationSpec":
        if not float(p) > 0.0:
            raise ValueError(f"nonpositive-p: lp exponent must be > 0 (got {p})")
        return cls(kind="lp", p=float(p))

    @classmethod
    def custom(cls, fn: Callable, batch: Callable | None = None) -> "NormalizationSpec":
        return cls(kind="custom", fn=fn, batch_fn=batch)

    def value(self, x) -> float:
        if self.kind == "lp":
            return lp_value(x, self.p)
        return float(self.fn(np.asarray(x, dtype=float)))

    def batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.kind == "lp":
            return lp_value_batch(X, self.p)
        if self.batch_fn is not None:
            return np.asarray(self.batch_fn(X), dtype=float)
        return np.array([self.value(row) for row in X])


def normalize(x, nu: NormalizationSpec) -> np.ndarray:
    """Map x to x / nu(x), and 0 to 0 (range: the unit sphere plus origin)."""
    x = np.asarray(x, dtype=float)
    if not np.any(x != 0.0):
        return np.zeros_like(x)
    return x / nu.value(x)


def ball_contains(x, nu: NormalizationSpec, tol: float = 0.0) -> bool:
    """True iff nu(x) <= 1 (+ optional slack)."""
    return nu.value(x) <= 1.0 + tol


def sphere_contains(x, nu: NormalizationSpec, tol: float = SPHERE_TOL) -> bool:
    """True iff |nu(x) - 1| <= tol."""
    return abs(nu.value(x) - 1.0) <= tol


@dataclass
class SourceNormSpec:
    """A norm on R^d used to generate coordinate-k and dual coordinate-k norms.

    ``lp`` sources (p in [1, inf]) have exact closed-form duals; ``custom``
    sources are handled by subset enumeration with sampled restricted duals.
    """

    kind: str
    dim: int
    p: float | None = None
    fn: Callable | None = None

    @classmethod
    def lp(cls, p: float, dim: int) -> "SourceNormSpec":
        p = float(p)
        if not (p >= 1.0 or p == math.inf):
            raise ValueError(f"source norm requires p in [1, inf] (got {p})")
        return cls(kind="lp", dim=int(dim), p=p)

    @classmethod
    def custom(cls, fn: Callable, dim: int) -> "SourceNormSpec":
        return cls(kind="custom", dim=int(dim), fn=fn)

    def value(self, x) -> float:
        if self.kind == "lp":
            return lp_value(x, self.p)
        return float(self.fn(np.asarray(x, dtype=float)))


@dataclass
class PhiSpec:
    """Weights ``phi: {0, ..., d} -> [0, +inf]`` for sparsity levels.

    Requires phi(0) = 0, phi(l) > 0 for l >= 1, and phi(l) < +inf for at
    least one l >= 1.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if vals.size < 2:
            raise ValueError("invalid-phi: need values for levels 0..d with d >= 1")
        if np.isnan(vals).any():
            raise ValueError("invalid-phi: NaN entry")
        if vals[0] != 0.0:
            raise ValueError(f"invalid-phi: phi(0) must be 0 (got {vals[0]})")
        if not np.all(vals[1:] > 0.0):
            raise ValueError("invalid-phi: phi(l) must be > 0 for l >= 1")
        if not np.any(np.isfinite(vals[1:])):
            raise ValueError("invalid-phi: phi(l) must be finite for at least one l >= 1")
        vals = vals.copy()
        vals.flags.writeable = False
        self.values = vals

    @property
    def dim(self) -> int:
        return self.values.size - 1

    def __call__(self, level: int) -> float:
        if not 0 <= level <= self.dim:
            raise ValueError(f"invalid-phi: level {level} outside [0, {self.dim}]")
        return float(self.values[level])

    @classmethod
    def identity(cls, dim: int) -> "PhiSpec":
        return cls(np.arange(dim + 1, dtype=float))

    @classmethod
    def scaled_identity(cls, scale: float, dim: int) -> "PhiSpec":
        return cls(scale * np.arange(dim + 1, dtype=float))

    @classmethod
    def from_values(cls, values: Sequence) -> "PhiSpec":
        return cls(np.array([as_extreal(v) for v in values]))


def _abs_sorted_desc(y) -> np.ndarray:
    """|y| sorted nonincreasingly; ties keep original index order."""
    a = np.abs(np.asarray(y, dtype=float).reshape(-1))
    order = np.argsort(-a, kind="stable")
    return a[order]


def top_k_norm(y, q: float, k: int) -> float:
    """q-norm of the k largest-magnitude components of y."""
    a = _abs_sorted_desc(y)
    d = a.size
    if not 1 <= k <= d:
        raise ValueError(f"k-out-of-range: need 1 <= k <= {d} (got k={k})")
    if not (q >= 1.0 or q == math.inf):
        raise ValueError(f"top-k norm requires q in [1, inf] (got {q})")
    top = a[:k]
    m = float(top[0])
    if q == math.inf or m == 0.0:
        return m
    return m * float(np.sum((top / m) ** q)) ** (1.0 / q)


def top_k_norm_table(Y: np.ndarray, q: float) -> np.ndarray:
    """All top-(q, k) values of each row: entry (i, k-1) is top-(q,k)(Y[i])."""
    a = np.abs(np.asarray(Y, dtype=float))
    if a.ndim != 2:
        raise ValueError("expected a 2-d array of row vectors")
    a = -np.sort(-a, axis=1)
    m = a[:, 0].copy()
    if q == math.inf:
        return np.repeat(m[:, None], a.shape[1], axis=1)
    if not q >= 1.0:
        raise ValueError(f"top-k norm requires q in [1, inf] (got {q})")
    safe = np.where(m > 0.0, m, 1.0)
    cums = np.cumsum((a / safe[:, None]) ** q, axis=1)
    return np.where(m[:, None] > 0.0, safe[:, None] * cums ** (1.0 / q), 0.0)


def _k_support_l2(x, k: int) -> float:
    # Sorted-split evaluation: the r+1 smallest of the k active magnitudes
    # are averaged; r is the unique split with
    #   z_{k-r-1} > (sum of the trailing d-k+r+1 terms) / (r+1) >= z_{k-r}.
    z = _abs_sorted_desc(x)
    tail = np.concatenate([np.cumsum(z[::-1])[::-1], [0.0]])
    for r in range(k):
        upper = math.inf if k - r - 1 == 0 else float(z[k - r - 2])
        mean = float(tail[k - r - 1]) / (r + 1)
        lower = float(z[k - r - 1])
        if upper > mean >= lower:
            head = z[: k - r - 1]
            return math.sqrt(float(np.dot(head, head)) + mean * float(tail[k - r - 1]))
    # Degenerate float ties: all k slots averaged.
    total = float(tail[0])
    return math.sqrt(total * total / k)


def k_support_norm(x, p: float, k: int) -> float:
    """Coordinate-k norm of the lp source norm, p in {1, 2, inf}.

    These are the closed-form cases; other exponents have no analytic
    expression and are served by the brute-force oracle instead.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    d = x.size
    if not 1 <= k <= d:
        raise ValueError(f"k-out-of-range: need 1 <= k <= {d} (got k={k})")
    if p == 1.0:
        return lp_value(x, 1.0)
    if p == math.inf:
        return max(lp_value(x, 1.0) / k, lp_value(x, math.inf))
    if p == 2.0:
        return _k_support_l2(x, k)
    raise ValueError(
        f"unsupported-p: closed forms exist for p in {{1, 2, inf}} (got {p}); "
        "use the brute-force oracle for other exponents"
    )


def _restricted_dual_sampled(y_sub: np.ndarray, source: SourceNormSpec,
                             support: tuple, n_directions: int) -> float:
    """Lower estimate of sup{<y, z>: z supported on K, source(z) <= 1}."""
    m = y_sub.size
    dirs = np.vstack([unit_directions(n_directions, m), sign_patterns(m)])
    best = 0.0
    z = np.zeros(source.dim)
    for u in dirs:
        z[:] = 0.0
        z[list(support)] = u
        t = source.value(z)
        if t > 0.0 and math.isfinite(t):
            best = max(best, float(np.dot(y_sub, u)) / t)
    return best


def dual_coordinate_k_norm(y, source: SourceNormSpec, k: int,
                           method: str = "auto", directions_per_subset: int = 512) -> float:
    """Dual coordinate-k norm: sup over supports K with |K| <= k of the
    restricted dual norm of y_K.

    For an lp source this equals the top-(q, k) norm with 1/p + 1/q = 1;
    ``method="enumerate"`` forces the subset-enumeration route (exact for lp
    sources, used for cross-checks).  Custom sources always enumerate, with
    sampled restricted duals, and require d <= 12.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    d = y.size
    if not 1 <= k <= d:
        raise ValueError(f"k-out-of-range: need 1 <= k <= {d} (got k={k})")
    if source.kind == "lp":
        q = conj_exponent(source.p)
        if method in ("auto", "sort"):
            return top_k_norm(y, q, k)
        if method != "enumerate":
            raise ValueError(f"unknown method {method!r}")
        # The restricted dual of lp on a support K is lq on K, and it is
        # monotone in K, so size-k supports suffice.
        best = 0.0
        for K in itertools.combinations(range(d), k):
            best = max(best, lp_value(y[list(K)], q))
        return best
    if d > 12:
        raise ValueError(f"dimension-too-large: custom sources need d <= 12 (got {d})")
    best = 0.0
    for K in itertools.combinations(range(d), k):
        best = max(
            best,
            _restricted_dual_sampled(y[list(K)], source, K, directions_per_subset),
        )
    return best


def phi_dual_gauge(y, phi: PhiSpec, source: SourceNormSpec, **kwargs) -> float:
    """Gauge of ``cap_l phi(l) * B_l`` where B_l is the dual coordinate-l ball.

    Computed as ``sup_l dual_coordinate_k_norm(y, source, l) / phi(l)``;
    levels with phi(l) = +inf contribute 0 (``+inf * B_l`` is all of R^d).
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    d = y.size
    if phi.dim != d:
        raise ValueError(f"invalid-phi: phi has dim {phi.dim}, point has dim {d}")
    if not np.any(y != 0.0):
        return 0.0
    if source.kind == "lp":
        q = conj_exponent(source.p)
        table = top_k_norm_table(y[None, :], q)[0]
        best = 0.0
        for l in range(1, d + 1):
            w = phi(l)
            if math.isfinite(w):
                best = max(best, float(table[l - 1]) / w)
        return best
    best = 0.0
    for l in range(1, d + 1):
        w = phi(l)
        if math.isfinite(w):
            best = max(best, dual_coordinate_k_norm(y, source, l, **kwargs) / w)
    return best


@dataclass
class NormObject:
    """An evaluable norm with its dual gauge.

    ``evaluator`` and ``dual_evaluator`` are mutually polar up to the
    documented estimation error of the evaluator (exact when a closed form
    exists).
    """

    evaluator: Callable
    dual_evaluator: Callable
    exact: bool = True
    label: str = ""

    def value(self, x) -> float:
        return float(self.evaluator(np.asarray(x, dtype=float)))

    def dual_value(self, y) -> float:
        return float(self.dual_evaluator(np.asarray(y, dtype=float)))


def lp_gauge_collapses(phi: PhiSpec, p: float) -> bool:
    """True when the phi-weighted dual gauge of an lp source collapses to
    ``linf / phi(1)``: phi nondecreasing for p = 1, or ``l -> phi(l)^q / l``
    nondecreasing for p > 1 (1/p + 1/q = 1)."""
    d = phi.dim
    if p == 1.0:
        seq = [phi(l) for l in range(1, d + 1)]
    else:
        q = conj_exponent(p)
        seq = [phi(l) ** q / l if math.isfinite(phi(l)) else math.inf
               for l in range(1, d + 1)]
    # Relative slack absorbs rounding of analytically constant ratios.
    return all(seq[i] <= seq[i + 1] * (1.0 + 1e-12) for i in range(len(seq) - 1))


def _support_on_gauge_ball(x, gauge: Callable, dim: int, n_directions: int) -> float:
    from .oracle import support_function_bruteforce  # deferred: oracle imports norms

    dirs = np.vstack([unit_directions(n_directions, dim), sign_patterns(dim)])
    cands = []
    for u in dirs:
        g = gauge(u)
        if g > 0.0 and math.isfinite(g):
            cands.append(u / g)
    return support_function_bruteforce(
        x, lambda y: gauge(y) <= 1.0 + 1e-12, np.asarray(cands)
    )


def best_norm_object(phi: PhiSpec, source: SourceNormSpec,
                     n_directions: int = 4096) -> NormObject:
    """The tightest norm below ``phi(l0(.))`` on the source unit ball.

    Its dual gauge is :func:`phi_dual_gauge`; the primal evaluator is the
    support function of the dual unit ball.  When the lp collapse condition
    of :func:`lp_gauge_collapses` holds the primal is exactly
    ``phi(1) * l1``; otherwise it is a direction-sampled lower estimate.
    """
    if phi.dim != source.dim:
        raise ValueError(
            f"invalid-phi: phi has dim {phi.dim}, source has dim {source.dim}"
        )

    def dual(y):
        return phi_dual_gauge(y, phi, source)

    if source.kind == "lp" and lp_gauge_collapses(phi, source.p):
        scale = phi(1)

        def primal(x):
            return scale * lp_value(x, 1.0)

        return NormObject(primal, dual, exact=True, label=f"{scale:g}*l1")

    def primal(x):
        x = np.asarray(x, dtype=float)
        if not np.any(x != 0.0):
            return 0.0
        return _support_on_gauge_ball(x, dual, source.dim, n_directions)

    return NormObject(primal, dual, exact=False, label="support(dual gauge ball)")


def _parse_lp(obj) -> float:
    v = obj["lp"]
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        return float(v)
    return float(v)


def parse_config(obj: dict, dim: int | None = None) -> dict:
    """Parse a JSON config object into norm specs.

    Accepts ``{"source": {"lp": 2}, "phi": [0, 1, 2], "nu": {"lp": 0.5}}``;
    every key is optional.  ``dim`` is inferred from ``phi`` when absent.
    """
    out: dict = {"source": None, "phi": None, "nu": None}
    if "phi" in obj and obj["phi"] is not None:
        out["phi"] = PhiSpec.from_values(obj["phi"])
        if dim is None:
            dim = out["phi"].dim
    if "nu" in obj and obj["nu"] is not None:
        out["nu"] = NormalizationSpec.lp(_parse_lp(obj["nu"]))
    if "source" in obj and obj["source"] is not None:
        if dim is None:
            raise ValueError("config with a source norm needs a dimension "
                             "(provide phi or pass dim)")
        out["source"] = SourceNormSpec.lp(_parse_lp(obj["source"]), dim)
    return out
