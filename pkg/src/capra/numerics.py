"""Extended-real arithmetic with Moreau additions, and uniform sample grids.

Values live in [-inf, +inf].  The two infinities are IEEE-754 specials, so
the only case ordinary ``+`` cannot decide, ``(+inf) + (-inf)``, is resolved
by branch in :func:`low_add` / :func:`upp_add` and never by rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "as_extreal",
    "low_add",
    "upp_add",
    "Grid",
    "build_grid",
    "FunctionSample",
    "sample",
    "write_sample_csv",
    "read_sample_csv",
    "default_dual_grid",
]


def as_extreal(value) -> float:
    """Coerce ``value`` to a float in [-inf, +inf]; NaN is rejected."""
    v = float(value)
    if math.isnan(v):
        raise ValueError("extended real must be finite, +inf or -inf (got nan)")
    return v


def low_add(a, b) -> float:
    """Moreau lower addition: ordinary sum with (+inf) + (-inf) = -inf."""
    a = as_extreal(a)
    b = as_extreal(b)
    if math.isinf(a) and math.isinf(b) and (a > 0.0) != (b > 0.0):
        return -math.inf
    return a + b


def upp_add(a, b) -> float:
    """Moreau upper addition: ordinary sum with (+inf) + (-inf) = +inf."""
    a = as_extreal(a)
    b = as_extreal(b)
    if math.isinf(a) and math.isinf(b) and (a > 0.0) != (b > 0.0):
        return math.inf
    return a + b


def _axis(lower: float, upper: float, count: int) -> np.ndarray:
    if count < 2:
        raise ValueError(f"invalid-bounds: axis point count must be >= 2 (got {count})")
    if not lower < upper:
        raise ValueError(
            f"invalid-bounds: axis requires lower < upper (got [{lower}, {upper}])"
        )
    if lower == -upper:
        # Symmetric axes are built from the midpoint outward so that 0 is an
        # exact node and integer multiples of the step stay exact.
        c = (count - 1) / 2.0
        ax = (np.arange(count) - c) * (upper / c)
        ax[0] = lower
        ax[-1] = upper
    else:
        ax = np.linspace(lower, upper, count)
    ax.flags.writeable = False
    return ax


@dataclass
class Grid:
    """Uniform axis-aligned lattice over a box in R^d.

    Nodes are enumerated row-major: the last axis varies fastest, so node
    ``i`` has multi-index ``np.unravel_index(i, counts)``.  Instances are
    immutable after construction.

    Parameters
    ----------
    lowers, uppers : tuple of float
        Per-axis bounds, ``lowers[k] < uppers[k]``.
    counts : tuple of int
        Per-axis node counts, each >= 2.
    """

    lowers: tuple
    uppers: tuple
    counts: tuple
    axes: tuple = field(init=False, repr=False)

    def __post_init__(self):
        self.lowers = tuple(float(v) for v in self.lowers)
        self.uppers = tuple(float(v) for v in self.uppers)
        self.counts = tuple(int(n) for n in self.counts)
        if not (len(self.lowers) == len(self.uppers) == len(self.counts)):
            raise ValueError("invalid-bounds: bounds and counts must have equal length")
        if not self.counts:
            raise ValueError("invalid-bounds: grid needs at least one axis")
        self.axes = tuple(
            _axis(lo, hi, n) for lo, hi, n in zip(self.lowers, self.uppers, self.counts)
        )
        self._nodes = None

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def node_count(self) -> int:
        return int(np.prod(self.counts))

    @property
    def steps(self) -> tuple:
        """Per-axis spacing h."""
        return tuple(
            (hi - lo) / (n - 1) for lo, hi, n in zip(self.lowers, self.uppers, self.counts)
        )

    @property
    def nodes(self) -> np.ndarray:
        """All nodes as an (node_count, dim) array, row-major order."""
        if self._nodes is None:
            mesh = np.meshgrid(*self.axes, indexing="ij")
            pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
            pts.flags.writeable = False
            self._nodes = pts
        return self._nodes

    def node(self, index: int) -> np.ndarray:
        return self.nodes[index]

    def nearest_index(self, point) -> int:
        """Flat index of the node nearest to ``point`` (clipped to the box)."""
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise ValueError(f"point must have shape ({self.dim},)")
        multi = []
        for k in range(self.dim):
            h = self.steps[k]
            i = int(round((point[k] - self.lowers[k]) / h))
            multi.append(min(max(i, 0), self.counts[k] - 1))
        return int(np.ravel_multi_index(tuple(multi), self.counts))


def build_grid(bounds: Sequence, counts: Sequence[int]) -> Grid:
    """Build a uniform grid from per-axis ``(lower, upper)`` pairs and counts."""
    bounds = list(bounds)
    counts = list(counts)
    if len(bounds) != len(counts):
        raise ValueError("invalid-bounds: bounds and counts must have equal length")
    lowers = [b[0] for b in bounds]
    uppers = [b[1] for b in bounds]
    return Grid(tuple(lowers), tuple(uppers), tuple(counts))


def default_dual_grid(dim: int, scale: float, step: float = 1.0 / 16.0) -> Grid:
    """Symmetric grid used as the dual domain of grid conjugations.

    The half-range is ``max(2, ceil(2 * (1 + scale)))`` so the supporting
    slopes of functions with finite values up to ``scale`` on the unit ball
    are covered.  The default step is a power of two, which keeps integer
    dual points (in particular the ±1 sign lattice) exact nodes.
    """
    if not math.isfinite(scale):
        scale = 1.0
    radius = max(2, int(math.ceil(2.0 * (1.0 + max(scale, 0.0)))))
    per_axis = int(round(2 * radius / step)) + 1
    return Grid((-float(radius),) * dim, (float(radius),) * dim, (per_axis,) * dim)


@dataclass
class FunctionSample:
    """Extended-real values of a function on the nodes of a :class:`Grid`.

    ``values[i]`` is the value at ``grid.nodes[i]``; entries may be ±inf but
    never NaN.  Indicator functions are encoded as 0 / +inf values.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if vals.shape[0] != self.grid.node_count:
            raise ValueError(
                f"values length {vals.shape[0]} does not match node count "
                f"{self.grid.node_count}"
            )
        if np.isnan(vals).any():
            raise ValueError("sample values must not contain NaN")
        vals = vals.copy()
        vals.flags.writeable = False
        self.values = vals

    def value_near(self, point) -> float:
        """Value at the node nearest to ``point``."""
        return float(self.values[self.grid.nearest_index(point)])


def sample(fn: Callable, grid: Grid) -> FunctionSample:
    """Evaluate ``fn`` at every grid node (row-major order)."""
    vals = np.empty(grid.node_count)
    for i, x in enumerate(grid.nodes):
        vals[i] = as_extreal(fn(x))
    return FunctionSample(grid, vals)


def _format_value(v: float) -> str:
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return repr(float(v))


def write_sample_csv(sample: FunctionSample, path) -> None:
    """Write one row per node with columns ``x_1..x_d,value``.

    Infinities are written as the literals ``+inf`` / ``-inf``.
    """
    d = sample.grid.dim
    header = ",".join(f"x_{k + 1}" for k in range(d)) + ",value"
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for node, v in zip(sample.grid.nodes, sample.values):
            coords = ",".join(repr(float(c)) for c in node)
            fh.write(f"{coords},{_format_value(v)}\n")


def _parse_value(text: str) -> float:
    text = text.strip()
    if text == "+inf":
        return math.inf
    if text == "-inf":
        return -math.inf
    return as_extreal(float(text))


def read_sample_csv(path):
    """Read a sample CSV; returns ``(points, values)`` arrays."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        if header[-1] != "value" or not header[0].startswith("x_"):
            raise ValueError(f"unrecognized sample CSV header: {header}")
        d = len(header) - 1
        pts, vals = [], []
        for line in fh:
            cells = line.strip().split(",")
            if len(cells) != d + 1:
                raise ValueError(f"malformed sample CSV row: {line!r}")
            pts.append([float(c) for c in cells[:d]])
            vals.append(_parse_value(cells[d]))
    return np.asarray(pts, dtype=float), np.asarray(vals, dtype=float)
