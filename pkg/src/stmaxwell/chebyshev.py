"""One-dimensional Chebyshev collocation kernel.

Nodes are stored in ascending physical order on an arbitrary interval
``[a, b]``. Two node families are supported:

* ``CGL`` -- Chebyshev-Gauss-Lobatto points, endpoints included.
* ``CG``  -- Chebyshev-Gauss points, strictly interior.

Quadrature weights are those of the Chebyshev weight ``1/sqrt(1 - xi**2)``
on the reference interval, scaled by ``(b - a)/2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "GridKind",
    "GridSpec",
    "Grid",
    "DiffMatrix",
    "InterpMatrix",
    "make_grid",
    "cgl_grid",
    "cg_grid",
    "diff_matrix",
    "second_diff",
    "interp_matrix",
    "restrict",
    "time_interior",
    "space_interior",
]


class GridKind(str, Enum):
    CGL = "CGL"
    CG = "CG"


@dataclass(frozen=True)
class GridSpec:
    kind: GridKind
    n_points: int
    interval: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        kind = GridKind(self.kind)
        object.__setattr__(self, "kind", kind)
        n = int(self.n_points)
        if n != self.n_points:
            raise ValueError(f"n_points must be an integer, got {self.n_points!r}")
        object.__setattr__(self, "n_points", n)
        if kind is GridKind.CGL and n < 2:
            raise ValueError("a CGL grid needs at least 2 points")
        if kind is GridKind.CG and n < 1:
            raise ValueError("a CG grid needs at least 1 point")
        a, b = (float(v) for v in self.interval)
        if not (np.isfinite(a) and np.isfinite(b)) or not b > a:
            raise ValueError(f"interval must satisfy a < b, got {self.interval!r}")
        object.__setattr__(self, "interval", (a, b))


@dataclass(frozen=True, eq=False)
class Grid:
    """Collocation grid. Build it with :func:`make_grid`."""

    spec: GridSpec
    nodes: np.ndarray
    quad_weights: np.ndarray
    bary_weights: np.ndarray = field(repr=False)
    # reference-interval node differences, computed with trig identities
    _ref_diff: np.ndarray = field(repr=False)

    @property
    def kind(self) -> GridKind:
        return self.spec.kind

    @property
    def n(self) -> int:
        return self.spec.n_points

    @property
    def interval(self) -> tuple[float, float]:
        return self.spec.interval

    @property
    def interior(self) -> np.ndarray:
        """Indices of nodes that are not interval endpoints."""
        if self.kind is GridKind.CGL:
            return np.arange(1, self.n - 1)
        return np.arange(self.n)

    def same_interval(self, other: "Grid") -> bool:
        return bool(np.allclose(self.interval, other.interval, rtol=1e-14, atol=1e-14))


def make_grid(spec: GridSpec) -> Grid:
    """Build the grid described by `spec`.

    Parameters
    ----------
    spec : GridSpec

    Returns
    -------
    Grid
        Ascending nodes on ``spec.interval`` with scaled Chebyshev weights.
    """
    a, b = spec.interval
    n = spec.n_points
    half = 0.5 * (b - a)
    j = np.arange(n)
    if spec.kind is GridKind.CGL:
        N = n - 1
        # -cos(pi j/N) written as a sine keeps the nodes exactly symmetric
        ref = np.sin(np.pi * (2 * j - N) / (2 * N))
        qw = np.full(n, np.pi / N)
        qw[[0, -1]] *= 0.5
        bw = (-1.0) ** j
        bw[[0, -1]] *= 0.5
        s = j[:, None] + j[None, :]
        d = j[:, None] - j[None, :]
        ref_diff = 2.0 * np.sin(np.pi * s / (2 * N)) * np.sin(np.pi * d / (2 * N))
    else:
        ref = np.sin(np.pi * (2 * j + 1 - n) / (2 * n))
        qw = np.full(n, np.pi / n)
        bw = (-1.0) ** j * np.sin(np.pi * (2 * j + 1) / (2 * n))
        s = j[:, None] + j[None, :] + 1
        d = j[:, None] - j[None, :]
        ref_diff = 2.0 * np.sin(np.pi * s / (2 * n)) * np.sin(np.pi * d / (2 * n))
    nodes = a + half * (ref + 1.0)
    if spec.kind is GridKind.CGL:
        nodes[0], nodes[-1] = a, b
    for arr in (nodes, qw, bw, ref_diff):
        arr.setflags(write=False)
    return Grid(spec, nodes, half * qw, bw, ref_diff)


def cgl_grid(n_points: int, interval=(-1.0, 1.0)) -> Grid:
    return make_grid(GridSpec(GridKind.CGL, n_points, interval))


def cg_grid(n_points: int, interval=(-1.0, 1.0)) -> Grid:
    return make_grid(GridSpec(GridKind.CG, n_points, interval))


@dataclass(frozen=True, eq=False)
class DiffMatrix:
    grid: Grid
    entries: np.ndarray


@dataclass(frozen=True, eq=False)
class InterpMatrix:
    source: Grid
    target: Grid
    entries: np.ndarray


def diff_matrix(grid: Grid) -> DiffMatrix:
    """First-derivative collocation matrix on `grid`.

    Off-diagonal entries use the barycentric formula
    ``D[i, j] = (w_j / w_i) / (x_i - x_j)``; the diagonal is minus the row sum.
    """
    if grid.n < 2:
        raise ValueError("differentiation needs at least 2 nodes")
    w = grid.bary_weights
    half = 0.5 * (grid.interval[1] - grid.interval[0])
    dx = half * grid._ref_diff
    np.fill_diagonal(dx, 1.0)
    D = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    D.setflags(write=False)
    return DiffMatrix(grid, D)


def second_diff(d: DiffMatrix) -> np.ndarray:
    return d.entries @ d.entries


def interp_matrix(source: Grid, target: Grid) -> InterpMatrix:
    """Lagrange evaluation matrix from `source` node values to `target` nodes.

    Second barycentric form. Target nodes that coincide with a source node
    get an exact unit row.
    """
    if not source.same_interval(target):
        raise ValueError(
            f"grids live on different intervals: {source.interval} vs {target.interval}"
        )
    if source is target:
        M = np.eye(source.n)
    else:
        x, y, w = source.nodes, target.nodes, source.bary_weights
        diff = y[:, None] - x[None, :]
        scale = max(abs(v) for v in source.interval) + (source.interval[1] - source.interval[0])
        hit = np.abs(diff) <= 4 * np.finfo(float).eps * scale
        with np.errstate(divide="ignore", invalid="ignore"):
            C = w[None, :] / diff
            M = C / C.sum(axis=1, keepdims=True)
        rows = hit.any(axis=1)
        M[rows] = hit[rows].astype(float)
    M.setflags(write=False)
    return InterpMatrix(source, target, M)


def restrict(m: np.ndarray, row_keep, col_keep) -> np.ndarray:
    """Submatrix ``m[row_keep][:, col_keep]``; `None` keeps everything."""
    m = np.asarray(m)
    rows = np.arange(m.shape[0]) if row_keep is None else np.asarray(row_keep, dtype=int)
    cols = np.arange(m.shape[1]) if col_keep is None else np.asarray(col_keep, dtype=int)
    if rows.size == 0 or cols.size == 0:
        raise ValueError("restriction would be empty")
    for idx, n in ((rows, m.shape[0]), (cols, m.shape[1])):
        if idx.min() < -n or idx.max() >= n:
            raise IndexError(f"index out of range for dimension {n}")
    return m[np.ix_(rows, cols)]


def time_interior(n_points: int) -> np.ndarray:
    """Unknown time indices: every CGL node except the initial one."""
    return np.arange(1, n_points)


def space_interior(n_points: int) -> np.ndarray:
    """Unknown space indices on a CGL axis: both walls removed."""
    return np.arange(1, n_points - 1)
