"""Discrete weighted norms, field errors and divergence residuals."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..chebyshev import GridKind, diff_matrix, interp_matrix
from ..kron import mode_product
from ..maxwell.spaces import B_COMPONENTS, E_COMPONENTS
from ..maxwell.wave import sample
from ..tt import TTTensor

__all__ = [
    "weighted_norm",
    "weighted_l2_error",
    "interior_index_sets",
    "field_errors",
    "divergences",
    "divergence_residuals",
    "relative_difference",
]


def _dense(v) -> np.ndarray:
    return v.full() if isinstance(v, TTTensor) else np.asarray(v, dtype=float)


def interior_index_sets(grids: Sequence) -> list:
    """Unknown nodes: t > t_0 in time, no walls on CGL space axes."""
    sets = [np.arange(1, grids[0].n)]
    for g in grids[1:]:
        sets.append(g.interior if g.kind is GridKind.CGL else np.arange(g.n))
    return sets


def weighted_norm(values, grids: Sequence, interior: bool = False) -> float:
    """``sqrt(sum |v|^2 w_t w_x w_y w_z)`` with Chebyshev quadrature weights."""
    v = _dense(values)
    shape = tuple(g.n for g in grids)
    if v.shape != shape:
        raise ValueError(f"tensor shape {v.shape} does not match grids {shape}")
    ws = [g.quad_weights for g in grids]
    sq = v * v
    if interior:
        sets = interior_index_sets(grids)
        sq = sq[np.ix_(*sets)]
        ws = [w[s] for w, s in zip(ws, sets)]
    for w in ws:
        sq = np.tensordot(w, sq, axes=(0, 0))
    return float(np.sqrt(max(float(sq), 0.0)))


def weighted_l2_error(values, exact: Callable, grids: Sequence, interior: bool = False) -> float:
    """Weighted discrete L2 norm of ``values - exact`` on the nodes of `grids`.

    `interior` restricts the sum to the unknown nodes, which is the quantity
    bounded by the a-priori error estimates.
    """
    v = _dense(values)
    shape = tuple(g.n for g in grids)
    if v.shape != shape:
        raise ValueError(f"tensor shape {v.shape} does not match grids {shape}")
    ex = sample(exact, [g.nodes for g in grids])
    return weighted_norm(v - ex, grids, interior)


def field_errors(sol, case, interior: bool = False) -> dict:
    out = {}
    for comp in (*E_COMPONENTS, *B_COMPONENTS):
        out[comp] = weighted_l2_error(sol.component(comp), case.field(comp), sol.spaces.grids[comp], interior)
    return out


def _to_common(v: np.ndarray, grids, common, deriv_axis: int | None) -> np.ndarray:
    for a in range(4):
        g, c = grids[a], common[a]
        m = None if g is c else interp_matrix(g, c).entries
        if a == deriv_axis:
            d = diff_matrix(g).entries
            m = d if m is None else m @ d
        if m is not None:
            v = mode_product(v, m, a)
    return v


def divergences(sol) -> tuple:
    """``(div E_h, div B_h)`` on the common CGL grid ``(t, x, y, z)``."""
    s = sol.spaces
    common = s.wave_grids
    div_e = sum(
        _to_common(_dense(sol.e[c]), s.grids[c], common, i + 1) for i, c in enumerate(E_COMPONENTS)
    )
    div_b = sum(
        _to_common(_dense(sol.b[c]), s.grids[c], common, i + 1) for i, c in enumerate(B_COMPONENTS)
    )
    return div_e, div_b


def divergence_residuals(sol, case) -> tuple:
    """``(||div E_h - rho||, ||div B_h||)`` in the weighted norm of the common grid.

    Each component is differentiated on its own grid and interpolated to
    N+1 CGL points per axis; `rho` is sampled there from the case.
    """
    common = sol.spaces.wave_grids
    div_e, div_b = divergences(sol)
    rho = sample(case.rho, [g.nodes for g in common])
    return weighted_norm(div_e - rho, common), weighted_norm(div_b, common)


def relative_difference(a: dict, b: dict, grids: dict, names: Sequence[str]) -> dict:
    """Weighted-norm difference per component, scaled by the largest norm in `a`."""
    scale = max(weighted_norm(a[n], grids[n]) for n in names)
    scale = scale if scale > 0 else 1.0
    return {n: weighted_norm(_dense(a[n]) - _dense(b[n]), grids[n]) / scale for n in names}
