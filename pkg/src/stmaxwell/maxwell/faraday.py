"""Magnetic-field recovery from a computed electric field.

Faraday's law ``B_t = -curl E`` is collocated at the time nodes ``t > t_0``
of every B node, so each B component costs one ``<S_t>`` solve along time
for all spatial nodes at once, plus its initial slice.

Curl terms are formed by differentiating E on its own grid along the
derivative axis and then interpolating onto the target B grid. Along that
axis E lives on N+1 CGL points while B_i lives on N CG points; the
derivative has one degree less than E, so the transfer is exact, and the
discrete divergence of the recovered B inherits the exact cancellation of
mixed derivatives.
"""
from __future__ import annotations

from typing import Callable, Mapping

import numpy as np
from scipy import linalg

from ..chebyshev import diff_matrix, interp_matrix, restrict
from ..kron import KronOp, KronTerm, mode_product
from ..tt import AmenConfig, CrossConfig, TTTensor, amen_solve, tt_add, tt_embed, tt_matrix_from_kron, tt_mode_product, tt_zeros
from .spaces import B_COMPONENTS, E_COMPONENTS, StaggeredSpaces
from .wave import Mode, _cross, sample

__all__ = ["CURL_TERMS", "curl_factors", "minus_curl", "recover_magnetic", "time_operator"]

# (-curl E)_i = sum of sign * d/d(axis) E_src
CURL_TERMS = {
    "Bx": ((-1.0, "Ez", 2), (1.0, "Ey", 3)),
    "By": ((-1.0, "Ex", 3), (1.0, "Ez", 1)),
    "Bz": ((-1.0, "Ey", 1), (1.0, "Ex", 2)),
}


def _transfer(src, tgt) -> np.ndarray | None:
    if src is tgt:
        return None
    return interp_matrix(src, tgt).entries


def curl_factors(spaces: StaggeredSpaces, b_comp: str, term: tuple) -> list:
    """Per-axis matrices mapping an E grid to the B grid for one curl term."""
    _, e_comp, axis = term
    src = spaces.grids[e_comp]
    tgt = spaces.grids[b_comp]
    mats = []
    for a in range(4):
        m = _transfer(src[a], tgt[a])
        if a == axis:
            d = diff_matrix(src[a]).entries
            m = d if m is None else m @ d
        mats.append(m)
    return mats


def minus_curl(e: Mapping, spaces: StaggeredSpaces, b_comp: str):
    """``-(curl E)`` component on the grid of `b_comp`; full arrays or TTs."""
    out = None
    for term in CURL_TERMS[b_comp]:
        sign = term[0]
        mats = curl_factors(spaces, b_comp, term)
        src = e[term[1]]
        if isinstance(src, TTTensor):
            mats = [m if m is None or k != term[2] else sign * m for k, m in enumerate(mats)]
            part = tt_mode_product(src, mats)
            out = part if out is None else tt_add(out, part)
        else:
            part = np.asarray(src, dtype=float)
            for a, m in enumerate(mats):
                if m is not None:
                    part = mode_product(part, m, a)
            out = sign * part if out is None else out + sign * part
    return out


def time_operator(spaces: StaggeredSpaces) -> tuple:
    """``(<S_t>, S_t[1:, 0])`` on the shared time grid."""
    st = diff_matrix(spaces.t).entries
    it = np.arange(1, spaces.t.n)
    return restrict(st, it, it), st[it, 0]


def recover_magnetic(
    e: Mapping,
    spaces: StaggeredSpaces,
    b_initial: Mapping[str, Callable],
    mode: Mode | str = Mode.FULL,
    tt_tol: float = 1e-11,
    amen: AmenConfig | None = None,
    cross=None,
) -> tuple:
    """Recover the three B components from E on its staggered grids.

    Parameters
    ----------
    e : mapping ``{"Ex", "Ey", "Ez"}`` -> array or TTTensor on the E grids.
    spaces : StaggeredSpaces
    b_initial : mapping ``{"Bx", "By", "Bz"}`` -> oracle ``(x, y, z)``.
    mode : "full" or "tt"

    Returns
    -------
    b : dict of B components on their grids, same storage as `e`.
    info : dict of per-component solve residuals; TT mode adds cross
        diagnostics under ``"cross"``.

    Only initial data of B enters; wall values of B are determined by the
    time integration of ``-curl E`` and are not imposed.
    """
    mode = Mode(mode)
    missing = [c for c in E_COMPONENTS if c not in e]
    if missing:
        raise ValueError(f"missing E components {missing}")
    T, col = time_operator(spaces)
    if not np.all(np.isfinite(T)) or np.linalg.cond(T) > 1e14:
        raise np.linalg.LinAlgError("time derivative block is singular")
    n_t = spaces.t.n
    b, info = {}, {}
    if mode is Mode.FULL:
        lu = linalg.lu_factor(T)
        for comp in B_COMPONENTS:
            grids = spaces.grids[comp]
            h = minus_curl(e, spaces, comp)
            b0 = sample(b_initial[comp], [g.nodes for g in grids[1:]])
            rhs = h[1:] - col[:, None, None, None] * b0[None]
            shape = rhs.shape
            sol = linalg.lu_solve(lu, rhs.reshape(shape[0], -1)).reshape(shape)
            nb = np.linalg.norm(rhs)
            res = np.linalg.norm(np.tensordot(T, sol, axes=(1, 0)) - rhs)
            info[comp] = float(res / nb) if nb > 0 else float(res)
            b[comp] = np.concatenate([b0[None], sol], axis=0)
        return b, info

    cfg = amen or AmenConfig(tol=tt_tol)
    t_inv = linalg.inv(T)
    for comp in B_COMPONENTS:
        grids = spaces.grids[comp]
        full = [g.n for g in grids]
        h = minus_curl(e, spaces, comp).round(tt_tol * 1e-2)
        sel = np.eye(n_t)[1:]
        nodes0 = [spaces.t.nodes[:1], *(g.nodes for g in grids[1:])]
        f0 = b_initial[comp]
        b0 = _cross(lambda t, x, y, z: f0(x, y, z), nodes0, cross or CrossConfig(tol=tt_tol), info.setdefault("cross", {}), comp)
        rhs = tt_add(tt_mode_product(h, [sel, None, None, None]), tt_mode_product(b0, [-col[:, None], None, None, None]))
        rhs = rhs.round(tt_tol * 1e-2)
        eye = [np.eye(n) for n in full[1:]]
        op = tt_matrix_from_kron(KronOp((KronTerm(1.0, (T, *eye)),)))
        if rhs.norm() == 0.0:
            sol, res = tt_zeros(rhs.mode_sizes), 0.0
        else:
            # the operator is block diagonal in space, so the time-only
            # inverse is an exact start and AMEn only certifies it
            x0 = tt_mode_product(rhs, [t_inv, None, None, None]).round(1e-15)
            out = amen_solve(op, rhs, cfg, x0)
            sol, res = out.x, out.residual
        info[comp] = float(res)
        b[comp] = tt_add(
            tt_embed(sol, [np.arange(1, n_t), None, None, None], full),
            tt_embed(b0, [[0], None, None, None], full),
        ).round(tt_tol * 1e-2)
    return b, info

