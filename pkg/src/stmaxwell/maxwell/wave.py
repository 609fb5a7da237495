"""Space-time wave system for one electric-field component.

Unknowns are the values at the CGL nodes with ``t > t_0`` and strictly
inside the spatial box, ``N * (N-1)**3`` of them. With ``T = <S_t>`` the
time derivative restricted to those nodes and ``L_a = <<S_aa>>`` the
interior second-derivative blocks, the system is

    (T^2 kron I - c^2 I kron (L_x (+) L_y (+) L_z)) v = f - F_bd

where ``F_bd`` collects the initial data (through the time-derivative
column of the initial node) and the wall data (through the boundary
columns of the second-derivative matrices).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from ..chebyshev import diff_matrix, restrict, second_diff
from ..errors import MemoryCapError, SolverError
from ..kron import KronOp, KronTerm, apply, check_cap, compose, row_select, to_dense
from ..tt import (
    AmenConfig,
    CrossConfig,
    TTTensor,
    amen_solve,
    grid_oracle,
    tt_add,
    tt_cross,
    tt_embed,
    tt_matrix_from_kron,
    tt_mode_product,
    tt_zeros,
)
from .kronsolve import KronSumSolver
from .spaces import E_COMPONENTS, StaggeredSpaces

__all__ = [
    "Mode",
    "WaveProblem",
    "DiscreteWaveSystem",
    "InteriorSolution",
    "wave_operator",
    "boundary_maps",
    "sample",
    "assemble_wave_system",
    "solve_full",
    "solve_dense",
    "solve_tt",
    "recover_time_derivative",
    "embed_boundary",
    "embed_system",
    "extract_interior",
]

RESIDUAL_LIMIT = 1e-8


class Mode(str, Enum):
    FULL = "full"
    TT = "tt"


@dataclass(frozen=True, eq=False)
class WaveProblem:
    """Data of ``v_tt - c^2 lap v = f`` for one E component.

    ``source`` and ``v_bd`` take ``(t, x, y, z)``; ``v0`` and ``v0_t`` take
    ``(x, y, z)``. All must broadcast over numpy arrays. ``v_bd_t`` is kept
    for completeness; interior rows never see it (see :func:`boundary_maps`).
    """

    component: str
    source: Callable
    v_bd: Callable
    v0: Callable
    v0_t: Callable
    v_bd_t: Callable | None = None
    c: float = 1.0
    eps0: float = 1.0

    def __post_init__(self):
        if self.component not in E_COMPONENTS:
            raise ValueError(f"component must be one of {E_COMPONENTS}, got {self.component!r}")
        if not (self.c > 0 and self.eps0 > 0):
            raise ValueError("c and eps0 must be positive")


@dataclass(frozen=True, eq=False)
class DiscreteWaveSystem:
    mode: Mode
    problem: WaveProblem
    grids: tuple
    index_sets: tuple
    kron: KronOp
    operator: object  # KronOp (full) or TTMatrix (tt)
    rhs: object  # ndarray (full) or TTTensor (tt)
    data: object  # known initial + wall values on the full grid
    st: np.ndarray
    space_second: tuple
    info: dict = field(default_factory=dict)

    @property
    def interior_shape(self) -> tuple:
        return tuple(len(i) for i in self.index_sets)

    @property
    def full_shape(self) -> tuple:
        return tuple(g.n for g in self.grids)


@dataclass(frozen=True, eq=False)
class InteriorSolution:
    values: object
    residual: float
    method: str
    converged: bool = True
    sweeps: int = 0


def sample(func: Callable, nodes) -> np.ndarray:
    """Evaluate ``func`` on the tensor grid spanned by 1-D `nodes`."""
    nodes = [np.asarray(n, dtype=float) for n in nodes]
    d = len(nodes)
    mesh = [n.reshape([-1 if k == j else 1 for k in range(d)]) for j, n in enumerate(nodes)]
    shape = tuple(n.size for n in nodes)
    try:
        out = np.asarray(func(*mesh), dtype=float)
    except Exception as exc:
        spans = ", ".join(f"[{n.min():.6g}, {n.max():.6g}] x{n.size}" for n in nodes)
        raise type(exc)(f"oracle failed on grid {spans}: {exc}") from exc
    return np.array(np.broadcast_to(out, shape))


def wave_operator(grids, c: float = 1.0) -> tuple:
    """Return ``(KronOp, T, (L_x, L_y, L_z), index_sets, S_t)`` for CGL `grids`."""
    gt, gx, gy, gz = grids
    it = np.arange(1, gt.n)
    st = diff_matrix(gt).entries
    T = restrict(st, it, it)
    T2 = T @ T
    sets = [it]
    Ls = []
    for g in (gx, gy, gz):
        ii = g.interior
        sets.append(ii)
        Ls.append(restrict(second_diff(diff_matrix(g)), ii, ii))
    It = np.eye(len(it))
    Is = [np.eye(len(s)) for s in sets[1:]]
    c2 = c * c
    op = KronOp(
        (
            KronTerm(1.0, (T2, *Is)),
            KronTerm(-c2, (It, Ls[0], Is[1], Is[2])),
            KronTerm(-c2, (It, Is[0], Ls[1], Is[2])),
            KronTerm(-c2, (It, Is[0], Is[1], Ls[2])),
        )
    )
    return op, T, tuple(Ls), tuple(sets), st


def boundary_maps(grids, c: float = 1.0) -> dict:
    """Operators taking full-grid data tensors to their interior-row contribution.

    Keys:
      ``"ic"``   -- data holding v(0, .) on the t=0 slice
      ``"ic_t"`` -- data holding v_t(0, .) on the t=0 slice
      ``"bd"``   -- data holding wall values at t > 0

    ``F_bd = ic @ G_ic + ic_t @ G_ict + bd @ G_bd``. Wall data of v_t would
    enter only through identity rows restricted to the interior, which
    vanish on wall nodes, so no map is needed for it.
    """
    gt, gx, gy, gz = grids
    sets = [np.arange(1, gt.n)] + [g.interior for g in (gx, gy, gz)]
    st = diff_matrix(gt).entries
    full_id = [np.eye(g.n) for g in grids]
    # rows of S_t at interior times, identity rows at interior space
    a2 = row_select(KronOp((KronTerm(1.0, (st, *full_id[1:])),)), sets)
    T = restrict(st, sets[0], sets[0])
    a1 = KronOp((KronTerm(1.0, (T, *(np.eye(len(s)) for s in sets[1:]))),))
    sel = [np.eye(g.n)[s] for g, s in zip(grids, sets)]
    terms = []
    for ax, g in enumerate((gx, gy, gz), start=1):
        f = list(sel)
        f[ax] = second_diff(diff_matrix(g))[sets[ax]]
        terms.append(KronTerm(-c * c, tuple(f)))
    return {"ic": compose(a1, a2), "ic_t": a2, "bd": KronOp(tuple(terms))}


def _data_full(problem: WaveProblem, grids) -> tuple:
    gt, gx, gy, gz = grids
    shape = tuple(g.n for g in grids)
    g_ic = np.zeros(shape)
    g_ic[0] = sample(problem.v0, [gx.nodes, gy.nodes, gz.nodes])
    g_ict = np.zeros(shape)
    g_ict[0] = sample(problem.v0_t, [gx.nodes, gy.nodes, gz.nodes])
    g_bd = np.zeros(shape)
    wall = sample(problem.v_bd, [gt.nodes[1:], gx.nodes, gy.nodes, gz.nodes])
    mask = np.zeros(shape[1:], dtype=bool)
    mask[[0, -1], :, :] = True
    mask[:, [0, -1], :] = True
    mask[:, :, [0, -1]] = True
    g_bd[1:, mask] = wall[:, mask]
    return g_ic, g_ict, g_bd


def _cross(func4, nodes, cfg: CrossConfig, info: dict, key: str) -> TTTensor:
    res = tt_cross(grid_oracle(func4, nodes), [len(n) for n in nodes], cfg)
    info[key] = {
        "converged": res.converged,
        "sweeps": res.sweeps,
        "validation_error": res.validation_error,
        "evaluations": res.evaluations,
        "ranks": list(res.tt.ranks),
    }
    return res.tt


def _data_tt(problem: WaveProblem, grids, cfg: CrossConfig, info: dict) -> tuple:
    gt, gx, gy, gz = grids
    full = [g.n for g in grids]
    t0 = gt.nodes[:1]

    def slice0(f):
        return lambda t, x, y, z: f(x, y, z)

    nodes0 = [t0, gx.nodes, gy.nodes, gz.nodes]
    g_ic = tt_embed(_cross(slice0(problem.v0), nodes0, cfg, info, "v0"), [[0], None, None, None], full)
    g_ict = tt_embed(_cross(slice0(problem.v0_t), nodes0, cfg, info, "v0_t"), [[0], None, None, None], full)
    # wall data in three disjoint pieces so edges are counted once
    ti = np.arange(1, gt.n)
    walls = [0, gx.n - 1]
    xi, yi = gx.interior, gy.interior
    pieces = [
        ([ti, walls, np.arange(gy.n), np.arange(gz.n)], "bd_x"),
        ([ti, xi, [0, gy.n - 1], np.arange(gz.n)], "bd_y"),
        ([ti, xi, yi, [0, gz.n - 1]], "bd_z"),
    ]
    g_bd = None
    for idx, key in pieces:
        idx = [np.asarray(i) for i in idx]
        nodes = [g.nodes[i] for g, i in zip(grids, idx)]
        part = tt_embed(_cross(problem.v_bd, nodes, cfg, info, key), idx, full)
        g_bd = part if g_bd is None else tt_add(g_bd, part)
    return g_ic, g_ict, g_bd


def assemble_wave_system(
    problem: WaveProblem,
    spaces: StaggeredSpaces,
    mode: Mode | str = Mode.FULL,
    tt_tol: float = 1e-11,
    cross: CrossConfig | None = None,
) -> DiscreteWaveSystem:
    """Assemble operator and right-hand side of one E-component wave system.

    Full mode samples the source directly and applies the boundary maps to
    dense data tensors. TT mode builds the source and every piece of initial
    and wall data by cross interpolation, applies the boundary maps as TT
    matrices and rounds the result to `tt_tol`.
    """
    mode = Mode(mode)
    grids = spaces.wave_grids
    op, T, Ls, sets, st = wave_operator(grids, problem.c)
    maps = boundary_maps(grids, problem.c)
    info = {}
    t0 = time.perf_counter()
    inner_nodes = [g.nodes[s] for g, s in zip(grids, sets)]
    if mode is Mode.FULL:
        f = sample(problem.source, inner_nodes)
        g_ic, g_ict, g_bd = _data_full(problem, grids)
        fbd = apply(maps["ic"], g_ic) + apply(maps["ic_t"], g_ict) + apply(maps["bd"], g_bd)
        rhs = f - fbd
        operator = op
        data = g_ic + g_bd
    else:
        if not tt_tol > 0:
            raise ValueError("tt_tol must be positive in TT mode")
        cfg = cross or CrossConfig(tol=tt_tol)
        f = _cross(problem.source, inner_nodes, cfg, info, "source")
        g_ic, g_ict, g_bd = _data_tt(problem, grids, cfg, info)
        fbd = tt_add(
            tt_add(tt_matrix_from_kron(maps["ic"]) @ g_ic, tt_matrix_from_kron(maps["ic_t"]) @ g_ict),
            tt_matrix_from_kron(maps["bd"]) @ g_bd,
        )
        rhs = (f - fbd).round(tt_tol)
        operator = tt_matrix_from_kron(op).round(1e-15)
        data = tt_add(g_ic, g_bd).round(tt_tol * 1e-2)
    info["assemble_seconds"] = time.perf_counter() - t0
    return DiscreteWaveSystem(mode, problem, grids, sets, op, operator, rhs, data, st, Ls, info)


def _residual(sys: DiscreteWaveSystem, v: np.ndarray) -> float:
    r = apply(sys.kron, v) - sys.rhs
    nb = np.linalg.norm(sys.rhs)
    return float(np.linalg.norm(r) / nb) if nb > 0 else float(np.linalg.norm(r))


def solve_dense(sys: DiscreteWaveSystem) -> InteriorSolution:
    """Dense LU solve of the explicitly assembled operator (small N only)."""
    if sys.mode is not Mode.FULL:
        raise ValueError("dense solve needs a full-mode system")
    a = to_dense(sys.kron)
    v = np.linalg.solve(a, np.asarray(sys.rhs).ravel()).reshape(sys.interior_shape)
    return InteriorSolution(v, _residual(sys, v), "dense")


def solve_full(sys: DiscreteWaveSystem) -> InteriorSolution:
    """Direct Kronecker-sum solve; falls back to dense LU if the fast path fails."""
    if sys.mode is not Mode.FULL:
        raise ValueError("solve_full needs a full-mode system")
    rhs = np.asarray(sys.rhs)
    if not np.any(rhs):
        return InteriorSolution(np.zeros_like(rhs), 0.0, "kronsum")
    T = restrict(sys.st, sys.index_sets[0], sys.index_sets[0])
    try:
        solver = KronSumSolver(T @ T, sys.space_second, sys.problem.c**2)
        v = solver.solve(rhs)
        method = "kronsum"
    except np.linalg.LinAlgError as exc:
        n = rhs.size
        try:
            check_cap(8.0 * n * n, "dense fallback")
        except MemoryCapError as cap:
            raise SolverError(f"fast solver failed ({exc}) and {cap}") from exc
        return _checked(solve_dense(sys))
    return _checked(InteriorSolution(v, _residual(sys, v), method))


def _checked(sol: InteriorSolution) -> InteriorSolution:
    if not sol.residual <= RESIDUAL_LIMIT:
        raise SolverError(f"wave solve residual {sol.residual:.3e} above {RESIDUAL_LIMIT:g}", sol.residual)
    return sol


def solve_tt(sys: DiscreteWaveSystem, cfg: AmenConfig | None = None) -> InteriorSolution:
    if sys.mode is not Mode.TT:
        raise ValueError("solve_tt needs a TT-mode system")
    cfg = cfg or AmenConfig(tol=1e-11)
    res = amen_solve(sys.operator, sys.rhs, cfg)
    return InteriorSolution(res.x, res.residual, "amen", res.converged, res.sweeps)


def recover_time_derivative(sys: DiscreteWaveSystem, v_hat):
    """Interior values of v_t: ``(<S_t> kron I) v + S_t[1:, 0] kron v0``."""
    it = sys.index_sets[0]
    T = restrict(sys.st, it, it)
    col = sys.st[it, 0]
    sp = sys.index_sets[1:]
    if isinstance(v_hat, TTTensor):
        if v_hat.mode_sizes != sys.interior_shape:
            raise ValueError("interior solution has the wrong shape")
        sel = [None] + [np.eye(n)[s] for n, s in zip(sys.full_shape[1:], sp)]
        v0 = tt_mode_product(sys.data, [np.eye(sys.full_shape[0])[:1], *sel[1:]])
        part = tt_mode_product(v0, [col[:, None], None, None, None])
        return tt_add(tt_mode_product(v_hat, [T, None, None, None]), part)
    v_hat = np.asarray(v_hat)
    if v_hat.shape != sys.interior_shape:
        raise ValueError(f"interior solution shape {v_hat.shape} != {sys.interior_shape}")
    data = sys.data if isinstance(sys.data, np.ndarray) else sys.data.full()
    v0 = data[0][np.ix_(*sp)]
    return np.tensordot(T, v_hat, axes=(1, 0)) + col[:, None, None, None] * v0[None]


def extract_interior(full_tensor: np.ndarray, index_sets) -> np.ndarray:
    return np.asarray(full_tensor)[np.ix_(*index_sets)]


def embed_boundary(interior, problem: WaveProblem, grids) -> np.ndarray:
    """Full-grid tensor: `interior` inside, oracle data at t=0 and on walls."""
    interior = np.asarray(interior)
    sets = [np.arange(1, grids[0].n)] + [g.interior for g in grids[1:]]
    shape = tuple(len(s) for s in sets)
    if interior.shape != shape:
        raise ValueError(f"interior shape {interior.shape} != {shape}")
    g_ic, _, g_bd = _data_full(problem, grids)
    out = g_ic + g_bd
    out[np.ix_(*sets)] = interior
    return out


def embed_system(sys: DiscreteWaveSystem, sol) -> object:
    """Embed an interior solution using the data tensors already held by `sys`."""
    if isinstance(sol, TTTensor):
        return tt_add(tt_embed(sol, sys.index_sets, sys.full_shape), sys.data)
    out = np.array(sys.data, dtype=float)
    out[np.ix_(*sys.index_sets)] = sol
    return out
